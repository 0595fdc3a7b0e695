"""Complex linear algebra for one- and two-qubit pure states.

Small, dense, and value-semantic: states are immutable wrappers around
complex amplitudes, unitaries are checked at construction, and every
operation is a pure function. Two-qubit amplitudes are ordered
control-major, index ``2*c + t`` for control bit ``c`` and target bit
``t``; every other module inherits this convention.

Angles are radians throughout the library; degrees appear only at I/O
boundaries (CLI flags, serialized parameter files).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Tolerance for the unitarity check ``max |U^dag U - I|``.
UNITARY_TOL = 1e-12

#: Default tolerance for amplitude equality up to a global phase.
PHASE_EQ_TOL = 1e-9


@dataclass(frozen=True)
class StateVec2:
    """Amplitudes of one qubit on an ordered two-state basis.

    The vector is not forced to unit norm: unnormalized vectors are
    meaningful in places where the squared norm carries a probability.
    Constructors that promise normalization are responsible for it.
    """

    a0: complex
    a1: complex

    @property
    def norm_sq(self) -> float:
        return abs(self.a0) ** 2 + abs(self.a1) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)


class StateVec4:
    """Joint amplitudes of a control/target qubit pair, index ``2*c + t``."""

    __slots__ = ("amps",)

    def __init__(self, amplitudes) -> None:
        amps = np.array(amplitudes, dtype=complex).reshape(4)
        if not np.isfinite(amps).all():
            raise ValueError("two-qubit amplitudes must be finite")
        amps.setflags(write=False)
        self.amps = amps

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def __getitem__(self, index: int) -> complex:
        return complex(self.amps[index])

    def __repr__(self) -> str:
        return f"StateVec4({list(self.amps)!r})"


class Unitary4:
    """A 4x4 unitary matrix; unitarity is verified at construction.

    Raises
    ------
    ValueError
        If ``max |U^dag U - I|`` exceeds ``UNITARY_TOL``.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix) -> None:
        m = np.array(matrix, dtype=complex).reshape(4, 4)
        deviation = float(np.max(np.abs(m.conj().T @ m - np.eye(4))))
        if not np.isfinite(deviation) or deviation > UNITARY_TOL:
            raise ValueError(
                f"matrix is not unitary: max |U^dag U - I| = {deviation:.3e}"
            )
        m.setflags(write=False)
        self.matrix = m


def tensor(control: StateVec2, target: StateVec2) -> StateVec4:
    """Product state of a control and a target qubit.

    Output amplitude at index ``2*c + t`` is ``control[c] * target[t]``.
    Total on all inputs; the result is normalized exactly when both
    factors are.
    """
    return StateVec4(np.kron(control.as_array(), target.as_array()))


def apply_unitary(u: Unitary4, psi: StateVec4) -> StateVec4:
    """Matrix-vector product ``U @ psi``; preserves the norm."""
    return StateVec4(u.matrix @ psi.amps)


def overlap_prob(
    psi: StateVec4, bra_control: StateVec2, bra_target: StateVec2
) -> float:
    """Projection probability ``|(<c| x <t|) |psi>|^2`` onto a product bra.

    Parameters
    ----------
    psi:
        Two-qubit state.
    bra_control, bra_target:
        Normalized single-qubit states defining the product projector.

    Returns
    -------
    float
        Probability in [0, 1].
    """
    bra = np.kron(bra_control.as_array(), bra_target.as_array())
    amplitude = np.vdot(bra, psi.amps)
    p = float(abs(amplitude) ** 2)
    return min(max(p, 0.0), 1.0)


def states_close(a: StateVec4, b: StateVec4, tol: float = PHASE_EQ_TOL) -> bool:
    """Amplitude-wise equality after compensating one global phase.

    The compensating phase is the one maximizing the overlap of the two
    vectors, so physically identical states compare equal regardless of
    an overall phase factor.
    """
    overlap = np.vdot(b.amps, a.amps)
    phase = overlap / abs(overlap) if abs(overlap) > 0.0 else 1.0
    return bool(np.max(np.abs(a.amps / phase - b.amps)) <= tol)
