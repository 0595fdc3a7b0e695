"""Ideal entangling-probe attack on BB84.

The eavesdropper entangles a probe qubit with each transmitted photon
through a CNOT gate whose control basis is rotated pi/8 from the H-V
polarization basis, then reads the probe with a projective measurement
in its computational basis. This module provides the ideal attack:
state preparation, the entangled output states, the induced error
probability, the joint Bob/Eve bit statistics on error-free sift
events, and the eavesdropper's Renyi information, both evaluated from
the state vectors and in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .qmath import StateVec2, StateVec4, Unitary4, apply_unitary, overlap_prob, tensor

_SQRT2 = math.sqrt(2.0)

#: Detector outcome order used for all 4-entry probability/count tables:
#: (bob_bit, eve_bit) = (1,0), (1,1), (0,1), (0,0).
OUTCOME_ORDER: tuple[tuple[int, int], ...] = ((1, 0), (1, 1), (0, 1), (0, 0))

#: CNOT in the control-major amplitude ordering (flips target iff control=1).
CNOT = Unitary4(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ]
)


class Bb84State(Enum):
    """One of the four BB84 polarization states."""

    H = "H"
    V = "V"
    D = "D"
    A = "A"

    @property
    def theta(self) -> float:
        """Polar angle of the state in the control-basis frame, radians."""
        return _THETA_A[self]

    @property
    def basis(self) -> "SiftBasis":
        return SiftBasis.HV if self in (Bb84State.H, Bb84State.V) else SiftBasis.DA

    @property
    def bit(self) -> int:
        """Key bit encoded by the state: H and D carry 0, V and A carry 1."""
        return 0 if self in (Bb84State.H, Bb84State.D) else 1


class SiftBasis(Enum):
    """A BB84 measurement basis; H/D encode bit 0, V/A encode bit 1."""

    HV = "HV"
    DA = "DA"

    @property
    def states(self) -> tuple[Bb84State, Bb84State]:
        """The (bit-0, bit-1) states of this basis."""
        if self is SiftBasis.HV:
            return (Bb84State.H, Bb84State.V)
        return (Bb84State.D, Bb84State.A)


# Control basis is the H-V basis rotated by pi/8, so H sits at -22.5 deg,
# D at +22.5 deg, V at 67.5 deg, and A at 112.5 deg in the control frame.
_THETA_A = {
    Bb84State.H: -math.pi / 8,
    Bb84State.D: math.pi / 8,
    Bb84State.V: 3 * math.pi / 8,
    Bb84State.A: 5 * math.pi / 8,
}


@dataclass(frozen=True)
class ProbeConfig:
    """Probe preparation for a chosen induced error probability.

    Attributes
    ----------
    pe:
        Error probability the attack induces on sifted bits, in [0, 0.5].
    c, s:
        Derived amplitudes ``sqrt(1 - 2*pe)`` and ``sqrt(2*pe)``.
    theta_in:
        Preparation angle of the probe qubit, radians.
    """

    pe: float
    c: float = field(init=False)
    s: float = field(init=False)
    theta_in: float = field(init=False)

    def __post_init__(self) -> None:
        if not (0.0 <= self.pe <= 0.5) or not math.isfinite(self.pe):
            raise ValueError(f"error probability must be in [0, 0.5], got {self.pe}")
        c = math.sqrt(1.0 - 2.0 * self.pe)
        s = math.sqrt(2.0 * self.pe)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)
        object.__setattr__(
            self, "theta_in", math.atan2((c - s) / _SQRT2, (c + s) / _SQRT2)
        )


@dataclass(frozen=True)
class TargetTriple:
    """Probe output components in the target computational basis.

    ``t0`` and ``t1`` accompany Bob reading bit 0 / bit 1 on error-free
    sift events; ``te`` accompanies error events. The vectors are
    deliberately unnormalized: ``<t0|t0> = <t1|t1> = 1 - pe`` and
    ``<te|te> = pe``.
    """

    t0: StateVec2
    t1: StateVec2
    te: StateVec2


@dataclass(frozen=True)
class JointDistribution:
    """2x2 joint distribution of Bob's and Eve's bits on error-free sifts.

    ``p[b, e]`` holds the joint probability; ``prior_b`` and ``prior_e``
    are the marginals.
    """

    p: np.ndarray
    prior_b: np.ndarray
    prior_e: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2, 2):
            raise ValueError("joint table must be 2x2")
        if np.any(p < 0.0) or not np.isfinite(p).all():
            raise ValueError("joint table entries must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"joint table must sum to 1, got {p.sum()!r}")
        if np.max(np.abs(p.sum(axis=1) - self.prior_b)) > 1e-12 or np.max(
            np.abs(p.sum(axis=0) - self.prior_e)
        ) > 1e-12:
            raise ValueError("marginals inconsistent with joint table")

    @classmethod
    def from_raw(cls, raw) -> "JointDistribution":
        """Normalize a raw nonnegative 2x2 table into a distribution."""
        table = np.asarray(raw, dtype=float).reshape(2, 2)
        if np.any(table < 0.0) or not np.isfinite(table).all():
            raise ValueError("raw table entries must be finite and nonnegative")
        total = table.sum()
        if total < 1e-15:
            raise ValueError("raw table has no probability mass")
        p = table / total
        p.setflags(write=False)
        return cls(p=p, prior_b=p.sum(axis=1), prior_e=p.sum(axis=0))


def control_frame(state: Bb84State) -> StateVec2:
    """Polarization state expressed in the control-basis frame.

    Returns ``(cos theta, sin theta)`` with the state's polar angle; the
    amplitudes are real and the vector is normalized.
    """
    theta = state.theta
    return StateVec2(complex(math.cos(theta)), complex(math.sin(theta)))


def probe_state(cfg: ProbeConfig) -> StateVec2:
    """Initial probe qubit ``((c+s)/sqrt2, (c-s)/sqrt2)``; normalized."""
    return StateVec2(
        complex((cfg.c + cfg.s) / _SQRT2), complex((cfg.c - cfg.s) / _SQRT2)
    )


def target_triple(cfg: ProbeConfig) -> TargetTriple:
    """Probe output components for a given error probability.

    ``t0 = (c/sqrt2 + s/2, c/sqrt2 - s/2)``, ``t1`` is ``t0`` with the
    components swapped, and ``te = (s/2, -s/2)``.
    """
    hi = cfg.c / _SQRT2 + cfg.s / 2.0
    lo = cfg.c / _SQRT2 - cfg.s / 2.0
    return TargetTriple(
        t0=StateVec2(complex(hi), complex(lo)),
        t1=StateVec2(complex(lo), complex(hi)),
        te=StateVec2(complex(cfg.s / 2.0), complex(-cfg.s / 2.0)),
    )


def attack_output(alice: Bb84State, cfg: ProbeConfig) -> StateVec4:
    """Joint photon/probe state after the entangling CNOT."""
    return apply_unitary(CNOT, tensor(control_frame(alice), probe_state(cfg)))


def outcome_probabilities(
    alice: Bb84State, bob_basis: SiftBasis, cfg: ProbeConfig
) -> np.ndarray:
    """Ideal joint detection probabilities for one configuration.

    Bob analyzes in ``bob_basis`` and Eve projects the probe onto its
    computational basis. Entries follow ``OUTCOME_ORDER``.
    """
    psi = attack_output(alice, cfg)
    bit_state = {s.bit: control_frame(s) for s in bob_basis.states}
    comp = (StateVec2(1.0, 0.0), StateVec2(0.0, 1.0))
    return np.array(
        [overlap_prob(psi, bit_state[b], comp[e]) for b, e in OUTCOME_ORDER]
    )


def error_probability(alice: Bb84State, cfg: ProbeConfig) -> float:
    """Probability that Bob, measuring in Alice's basis, gets the wrong bit.

    Equals ``cfg.pe`` for every input state; evaluated from the state
    vector rather than assumed.
    """
    psi = attack_output(alice, cfg)
    other = next(s for s in alice.basis.states if s is not alice)
    wrong = control_frame(other)
    return overlap_prob(psi, wrong, StateVec2(1.0, 0.0)) + overlap_prob(
        psi, wrong, StateVec2(0.0, 1.0)
    )


def sift_joint_distribution(basis: SiftBasis, cfg: ProbeConfig) -> JointDistribution:
    """Joint Bob/Eve bit distribution on error-free sift events.

    Alice's two basis states are taken equiprobable. Raw entries are the
    projection probabilities of the attack output onto (correct Bob
    state) x (Eve computational state), renormalized over the error-free
    subspace.
    """
    comp = (StateVec2(1.0, 0.0), StateVec2(0.0, 1.0))
    raw = np.zeros((2, 2))
    for state in basis.states:
        psi = attack_output(state, cfg)
        bob = control_frame(state)
        for e in (0, 1):
            raw[state.bit, e] = 0.5 * overlap_prob(psi, bob, comp[e])
    return JointDistribution.from_raw(raw)


def renyi_information(dist: JointDistribution) -> float:
    """Order-2 (Renyi) information about Bob's bit carried by Eve's bit.

    Computed from the joint distribution as the collision-entropy gain
    of conditioning on Eve's outcome; 0 bits for independent tables and
    1 bit for perfectly correlated two-outcome tables. Outcomes of Eve
    with zero probability contribute nothing.
    """
    prior_term = -math.log2(float(np.sum(dist.prior_b**2)))
    cond_term = 0.0
    for e in (0, 1):
        pe = float(dist.prior_e[e])
        if pe <= 0.0:
            continue
        cond = dist.p[:, e] / pe
        cond_term += pe * math.log2(float(np.sum(cond**2)))
    return prior_term + cond_term


def renyi_closed_form(pe: float) -> float:
    """Closed-form Renyi information of the ideal attack at error rate pe.

    ``log2(1 + 4*pe*(1 - 2*pe) / (1 - pe)^2)``: 0 bits at pe = 0 and a
    full bit at pe = 1/3. Values above 1/3 are allowed up to 0.5 but are
    outside the attack's useful operating range, so a warning is issued.
    """
    if not (0.0 <= pe <= 0.5) or not math.isfinite(pe):
        raise ValueError(f"error probability must be in [0, 0.5], got {pe}")
    if pe > 1.0 / 3.0 + 1e-12:
        warnings.warn(
            f"error probability {pe} exceeds 1/3; the probe gains less "
            "information there",
            stacklevel=2,
        )
    return math.log2(1.0 + 4.0 * pe * (1.0 - 2.0 * pe) / (1.0 - pe) ** 2)
