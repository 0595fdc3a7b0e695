"""Physical error model of the probe hardware and its least-squares fit.

Ten angle parameters describe the deviations of a real setup from the
ideal attack: a residual phase on the probe preparation, a residual
phase and four per-state wave-plate offsets on Alice's qubit, an
imbalance and phase of the entangling gate, and one analyzer offset per
measurement basis. The forward model predicts the four joint detection
probabilities for any configuration; the fitter recovers the ten
parameters from measured coincidence counts by derivative-free simplex
descent on a least-squares objective.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .probe import (
    OUTCOME_ORDER,
    Bb84State,
    JointDistribution,
    ProbeConfig,
    SiftBasis,
    renyi_information,
)
from .qmath import StateVec2, Unitary4, apply_unitary, overlap_prob, tensor

if TYPE_CHECKING:
    from .montecarlo import CountsRecord

#: Fit box constraint on every parameter, radians.
ANGLE_BOUND = math.pi / 2

_STATE_ORDER = (Bb84State.H, Bb84State.D, Bb84State.V, Bb84State.A)
_PARAM_KEYS = (
    "d_xi",
    "d_chi",
    "d_theta_a_h",
    "d_theta_a_d",
    "d_theta_a_v",
    "d_theta_a_a",
    "alpha",
    "delta",
    "d_theta_b_hv",
    "d_theta_b_da",
)


@dataclass(frozen=True)
class ErrorModelParams:
    """The ten hardware error parameters, all angles in radians.

    Attributes
    ----------
    d_xi:
        Residual probe-preparation phase left after the nominal hardware
        compensation.
    d_chi:
        Residual phase on Alice's qubit after its nominal compensation.
    d_theta_a:
        Wave-plate offsets of Alice's state angle, indexed (H, D, V, A).
    alpha, delta:
        Imbalance and phase of the entangling gate; zero for an ideal gate.
    d_theta_b:
        Analyzer angle offsets, indexed (HV, DA).
    """

    d_xi: float = 0.0
    d_chi: float = 0.0
    d_theta_a: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    alpha: float = 0.0
    delta: float = 0.0
    d_theta_b: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        values = self.as_vector()
        if not np.isfinite(values).all():
            raise ValueError("error-model parameters must be finite")
        if np.any(np.abs(values) >= ANGLE_BOUND):
            raise ValueError(
                "error-model angles must satisfy |angle| < pi/2 radians"
            )

    def theta_a_offset(self, state: Bb84State) -> float:
        return self.d_theta_a[_STATE_ORDER.index(state)]

    def theta_b_offset(self, basis: SiftBasis) -> float:
        return self.d_theta_b[0] if basis is SiftBasis.HV else self.d_theta_b[1]

    def as_vector(self) -> np.ndarray:
        """Flat parameter vector in the serialization key order, radians."""
        return np.array(
            [self.d_xi, self.d_chi, *self.d_theta_a, self.alpha, self.delta,
             *self.d_theta_b]
        )

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "ErrorModelParams":
        x = [float(v) for v in x]
        if len(x) != 10:
            raise ValueError(f"expected 10 parameters, got {len(x)}")
        return cls(
            d_xi=x[0],
            d_chi=x[1],
            d_theta_a=(x[2], x[3], x[4], x[5]),
            alpha=x[6],
            delta=x[7],
            d_theta_b=(x[8], x[9]),
        )

    def to_dict(self) -> dict[str, float]:
        """Flat key/value form with angles in degrees."""
        return {
            key: math.degrees(value)
            for key, value in zip(_PARAM_KEYS, self.as_vector())
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, float]) -> "ErrorModelParams":
        """Parse the flat degree-valued form; unknown keys are ignored."""
        missing = [key for key in _PARAM_KEYS if key not in doc]
        if missing:
            raise ValueError(f"parameter document missing keys: {missing}")
        return cls.from_vector(
            [math.radians(float(doc[key])) for key in _PARAM_KEYS]
        )


@dataclass(frozen=True)
class OutcomeProbs:
    """Joint detection probabilities for one configuration.

    ``p`` holds four entries in ``OUTCOME_ORDER``, i.e. (bob_bit,
    eve_bit) = (1,0), (1,1), (0,1), (0,0); they are nonnegative and sum
    to one.
    """

    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.p, dtype=float)
        if p.shape != (4,):
            raise ValueError("outcome probabilities must have 4 entries")
        if np.any(p < 0.0) or not np.isfinite(p).all():
            raise ValueError("outcome probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"outcome probabilities must sum to 1, got {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def prob(self, bob_bit: int, eve_bit: int) -> float:
        return float(self.p[OUTCOME_ORDER.index((bob_bit, eve_bit))])


def nonideal_probe_state(cfg: ProbeConfig, d_xi: float) -> StateVec2:
    """Probe preparation with a residual phase ``d_xi`` on the upper state."""
    return StateVec2(
        complex(math.cos(cfg.theta_in)),
        cmath.exp(1j * d_xi) * math.sin(cfg.theta_in),
    )


def nonideal_alice_state(
    alice: Bb84State, d_theta: float, d_chi: float
) -> StateVec2:
    """Alice's qubit with a wave-plate angle offset and residual phase."""
    theta = alice.theta + d_theta
    return StateVec2(
        complex(math.cos(theta)), cmath.exp(1j * d_chi) * math.sin(theta)
    )


def nonideal_pcnot(alpha: float, delta: float) -> Unitary4:
    """Entangling gate with imbalance ``alpha`` and phase ``delta``.

    Block diagonal in the control bit; reduces to the ideal CNOT at
    ``alpha = delta = 0`` and stays exactly unitary for all arguments.
    """
    c = math.cos(alpha)
    s = math.sin(alpha)
    ep = cmath.exp(1j * delta)
    em = cmath.exp(-1j * delta)
    return Unitary4(
        [
            [c, 1j * em * s, 0.0, 0.0],
            [1j * ep * s, c, 0.0, 0.0],
            [0.0, 0.0, -1j * ep * s, c],
            [0.0, 0.0, c, -1j * em * s],
        ]
    )


def bob_analyzer(basis: SiftBasis, d_theta_b: float) -> tuple[StateVec2, StateVec2]:
    """Bob's two analyzed-bit states in the control frame.

    The analyzer angle is the basis nominal (+22.5 deg for HV, -22.5 deg
    for DA) plus the offset. Returns the (bit-0, bit-1) states; with a
    zero offset these coincide with the basis states themselves.
    """
    nominal = math.pi / 8 if basis is SiftBasis.HV else -math.pi / 8
    theta = nominal + d_theta_b
    bit0 = StateVec2(complex(math.cos(theta)), complex(-math.sin(theta)))
    bit1 = StateVec2(complex(math.sin(theta)), complex(math.cos(theta)))
    return bit0, bit1


def predict_outcome_probs(
    params: ErrorModelParams,
    alice: Bb84State,
    bob_basis: SiftBasis,
    cfg: ProbeConfig,
) -> OutcomeProbs:
    """Forward-model the four joint detection probabilities.

    Pipeline: prepare Alice's and the probe's non-ideal states, apply
    the non-ideal entangling gate, then project onto Bob's analyzed-bit
    states and Eve's computational states. Entries follow
    ``OUTCOME_ORDER`` and sum to one by unitarity.
    """
    joint = tensor(
        nonideal_alice_state(alice, params.theta_a_offset(alice), params.d_chi),
        nonideal_probe_state(cfg, params.d_xi),
    )
    out = apply_unitary(nonideal_pcnot(params.alpha, params.delta), joint)
    analyzer = bob_analyzer(bob_basis, params.theta_b_offset(bob_basis))
    comp = (StateVec2(1.0, 0.0), StateVec2(0.0, 1.0))
    return OutcomeProbs(
        np.array([overlap_prob(out, analyzer[b], comp[e]) for b, e in OUTCOME_ORDER])
    )


def model_renyi(params: ErrorModelParams, basis: SiftBasis, cfg: ProbeConfig) -> float:
    """Renyi information predicted by the error model for one basis.

    Pools the error-free-sift cells of both of the basis's input states
    with equal priors and evaluates the information of the resulting
    joint distribution.
    """
    raw = np.zeros((2, 2))
    for state in basis.states:
        probs = predict_outcome_probs(params, state, basis, cfg)
        for e in (0, 1):
            raw[state.bit, e] = 0.5 * probs.prob(state.bit, e)
    return renyi_information(JointDistribution.from_raw(raw))


def model_sifted_error_rate(
    params: ErrorModelParams, basis: SiftBasis, cfg: ProbeConfig
) -> float:
    """Predicted fraction of sift events where Bob's bit differs from Alice's."""
    total = 0.0
    for state in basis.states:
        probs = predict_outcome_probs(params, state, basis, cfg)
        total += 0.5 * sum(
            float(probs.p[i]) for i, (b, _) in enumerate(OUTCOME_ORDER)
            if b != state.bit
        )
    return total


@dataclass(frozen=True)
class FitOptions:
    """Knobs of the simplex fit.

    ``weighting`` selects how records enter the objective: "equal"
    weights every record's normalized probabilities the same, "counts"
    scales each record by its total counts relative to the mean total.
    """

    max_evals: int = 50_000
    simplex_tol: float = 1e-6
    objective_tol: float = 1e-12
    max_restarts: int = 10
    weighting: str = "equal"

    def __post_init__(self) -> None:
        if self.weighting not in ("equal", "counts"):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")


@dataclass(frozen=True)
class FitResult:
    """Outcome of a parameter fit."""

    params: ErrorModelParams
    residual: float
    evaluations: int
    converged: bool


def _record_design(
    records: Sequence["CountsRecord"], weighting: str
) -> list[tuple[Bb84State, SiftBasis, ProbeConfig, np.ndarray, float]]:
    totals = []
    for record in records:
        total = sum(record.counts)
        if total <= 0:
            raise ValueError(
                f"record ({record.alice.value}, {record.bob_basis.value}, "
                f"{record.pe_nominal}) has zero total counts"
            )
        totals.append(total)
    mean_total = sum(totals) / len(totals)
    design = []
    for record, total in zip(records, totals):
        estimated = np.array(record.counts, dtype=float) / total
        weight = 1.0 if weighting == "equal" else total / mean_total
        design.append(
            (record.alice, record.bob_basis, ProbeConfig(record.pe_nominal),
             estimated, weight)
        )
    return design


def _make_objective(records: Sequence["CountsRecord"], weighting: str):
    """Least-squares objective over all records and outcomes.

    Terms are accumulated with exact summation, so the value is
    bit-identical under any reordering of the records.
    """
    design = _record_design(records, weighting)

    def objective(x: np.ndarray) -> float:
        excess = np.abs(x) - ANGLE_BOUND
        if np.any(excess >= 0.0):
            # Steer the simplex back inside the box instead of failing.
            return 1e6 * (1.0 + float(np.sum(np.maximum(excess, 0.0))))
        params = ErrorModelParams.from_vector(x)
        terms = []
        for alice, basis, cfg, estimated, weight in design:
            predicted = predict_outcome_probs(params, alice, basis, cfg).p
            diff = estimated - predicted
            terms.extend(weight * diff * diff)
        return math.fsum(terms)

    return objective


def fit_parameters(
    records: Sequence["CountsRecord"],
    init: ErrorModelParams | None = None,
    options: FitOptions | None = None,
) -> FitResult:
    """Fit the ten error-model parameters to measured counts.

    Minimizes the summed squared differences between each record's
    normalized probabilities and the forward-model prediction, using
    Nelder-Mead simplex descent restarted from its own solution until no
    further improvement. Deterministic given identical records, init,
    and options.

    The model's probabilities are invariant under jointly negating
    d_xi, d_chi, alpha, and delta (complex conjugation of every
    amplitude), so the fit returns the representative with a
    nonnegative gate imbalance.

    Parameters
    ----------
    records:
        Measured configurations; at least 3 records (so the data values
        outnumber the 10 parameters) spanning at least 2 distinct
        nominal error probabilities, none with all-zero counts.
    init:
        Starting point; all-zero parameters when omitted.
    options:
        Termination and weighting controls.

    Returns
    -------
    FitResult
        Best parameters, the objective value there, the number of
        objective evaluations, and whether the simplex converged within
        its tolerances.
    """
    options = options or FitOptions()
    init = init or ErrorModelParams()
    if len(records) * 4 < 10:
        raise ValueError(
            f"need at least 10 data values to fit 10 parameters, got "
            f"{len(records) * 4}"
        )
    if len({record.pe_nominal for record in records}) < 2:
        raise ValueError("records must span at least 2 distinct error probabilities")

    objective = _make_objective(records, options.weighting)
    x = init.as_vector()
    best = objective(x)
    evaluations = 1
    converged = False
    for _ in range(options.max_restarts):
        remaining = options.max_evals - evaluations
        if remaining <= 0:
            break
        result = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={
                "maxfev": remaining,
                "xatol": options.simplex_tol,
                "fatol": options.objective_tol,
                "adaptive": True,
            },
        )
        evaluations += int(result.nfev)
        improved = result.fun < best - options.objective_tol
        x = np.asarray(result.x, dtype=float)
        best = float(result.fun)
        if bool(result.success) and not improved:
            # A restart that converges without improving confirms the optimum.
            converged = True
            break
    if x[6] < 0.0:
        # Pick the conjugation-symmetric representative with alpha >= 0.
        x = x.copy()
        x[[0, 1, 6, 7]] *= -1.0
        best = objective(x)
        evaluations += 1
    return FitResult(
        params=ErrorModelParams.from_vector(x),
        residual=best,
        evaluations=evaluations,
        converged=converged,
    )
