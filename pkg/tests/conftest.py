import math

import numpy as np
import pytest

from fpbsim import Bb84State, ErrorModelParams

RT2 = math.sqrt(2.0)


def analytic_output(state: Bb84State, pe: float) -> np.ndarray:
    """Attack output built from its analytic decomposition.

    Constructs the control-frame basis vectors and the probe output
    components directly from the error probability, independent of the
    gate pipeline under test.
    """
    c, s = math.sqrt(1 - 2 * pe), math.sqrt(2 * pe)
    t0 = np.array([c / RT2 + s / 2, c / RT2 - s / 2])
    t1 = t0[::-1]
    te = np.array([s / 2, -s / 2])

    def frame(deg):
        return np.array([math.cos(math.radians(deg)), math.sin(math.radians(deg))])

    h, v, d, a = frame(-22.5), frame(67.5), frame(22.5), frame(112.5)
    decomposition = {
        Bb84State.H: np.kron(h, t0) + np.kron(v, te),
        Bb84State.V: np.kron(v, t1) + np.kron(h, te),
        Bb84State.D: np.kron(d, t0) - np.kron(a, te),
        Bb84State.A: np.kron(a, t1) - np.kron(d, te),
    }
    return decomposition[state]


@pytest.fixture(scope="session")
def ref_params() -> ErrorModelParams:
    """Hardware-calibration parameter set used for round-trip tests.

    Same values as the bundled data/example_params.json.
    """
    deg = math.radians
    return ErrorModelParams(
        d_xi=deg(3.0),
        d_chi=deg(-11.0),
        d_theta_a=(deg(3.2), deg(0.9), deg(-0.7), deg(-2.3)),
        alpha=deg(12.3),
        delta=deg(3.6),
        d_theta_b=(deg(-1.8), 0.0),
    )


#: 3-decimal ideal-model detection probabilities for the reference layout,
#: keyed (alice, pe), values in outcome order (1,0),(1,1),(0,1),(0,0).
IDEAL_EXPECTED = {
    ("D", 0.0): (0.0, 0.0, 0.500, 0.500),
    ("D", 0.1): (0.050, 0.050, 0.167, 0.733),
    ("D", 1 / 3): (0.167, 0.167, 0.0, 0.667),
    ("A", 0.0): (0.500, 0.500, 0.0, 0.0),
    ("A", 0.1): (0.167, 0.733, 0.050, 0.050),
    ("A", 1 / 3): (0.0, 0.667, 0.167, 0.167),
}

#: 3-decimal normalized probabilities of the bundled measured counts,
#: keyed (alice, pe_nominal).
MEASURED_ESTIMATED = {
    ("D", 0.0): (0.027, 0.037, 0.469, 0.468),
    ("D", 0.1): (0.058, 0.086, 0.196, 0.661),
    ("D", 0.33): (0.152, 0.192, 0.031, 0.625),
    ("A", 0.0): (0.469, 0.484, 0.024, 0.023),
    ("A", 0.1): (0.173, 0.702, 0.083, 0.042),
    ("A", 0.33): (0.022, 0.655, 0.190, 0.133),
}


@pytest.fixture(scope="session")
def ideal_expected():
    return IDEAL_EXPECTED


@pytest.fixture(scope="session")
def measured_estimated():
    return MEASURED_ESTIMATED


@pytest.fixture(scope="session")
def all_states():
    return tuple(Bb84State)
