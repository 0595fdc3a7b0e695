"""Entangling-probe attack on BB84: simulation, statistics, and fitting."""

from .error_model import (
    ErrorModelParams,
    FitOptions,
    FitResult,
    OutcomeProbs,
    bob_analyzer,
    fit_parameters,
    model_renyi,
    model_sifted_error_rate,
    nonideal_alice_state,
    nonideal_pcnot,
    nonideal_probe_state,
    predict_outcome_probs,
)
from .montecarlo import (
    CountsFileError,
    CountsRecord,
    estimate_probabilities,
    load_reference_counts,
    measured_renyi,
    noise_free_counts,
    read_counts_file,
    reference_counts_path,
    sifted_error_rate,
    simulate_counts,
    write_counts_file,
)
from .probe import (
    CNOT,
    OUTCOME_ORDER,
    Bb84State,
    JointDistribution,
    ProbeConfig,
    SiftBasis,
    TargetTriple,
    attack_output,
    control_frame,
    error_probability,
    outcome_probabilities,
    probe_state,
    renyi_closed_form,
    renyi_information,
    sift_joint_distribution,
    target_triple,
)
from .qmath import (
    StateVec2,
    StateVec4,
    Unitary4,
    apply_unitary,
    overlap_prob,
    states_close,
    tensor,
)

__all__ = [
    "Bb84State",
    "CNOT",
    "CountsFileError",
    "CountsRecord",
    "ErrorModelParams",
    "FitOptions",
    "FitResult",
    "JointDistribution",
    "OUTCOME_ORDER",
    "OutcomeProbs",
    "ProbeConfig",
    "SiftBasis",
    "StateVec2",
    "StateVec4",
    "TargetTriple",
    "Unitary4",
    "apply_unitary",
    "attack_output",
    "bob_analyzer",
    "control_frame",
    "error_probability",
    "estimate_probabilities",
    "fit_parameters",
    "load_reference_counts",
    "measured_renyi",
    "model_renyi",
    "model_sifted_error_rate",
    "noise_free_counts",
    "nonideal_alice_state",
    "nonideal_pcnot",
    "nonideal_probe_state",
    "outcome_probabilities",
    "overlap_prob",
    "predict_outcome_probs",
    "probe_state",
    "read_counts_file",
    "reference_counts_path",
    "renyi_closed_form",
    "renyi_information",
    "sift_joint_distribution",
    "sifted_error_rate",
    "simulate_counts",
    "states_close",
    "target_triple",
    "tensor",
    "write_counts_file",
]

__version__ = "0.1.0"
