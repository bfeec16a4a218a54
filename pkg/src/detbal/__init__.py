"""Detailed-balance analysis for finite-dimensional quantum channels."""

from .errors import HypothesisFailure, SpecFileError
from .matcore import (
    MAX_DIM,
    RANK_TOL,
    RESIDUAL_TOL,
    dag,
    matrix_power_analytic,
    orthonormal_completion,
    partial_trace,
    projector_onto_span,
    spectral_norm,
    tensor_product,
)
from .channel import (
    Channel,
    KrausSet,
    Word,
    apply,
    channel_choi,
    channel_distance,
    classify,
    dilation_from_kraus,
    kraus_from_dilation,
    minimal_kraus,
    power_kraus,
)
from .stinespring import (
    SubproductSystem,
    build_subproduct,
    check_Q_compatibility,
    check_subproduct_inclusion,
    verify_power_dilation,
)
from .equilibrium import (
    CorrelationData,
    balance_scalar,
    check_phi_symmetric,
    check_state,
    correlation_matrix,
    kms_condition_residual,
    kms_state_eval,
    modular_flow,
    orthogonalize_kraus,
    zero_mean_check,
)
from .reversal import (
    ClassicalChain,
    classical_reverse,
    crooks_check,
    crooks_dual,
    detailed_balance_verdict,
    q_sphere_residual,
    reversed_kraus,
    reversed_unitary,
    time_reversal_invariance,
)
from .qgroup import (
    au_relations_check,
    bu_relations_check,
    first_row_q_sphere,
    invariant_state,
    suq2_generators,
)

__version__ = "0.1.0"

__all__ = [
    "HypothesisFailure", "SpecFileError",
    "MAX_DIM", "RANK_TOL", "RESIDUAL_TOL",
    "dag", "spectral_norm", "tensor_product", "partial_trace",
    "matrix_power_analytic", "orthonormal_completion", "projector_onto_span",
    "Channel", "KrausSet", "Word", "apply", "classify",
    "kraus_from_dilation", "dilation_from_kraus", "minimal_kraus",
    "channel_choi", "channel_distance", "power_kraus",
    "SubproductSystem", "build_subproduct", "check_subproduct_inclusion",
    "verify_power_dilation", "check_Q_compatibility",
    "CorrelationData", "check_state", "correlation_matrix", "balance_scalar",
    "orthogonalize_kraus", "zero_mean_check", "check_phi_symmetric",
    "modular_flow", "kms_state_eval", "kms_condition_residual",
    "q_sphere_residual", "reversed_unitary", "reversed_kraus",
    "crooks_dual", "crooks_check", "detailed_balance_verdict",
    "time_reversal_invariance", "ClassicalChain", "classical_reverse",
    "au_relations_check", "bu_relations_check", "invariant_state",
    "suq2_generators", "first_row_q_sphere",
]
