"""Exact replica-commutant toolkit for matchgate and Clifford-matchgate circuits."""

from .applications import (
    CovarianceMatrix,
    MCEstimate,
    StateVector,
    covariance_matrix,
    definetti_bound,
    definetti_ratio,
    design_gap,
    faf,
    gaussianity_residual,
    matchgate_twirl,
    phi0,
    phi_w,
    q4_operator,
    shadow_inverse_channel,
    sre_annealed,
    state_frame_potential,
    unitary_frame_potential,
    vacuum_projector,
    vacuum_trace,
)
from .bridge import (
    bridge_operator,
    casimir,
    commutant_dim,
    enumerate_weights,
    replica_majorana,
    weyl_dim,
)
from .gt import gt_basis, sector_projector
from .pairing import PairingConfig, admissible_configs, pairing_operator
from .patterns import (
    PatternOccupancy,
    cm_dim,
    cm_twirl,
    cm_twirl_exhaustive,
    cm_vacuum_moment,
    enumerate_occupancies,
    pattern_operator,
)
from .strings import (
    OperatorExpansion,
    RationalComplex,
    SignedPermutation,
    apply_orthogonal,
    apply_signed_permutation,
    hs_inner,
    hs_norm,
    identity_operator,
    op_adjoint,
    op_multiply,
    op_tensor_power,
    op_to_float,
    op_trace,
    parity_operator,
    single_string,
    string_product,
    vacuum_state_operator,
)

__all__ = [
    "CovarianceMatrix",
    "MCEstimate",
    "OperatorExpansion",
    "PairingConfig",
    "PatternOccupancy",
    "RationalComplex",
    "SignedPermutation",
    "StateVector",
    "admissible_configs",
    "apply_orthogonal",
    "apply_signed_permutation",
    "bridge_operator",
    "casimir",
    "cm_dim",
    "cm_twirl",
    "cm_twirl_exhaustive",
    "cm_vacuum_moment",
    "commutant_dim",
    "covariance_matrix",
    "definetti_bound",
    "definetti_ratio",
    "design_gap",
    "enumerate_occupancies",
    "enumerate_weights",
    "faf",
    "gaussianity_residual",
    "gt_basis",
    "hs_inner",
    "hs_norm",
    "identity_operator",
    "matchgate_twirl",
    "op_adjoint",
    "op_multiply",
    "op_tensor_power",
    "op_to_float",
    "op_trace",
    "pairing_operator",
    "parity_operator",
    "pattern_operator",
    "phi0",
    "phi_w",
    "q4_operator",
    "replica_majorana",
    "sector_projector",
    "shadow_inverse_channel",
    "single_string",
    "sre_annealed",
    "state_frame_potential",
    "string_product",
    "unitary_frame_potential",
    "vacuum_projector",
    "vacuum_state_operator",
    "vacuum_trace",
    "weyl_dim",
]

__version__ = "0.1.0"
