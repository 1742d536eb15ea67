"""Noiseless-subsystem verification and recovery synthesis for Kraus channels.

Decides, for a channel given as Kraus operators and a Hilbert-space
decomposition H = (H^A tensor H^B) + C_perp, whether the A factor is
protected for inputs confined to a B1 subspace of B; cross-checks the
algebraic conditions by brute force; and constructs recovery channels
from the correctability coefficients.
"""

from .hilbert import (
    BlockProjectors,
    SpaceDecomposition,
    a_block,
    b1_column_indices,
    basis_injection,
    block_projectors,
    c_block,
    embed_c_block,
    fold_to_b1,
    hermitian_basis,
    projector_pkl,
)
from .states import (
    CRestriction,
    DensityOperator,
    FactorResult,
    Subspace,
    factor_product,
    partial_trace_A,
    partial_trace_B,
    random_density,
    restrict_to_C,
    support,
    tensor,
)
from .channels import (
    ChannelOnSpace,
    CPMap,
    CptpCheck,
    KrausChannel,
    apply,
    build_eta1,
    build_eta2,
    compose,
    demo_channel,
    gamma_map,
    identity_channel,
    max_apply_difference,
    random_ampliate_channel,
    random_channel,
    reindex_channel,
    validate_cptp,
)
from .conditions import (
    ConditionReport,
    OracleReport,
    QuadrupleReport,
    SupportCase,
    Witness,
    bruteforce_noiseless_oracle,
    check_ampliate_noiseless,
    check_correctable,
    check_normal_noiseless,
    check_quadruple,
    classify_support_case,
)
from .recovery import (
    CorrectabilityError,
    GramMatrix,
    RankProfile,
    build_gram,
    rank_profile,
    recovery_isometries,
    synthesize_recovery,
)

__version__ = "0.1.0"

__all__ = [
    "SpaceDecomposition",
    "BlockProjectors",
    "projector_pkl",
    "block_projectors",
    "a_block",
    "basis_injection",
    "b1_column_indices",
    "embed_c_block",
    "c_block",
    "hermitian_basis",
    "fold_to_b1",
    "DensityOperator",
    "Subspace",
    "CRestriction",
    "FactorResult",
    "support",
    "tensor",
    "partial_trace_A",
    "partial_trace_B",
    "restrict_to_C",
    "factor_product",
    "random_density",
    "CPMap",
    "KrausChannel",
    "CptpCheck",
    "ChannelOnSpace",
    "validate_cptp",
    "apply",
    "compose",
    "identity_channel",
    "gamma_map",
    "build_eta1",
    "build_eta2",
    "demo_channel",
    "random_channel",
    "random_ampliate_channel",
    "reindex_channel",
    "max_apply_difference",
    "Witness",
    "ConditionReport",
    "QuadrupleReport",
    "OracleReport",
    "SupportCase",
    "check_ampliate_noiseless",
    "check_normal_noiseless",
    "check_correctable",
    "check_quadruple",
    "bruteforce_noiseless_oracle",
    "classify_support_case",
    "GramMatrix",
    "RankProfile",
    "CorrectabilityError",
    "build_gram",
    "rank_profile",
    "recovery_isometries",
    "synthesize_recovery",
    "__version__",
]
