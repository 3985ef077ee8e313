"""Finite-dimensional quantum channels, factorizations through finite
tracial ancillas, unitary correlation matrices and nonlocal correlation
tables, each backed by a numerical check."""

from ._kernels import BACKEND
from .channels import (
    ChoiMatrix,
    QuantumChannel,
    RawMap,
    VerificationReport,
    adjoint_channel,
    apply_channel,
    channel_from_choi,
    choi_of,
    choi_of_map,
    compose,
    identity_channel,
    map_distance,
    transpose_map,
    unitary_channel,
    verify_channel,
)
from .correlations import (
    ThetaCheck,
    UnitaryTuple,
    direct_sum_mix,
    embed_divisible,
    gram_correlation,
    is_theta,
    random_tuple,
    sample_grams,
    schur_bridge,
)
from .errors import *  # noqa: F401,F403
from .factorization import (
    FiniteAncillaSpec,
    FiniteFactorization,
    ObstructionReport,
    StinespringDilation,
    Verdict,
    channel_of_factorization,
    compose_factorizations,
    convex_combine,
    evaluate_factorization,
    recover_eq2,
    split_factorization,
    stinespring,
    two_unitary_factorization,
)
from .games import (
    PVM,
    BellFunctional,
    CommutingStrategy,
    CorrelationTable,
    TensorStrategy,
    bell_value,
    chsh_functional,
    classical_table,
    commuting_table,
    is_synchronous,
    maximize_chsh,
    membership_Cc,
    tensor_table,
)
from .zoo import (
    depolarizing,
    extremality_certificate,
    haar_unitary,
    holevo_werner,
    mixture_of_unitaries,
    schur_channel,
    voiculescu_unitaries,
)

__version__ = "0.1.0"
