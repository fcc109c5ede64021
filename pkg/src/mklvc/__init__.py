"""Factorized linear optimal-transport voice conversion over embedding files.

The numeric core is model-free: it consumes frame-embedding sequences stored
in EMBF container files and produces converted sequences, sort profiles,
fitted maps, diagnostics tables, and evaluation scores.
"""

from .baselines import (
    KnnConfig,
    SinkhornConfig,
    TransportPlan,
    knn_convert,
    pairwise_cost,
    sinkhorn_convert,
    sinkhorn_plan,
)
from .diagnostics import GaussianityProfile, empirical_w2, gaussianity_profile, std_spectrum
from .embfile import (
    read_embeddings,
    read_map,
    read_profile,
    write_embeddings,
    write_map,
    write_profile,
)
from .errors import (
    DimensionMismatchError,
    EmbeddingFileError,
    InsufficientSamplesError,
    InvalidBlockDimError,
    MklvcError,
    NumericalError,
    SingularMatrixError,
    ValidationError,
)
from .linalg import sym_eig, sym_inv_sqrt, sym_sqrt, symmetrize
from .metrics import (
    MethodSummary,
    PairScore,
    ScoreTriple,
    aggregate,
    cer,
    cosine_sim,
    edit_distance,
    score_pair,
    total_score,
    wer,
)
from .stats import (
    EmbeddingSequence,
    GaussianStats,
    SortProfile,
    fit_gaussian,
    per_dim_std,
    permute_dims,
    sort_profile,
)
from .transport import (
    AffineMap,
    FactorizedMap,
    factorize_apply,
    factorize_fit,
    gaussian_w2,
    mkl_fit,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "DimensionMismatchError",
    "EmbeddingFileError",
    "EmbeddingSequence",
    "FactorizedMap",
    "GaussianStats",
    "GaussianityProfile",
    "InsufficientSamplesError",
    "InvalidBlockDimError",
    "KnnConfig",
    "MethodSummary",
    "MklvcError",
    "NumericalError",
    "PairScore",
    "ScoreTriple",
    "SingularMatrixError",
    "SinkhornConfig",
    "SortProfile",
    "TransportPlan",
    "ValidationError",
    "aggregate",
    "cer",
    "cosine_sim",
    "edit_distance",
    "empirical_w2",
    "factorize_apply",
    "factorize_fit",
    "fit_gaussian",
    "gaussian_w2",
    "gaussianity_profile",
    "knn_convert",
    "mkl_fit",
    "pairwise_cost",
    "per_dim_std",
    "permute_dims",
    "read_embeddings",
    "read_map",
    "read_profile",
    "score_pair",
    "sinkhorn_convert",
    "sinkhorn_plan",
    "sort_profile",
    "std_spectrum",
    "sym_eig",
    "sym_inv_sqrt",
    "sym_sqrt",
    "symmetrize",
    "total_score",
    "wer",
    "write_embeddings",
    "write_map",
    "write_profile",
]
