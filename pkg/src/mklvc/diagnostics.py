"""Empirical checks of the structural assumptions behind factorized transport:
point-cloud Wasserstein-2 via exact assignment, the per-block distance-to-
Gaussian profile, and the sorted std spectrum.

The W2 estimator solves the assignment problem exactly (no entropic smoothing:
regularization bias would contaminate a distance that is meant to approach
zero for Gaussian data). Unequal-size point sets are subsampled to a common
size rather than solved as unbalanced transport, keeping the estimate exact
and the scale identity w2(a*x, a*y) == a * w2(x, y) intact. Every stochastic
step takes an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .errors import InvalidBlockDimError, ValidationError
from .stats import EmbeddingSequence, SortProfile, fit_gaussian, per_dim_std


@dataclass(frozen=True)
class GaussianityProfile:
    """Per-block W2-to-fitted-Gaussian, divided by the block dimension.

    block_start_indices are in sorted-dimension space. sample_size and seed
    record how each value was estimated (points per side of the exact
    assignment, and the RNG seed), since the numbers are estimator-dependent.
    """

    block_dim: int
    block_start_indices: tuple
    w2_values: tuple
    sample_size: int
    seed: int

    def __post_init__(self):
        if len(self.block_start_indices) != len(self.w2_values):
            raise ValidationError("start indices and values must have equal length")
        if any(v < 0 for v in self.w2_values):
            raise ValidationError("w2 values must be >= 0")


def _subsample(points: np.ndarray, size: int, seed: int) -> np.ndarray:
    """Seeded without-replacement subsample, keyed on the set's own length so
    that swapping the two arguments of empirical_w2 picks identical subsets."""
    n = points.shape[0]
    if size >= n:
        return points
    rng = np.random.default_rng([seed, n])
    idx = np.sort(rng.choice(n, size=size, replace=False))
    return points[idx]


def empirical_w2(x, y, subsample: int = 512, seed: int = 0) -> float:
    """Exact-assignment Wasserstein-2 between two point clouds.

    Both sets are subsampled (without replacement, seeded) to
    s = min(n, m, subsample) points; returns sqrt(assignment cost / s) under
    squared-Euclidean ground cost. Symmetric in its arguments bit-for-bit:
    the pair is put into a canonical order before solving.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2:
        raise ValidationError("point sets must be 2-D arrays")
    if x.shape[0] < 1 or y.shape[0] < 1:
        raise ValidationError("point sets must be non-empty")
    if x.shape[1] != y.shape[1]:
        raise ValidationError(f"point dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if subsample < 1:
        raise ValidationError("subsample must be >= 1")

    s = min(x.shape[0], y.shape[0], subsample)
    xs = _subsample(x, s, seed)
    ys = _subsample(y, s, seed)
    if ys.tobytes() < xs.tobytes():
        xs, ys = ys, xs
    sq = cdist(xs, ys, "sqeuclidean")
    rows, cols = linear_sum_assignment(sq)
    return float(np.sqrt(sq[rows, cols].sum() / s))


def gaussianity_profile(
    x: EmbeddingSequence,
    block_dim: int,
    profile: SortProfile,
    subsample: int = 512,
    mc_samples: int = 512,
    seed: int = 0,
    stride: int = 8,
) -> GaussianityProfile:
    """Distance-to-Gaussian per block of sorted dimensions.

    For each window of ``block_dim`` sorted dimensions (start indices at the
    given stride): fit a Gaussian to the block's frames, draw mc_samples from
    it, and report empirical_w2(frames, synthetic) / block_dim.
    """
    d = x.dim
    if profile.dim != d:
        raise ValidationError(f"profile dim {profile.dim} does not match embeddings dim {d}")
    if block_dim < 1 or d % block_dim != 0:
        raise InvalidBlockDimError(f"block_dim {block_dim} must divide dimension {d}")
    if x.n_frames < block_dim + 1:
        raise ValidationError(
            f"need at least {block_dim + 1} frames for block_dim {block_dim}, got {x.n_frames}"
        )
    if stride < 1:
        raise ValidationError("stride must be >= 1")
    if mc_samples < 1:
        raise ValidationError("mc_samples must be >= 1")

    sorted_frames = x.frames[:, profile.permutation]
    rng = np.random.default_rng(seed)
    starts = []
    values = []
    for start in range(0, d - block_dim + 1, stride):
        block = sorted_frames[:, start : start + block_dim]
        stats = fit_gaussian(block)
        synthetic = rng.multivariate_normal(
            stats.mean, stats.cov, size=mc_samples, method="svd", check_valid="ignore"
        )
        starts.append(start)
        values.append(empirical_w2(block, synthetic, subsample=subsample, seed=seed) / block_dim)
    return GaussianityProfile(
        block_dim=block_dim,
        block_start_indices=tuple(starts),
        w2_values=tuple(values),
        sample_size=min(x.n_frames, mc_samples, subsample),
        seed=seed,
    )


def std_spectrum(x: EmbeddingSequence) -> np.ndarray:
    """Per-dimension stds sorted descending (rank vs value, for log-log plots)."""
    return np.sort(per_dim_std(x))[::-1]
