"""Closed-form Gaussian optimal transport and its factorized block form.

The affine map between two Gaussians N(mu1, S1) -> N(mu2, S2) that is optimal
under quadratic cost is

    T(x) = mu2 + S1^{-1/2} (S1^{1/2} S2 S1^{1/2})^{1/2} S1^{-1/2} (x - mu1)

written here as A x + b with A = S1^{-1/2} (S1^{1/2} S2 S1^{1/2})^{1/2} S1^{-1/2}
and b = mu2 - A mu1. A is symmetric PSD, and the pushforward is exact:
A S1 A.T == S2.

The factorized form sorts embedding dimensions by a SortProfile, partitions
them into contiguous blocks of width ``block_dim``, and fits one such map per
block. Cross-block covariance is deliberately ignored (the operating
assumption is that sorted covariances are approximately block-diagonal; the
diagnostics module quantifies how well that holds rather than this module
compensating for it).

Also provides the closed-form Gaussian (Bures) Wasserstein-2 distance

    W2^2 = ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2})

used as an internal oracle and by the diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidBlockDimError,
    NumericalError,
    SingularMatrixError,
    ValidationError,
)
from .linalg import sym_eig, sym_sqrt, symmetrize
from .stats import EmbeddingSequence, GaussianStats, SortProfile, fit_gaussian

# Construction-time tolerance for the symmetry of fitted maps.
MAP_SYMMETRY_ATOL = 1e-8
# PSD floor is looser: maps reloaded from float32 container files carry
# storage rounding around 1e-7 relative; freshly fitted maps sit near 1e-12.
MAP_PSD_RTOL = 1e-6

# Default ridge, relative to the mean diagonal of the source block covariance,
# used when the caller does not pass one. Short references (a few hundred
# frames) give near-singular block covariances at block_dim >= 64.
DEFAULT_RELATIVE_RIDGE = 1e-6


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + offset with a symmetric PSD matrix."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=np.float64, copy=True)
        b = np.array(self.offset, dtype=np.float64, copy=True).reshape(-1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {a.shape}")
        if a.shape[0] != b.size:
            raise DimensionMismatchError(
                f"matrix dim {a.shape[0]} does not match offset length {b.size}"
            )
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.max(np.abs(a - a.T)) > MAP_SYMMETRY_ATOL * scale:
            raise NumericalError("affine map matrix is not symmetric within tolerance")
        a = 0.5 * (a + a.T)
        min_eig = float(np.linalg.eigvalsh(a)[0])
        if min_eig < -MAP_PSD_RTOL * scale:
            raise NumericalError(
                f"affine map matrix is not PSD within tolerance (min eigenvalue {min_eig:.3e})"
            )
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "offset", b)

    @property
    def dim(self) -> int:
        return self.offset.size

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Apply to an (n, dim) array of row vectors."""
        points = np.asarray(points, dtype=np.float64)
        if points.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"points have dimension {points.shape[-1]}, map expects {self.dim}"
            )
        return points @ self.matrix.T + self.offset


@dataclass(frozen=True)
class FactorizedMap:
    """Direct product of per-block affine maps in sorted-dimension space."""

    block_dim: int
    permutation: np.ndarray
    blocks: tuple
    source_means: np.ndarray
    target_means: np.ndarray

    def __post_init__(self):
        perm = np.array(self.permutation, dtype=np.int64, copy=True).reshape(-1)
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValidationError("permutation is not a bijection")
        dim = perm.size
        if self.block_dim < 1 or dim % self.block_dim != 0:
            raise InvalidBlockDimError(
                f"block_dim {self.block_dim} must divide dimension {dim}"
            )
        blocks = tuple(self.blocks)
        if len(blocks) != dim // self.block_dim:
            raise ValidationError(
                f"expected {dim // self.block_dim} blocks, got {len(blocks)}"
            )
        for i, blk in enumerate(blocks):
            if not isinstance(blk, AffineMap) or blk.dim != self.block_dim:
                raise ValidationError(f"block {i} is not a {self.block_dim}-dim AffineMap")
        src_means = np.array(self.source_means, dtype=np.float64, copy=True).reshape(-1)
        tgt_means = np.array(self.target_means, dtype=np.float64, copy=True).reshape(-1)
        if src_means.size != dim or tgt_means.size != dim:
            raise DimensionMismatchError("mean vectors must have the full dimension")
        perm.setflags(write=False)
        src_means.setflags(write=False)
        tgt_means.setflags(write=False)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "source_means", src_means)
        object.__setattr__(self, "target_means", tgt_means)

    @property
    def dim(self) -> int:
        return self.permutation.size

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def mkl_fit(src: GaussianStats, tgt: GaussianStats, ridge: float = 0.0) -> AffineMap:
    """Fit the optimal quadratic-cost affine map pushing src onto tgt.

    ``ridge`` (>= 0) is added to both covariance diagonals before the
    computation. With ridge == 0 the pushforward is exact; a singular source
    covariance then raises SingularMatrixError.
    """
    if src.dim != tgt.dim:
        raise DimensionMismatchError(
            f"source dim {src.dim} != target dim {tgt.dim}"
        )
    if ridge < 0:
        raise ValidationError("ridge must be >= 0")
    cov1 = src.cov + ridge * np.eye(src.dim)
    cov2 = tgt.cov + ridge * np.eye(tgt.dim)

    # One decomposition of cov1 yields both the square root and its inverse.
    w, q = sym_eig(cov1)
    w = np.maximum(w, 0.0)
    top = float(w[-1]) if w.size else 0.0
    if top <= 0.0 or w[0] <= 1e-12 * top:
        raise SingularMatrixError(
            f"source covariance is numerically singular (eigenvalues in [{w[0]:.3e}, {top:.3e}]); "
            "use a positive ridge"
        )
    sqrt1 = symmetrize((q * np.sqrt(w)) @ q.T)
    inv_sqrt1 = symmetrize((q * (1.0 / np.sqrt(w))) @ q.T)

    middle = sym_sqrt(symmetrize(sqrt1 @ cov2 @ sqrt1))
    a = symmetrize(inv_sqrt1 @ middle @ inv_sqrt1)
    b = tgt.mean - a @ src.mean
    return AffineMap(matrix=a, offset=b)


def _default_ridge(block_cov: np.ndarray) -> float:
    return DEFAULT_RELATIVE_RIDGE * float(np.mean(np.diag(block_cov)))


def factorize_fit(
    src_frames: EmbeddingSequence,
    ref_frames: EmbeddingSequence,
    block_dim: int,
    profile: SortProfile,
    ridge: float | None = None,
) -> FactorizedMap:
    """Fit one affine transport map per contiguous block of sorted dimensions.

    Frames are permuted by ``profile.permutation`` (descending std), split
    into D / block_dim blocks, and a Gaussian is fitted per block for the
    source and the reference; each pair is passed to ``mkl_fit``.

    ``ridge=None`` applies the default per-block relative ridge; pass 0.0 to
    disable regularization entirely.
    """
    dim = src_frames.dim
    if ref_frames.dim != dim:
        raise DimensionMismatchError(
            f"source dim {dim} != reference dim {ref_frames.dim}"
        )
    if profile.dim != dim:
        raise DimensionMismatchError(
            f"profile dim {profile.dim} does not match embedding dim {dim}"
        )
    if block_dim < 1 or dim % block_dim != 0:
        raise InvalidBlockDimError(f"block_dim {block_dim} must divide dimension {dim}")
    min_frames = block_dim + 1
    if src_frames.n_frames < min_frames or ref_frames.n_frames < min_frames:
        raise InsufficientSamplesError(
            f"need at least {min_frames} frames per sequence for block_dim {block_dim}, "
            f"got source T={src_frames.n_frames}, reference T={ref_frames.n_frames}"
        )

    src_sorted = src_frames.frames[:, profile.permutation]
    ref_sorted = ref_frames.frames[:, profile.permutation]

    blocks = []
    src_means = np.empty(dim)
    tgt_means = np.empty(dim)
    for i in range(dim // block_dim):
        lo, hi = i * block_dim, (i + 1) * block_dim
        src_stats = fit_gaussian(src_sorted[:, lo:hi])
        ref_stats = fit_gaussian(ref_sorted[:, lo:hi])
        block_ridge = _default_ridge(src_stats.cov) if ridge is None else ridge
        try:
            blocks.append(mkl_fit(src_stats, ref_stats, ridge=block_ridge))
        except SingularMatrixError as exc:
            raise SingularMatrixError(str(exc), block_index=i) from exc
        src_means[lo:hi] = src_stats.mean
        tgt_means[lo:hi] = ref_stats.mean

    return FactorizedMap(
        block_dim=block_dim,
        permutation=profile.permutation,
        blocks=tuple(blocks),
        source_means=src_means,
        target_means=tgt_means,
    )


def factorize_apply(fmap: FactorizedMap, x: EmbeddingSequence) -> EmbeddingSequence:
    """Apply the factorized map frame-wise; time order is untouched."""
    if x.dim != fmap.dim:
        raise DimensionMismatchError(
            f"sequence dim {x.dim} does not match map dim {fmap.dim}"
        )
    sorted_frames = x.frames[:, fmap.permutation]
    out = np.empty_like(sorted_frames)
    k = fmap.block_dim
    for i, blk in enumerate(fmap.blocks):
        out[:, i * k : (i + 1) * k] = blk.apply(sorted_frames[:, i * k : (i + 1) * k])
    inv = np.empty_like(fmap.permutation)
    inv[fmap.permutation] = np.arange(fmap.dim)
    return EmbeddingSequence(frames=out[:, inv], frame_rate_hz=x.frame_rate_hz)


def gaussian_w2(a: GaussianStats, b: GaussianStats) -> float:
    """Closed-form Wasserstein-2 distance between two Gaussians."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    sqrt_a = sym_sqrt(a.cov)
    cross = symmetrize(sqrt_a @ b.cov @ sqrt_a)
    w, _ = sym_eig(cross)
    trace_term = float(np.trace(a.cov) + np.trace(b.cov) - 2.0 * np.sum(np.sqrt(np.maximum(w, 0.0))))
    mean_term = float(np.sum((a.mean - b.mean) ** 2))
    return float(np.sqrt(max(mean_term + trace_term, 0.0)))
