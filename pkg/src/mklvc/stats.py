"""Frame statistics: Gaussian fits, per-dimension deviations, variance-sorted
dimension permutations, and the embedding-sequence container they operate on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InsufficientSamplesError, ValidationError


def _as_float64_matrix(frames) -> np.ndarray:
    arr = np.asarray(frames, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"frames must be a 2-D (frames x dims) array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"frames must be at least 1x1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("frames contain NaN or Inf")
    return arr


@dataclass(frozen=True)
class EmbeddingSequence:
    """A T x D matrix of per-frame encoder embeddings.

    Stored as read-only float64 regardless of on-disk precision; frame_rate_hz
    is informational (WavLM-style encoders emit ~50 frames/s).
    """

    frames: np.ndarray
    frame_rate_hz: float = 50.0

    def __post_init__(self):
        arr = _as_float64_matrix(self.frames)
        arr = np.array(arr, order="C", copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)
        if not self.frame_rate_hz > 0:
            raise ValidationError("frame_rate_hz must be positive")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and covariance matrix of one dimension block."""

    mean: np.ndarray
    cov: np.ndarray
    sample_count: int

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64, copy=True).reshape(-1)
        cov = np.array(self.cov, dtype=np.float64, copy=True)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"cov shape {cov.shape} does not match mean length {mean.size}"
            )
        if not np.array_equal(cov, cov.T):
            cov = 0.5 * (cov + cov.T)
        if np.any(np.diag(cov) < 0):
            raise ValidationError("covariance has negative diagonal entries")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if self.sample_count < 1:
            raise ValidationError("sample_count must be positive")

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class SortProfile:
    """Per-dimension stds and the descending-std permutation derived from them.

    source_tag names where the statistics came from (a corpus stats file or
    the source utterance itself) so conversions stay reproducible.
    """

    std: np.ndarray
    permutation: np.ndarray
    source_tag: str = ""

    def __post_init__(self):
        std = np.array(self.std, dtype=np.float64, copy=True).reshape(-1)
        perm = np.array(self.permutation, dtype=np.int64, copy=True).reshape(-1)
        if std.size != perm.size:
            raise DimensionMismatchError(
                f"std length {std.size} != permutation length {perm.size}"
            )
        if not np.all(np.isfinite(std)) or np.any(std < 0):
            raise ValidationError("std entries must be finite and >= 0")
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValidationError("permutation is not a bijection on 0..D-1")
        ordered = std[perm]
        if np.any(ordered[:-1] < ordered[1:]):
            raise ValidationError("permutation does not order std in descending order")
        std.setflags(write=False)
        perm.setflags(write=False)
        object.__setattr__(self, "std", std)
        object.__setattr__(self, "permutation", perm)

    @property
    def dim(self) -> int:
        return self.std.size


def _frames_of(x) -> np.ndarray:
    if isinstance(x, EmbeddingSequence):
        return x.frames
    return _as_float64_matrix(x)


def fit_gaussian(x) -> GaussianStats:
    """Maximum-likelihood Gaussian fit (mean and 1/T covariance) of the frames.

    Accepts an EmbeddingSequence or any T x K matrix (e.g. a block of selected
    dimensions). Requires T >= 2.
    """
    frames = _frames_of(x)
    t = frames.shape[0]
    if t < 2:
        raise InsufficientSamplesError(f"need at least 2 frames to fit a Gaussian, got {t}")
    mean = frames.mean(axis=0)
    centered = frames - mean
    cov = (centered.T @ centered) / t
    return GaussianStats(mean=mean, cov=cov, sample_count=t)


def per_dim_std(x) -> np.ndarray:
    """Population (1/T) standard deviation of each dimension over time."""
    frames = _frames_of(x)
    t = frames.shape[0]
    if t < 2:
        raise InsufficientSamplesError(f"need at least 2 frames for per-dimension std, got {t}")
    centered = frames - frames.mean(axis=0)
    return np.sqrt(np.einsum("ti,ti->i", centered, centered) / t)


def sort_profile(std, source_tag: str = "") -> SortProfile:
    """Build the descending-std dimension permutation.

    Ties are broken by ascending original index, which keeps the ordering
    deterministic across platforms.
    """
    std = np.asarray(std, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(std)) or np.any(std < 0):
        raise ValidationError("std entries must be finite and >= 0")
    perm = np.argsort(-std, kind="stable")
    return SortProfile(std=std, permutation=perm, source_tag=source_tag)


def permute_dims(x: EmbeddingSequence, perm, inverse: bool = False) -> EmbeddingSequence:
    """Reorder embedding dimensions by ``perm``; ``inverse=True`` undoes it.

    Pure reindexing, so a forward/inverse round trip is bit-exact.
    """
    perm = np.asarray(perm, dtype=np.int64).reshape(-1)
    if perm.size != x.dim:
        raise DimensionMismatchError(
            f"permutation length {perm.size} does not match dimension {x.dim}"
        )
    if inverse:
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        perm = inv
    return EmbeddingSequence(frames=x.frames[:, perm], frame_rate_hz=x.frame_rate_hz)
