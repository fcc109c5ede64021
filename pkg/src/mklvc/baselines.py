"""Reference converters: kNN regression (with variance-sorted dimension
trimming) and the entropic optimal-transport converter built on a log-domain
Sinkhorn solver with barycentric projection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SinkhornNumericalError, ValidationError
from .stats import EmbeddingSequence, SortProfile


def _logsumexp(x: np.ndarray, axis: int) -> np.ndarray:
    """Stabilized log-sum-exp; hand-rolled to keep the per-sweep overhead low
    on the small matrices Sinkhorn typically sees."""
    mx = np.max(x, axis=axis, keepdims=True)
    mx = np.where(np.isfinite(mx), mx, 0.0)
    out = np.log(np.sum(np.exp(x - mx), axis=axis)) + np.squeeze(mx, axis=axis)
    return out

METRICS = ("cosine", "sqeuclidean")


@dataclass(frozen=True)
class KnnConfig:
    """k nearest reference frames averaged uniformly; distances computed over
    the first n_trim variance-sorted dimensions (n_trim=None means all)."""

    k: int = 4
    n_trim: int | None = None
    metric: str = "cosine"

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if self.n_trim is not None and self.n_trim < 1:
            raise ValidationError("n_trim must be >= 1")
        if self.metric not in METRICS:
            raise ValidationError(f"metric must be one of {METRICS}, got {self.metric!r}")


@dataclass(frozen=True)
class SinkhornConfig:
    epsilon: float = 1e-2
    max_iters: int = 1000
    marginal_tol: float = 1e-6
    metric: str = "cosine"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be > 0")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if not self.marginal_tol > 0:
            raise ValidationError("marginal_tol must be > 0")
        if self.metric not in METRICS:
            raise ValidationError(f"metric must be one of {METRICS}, got {self.metric!r}")


@dataclass(frozen=True)
class TransportPlan:
    """Entropic coupling between source and reference frames.

    ``marginal_error`` is the L1 violation of both marginals at the returned
    iterate; ``converged`` records whether it fell below the tolerance before
    ``iterations`` ran out.
    """

    weights: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray
    converged: bool
    iterations: int
    marginal_error: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if np.any(w < 0):
            raise ValidationError("plan weights must be non-negative")
        object.__setattr__(self, "weights", w)


def _norms(x: np.ndarray) -> np.ndarray:
    # Floor at the smallest normal float so all-zero frames stay finite.
    return np.maximum(np.sqrt(np.einsum("ij,ij->i", x, x)), np.finfo(np.float64).tiny)


def pairwise_cost(a: np.ndarray, b: np.ndarray, metric: str) -> np.ndarray:
    """Dense cost matrix between row sets; cosine distance or squared L2."""
    if metric not in METRICS:
        raise ValidationError(f"metric must be one of {METRICS}, got {metric!r}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if metric == "cosine":
        sims = (a / _norms(a)[:, None]) @ (b / _norms(b)[:, None]).T
        return 1.0 - sims
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    return np.maximum(sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T), 0.0)


def knn_convert(
    src: EmbeddingSequence,
    ref: EmbeddingSequence,
    cfg: KnnConfig,
    profile: SortProfile,
) -> EmbeddingSequence:
    """Replace each source frame by the uniform average of its k nearest
    reference frames.

    Distances use only the first n_trim profile-sorted dimensions; the
    averaged output frames keep all D dimensions. Ties in distance resolve
    toward the lower reference index (stable sort).
    """
    d = src.dim
    if ref.dim != d:
        raise ValidationError(f"source dim {d} != reference dim {ref.dim}")
    if profile.dim != d:
        raise ValidationError(f"profile dim {profile.dim} does not match embeddings dim {d}")
    n_trim = d if cfg.n_trim is None else cfg.n_trim
    if not 1 <= n_trim <= d:
        raise ValidationError(f"n_trim must be in [1, {d}], got {n_trim}")
    if cfg.k > ref.n_frames:
        raise ValidationError(
            f"k={cfg.k} exceeds the {ref.n_frames} available reference frames"
        )

    src_sorted = src.frames[:, profile.permutation]
    ref_sorted = ref.frames[:, profile.permutation]
    cost = pairwise_cost(src_sorted[:, :n_trim], ref_sorted[:, :n_trim], cfg.metric)

    out = np.empty_like(src.frames)
    for i in range(src.n_frames):
        nearest = np.argsort(cost[i], kind="stable")[: cfg.k]
        out[i] = ref.frames[nearest].mean(axis=0)
    return EmbeddingSequence(frames=out, frame_rate_hz=src.frame_rate_hz)


def sinkhorn_plan(cost: np.ndarray, cfg: SinkhornConfig) -> TransportPlan:
    """Solve entropy-regularized OT with uniform marginals, in log domain.

    Alternating potential updates are exact per block, so the dual objective
    ascends monotonically; iteration stops once the L1 violation of both
    marginals drops below cfg.marginal_tol. Non-convergence within
    cfg.max_iters returns the last iterate and emits a warning rather than
    raising.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValidationError("cost must be a 2-D matrix")
    if not np.all(np.isfinite(cost)):
        raise ValidationError("cost entries must be finite")
    n_src, n_ref = cost.shape
    a = np.full(n_src, 1.0 / n_src)
    b = np.full(n_ref, 1.0 / n_ref)
    eps = cfg.epsilon

    def nan_check(arr, it):
        # Finite costs keep the potentials finite; NaN/inf means the kernel
        # overflowed, which more iterations cannot fix.
        if not np.all(np.isfinite(arr)):
            raise SinkhornNumericalError(
                f"Sinkhorn scaling produced NaN at iteration {it}; try a larger epsilon "
                f"(current {eps:g})"
            )

    def finish(f, g, iterations):
        with np.errstate(over="ignore", invalid="ignore"):
            plan = np.exp((f[:, None] + g[None, :] - cost) / eps)
        nan_check(plan, iterations)
        err = float(np.abs(plan.sum(axis=1) - a).sum() + np.abs(plan.sum(axis=0) - b).sum())
        converged = err < cfg.marginal_tol
        if not converged:
            warnings.warn(
                f"Sinkhorn did not converge in {iterations} iterations "
                f"(marginal violation {err:.3e} > tol {cfg.marginal_tol:g})",
                RuntimeWarning,
                stacklevel=3,
            )
        return TransportPlan(
            weights=plan, row_marginal=a, col_marginal=b,
            converged=converged, iterations=iterations, marginal_error=err,
        )

    # After each g update the column marginal is exact by construction, so
    # convergence only needs the row violation; the row logsumexp of the next
    # sweep provides it without materializing the plan every iteration.
    with np.errstate(over="ignore"):
        scaled_cost = cost / eps
    log_a = np.log(a)
    log_b = np.log(b)
    f = np.zeros(n_src)
    g = np.zeros(n_ref)
    it = 0
    for it in range(1, cfg.max_iters + 1):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            lse_rows = _logsumexp(g[None, :] / eps - scaled_cost, axis=1)
            if it > 1:
                row_err = float(np.abs(np.exp(f / eps + lse_rows) - a).sum())
                if row_err < cfg.marginal_tol:
                    return finish(f, g, it - 1)
            f = eps * (log_a - lse_rows)
            g = eps * (log_b - _logsumexp(f[:, None] / eps - scaled_cost, axis=0))
        nan_check(f, it)
        nan_check(g, it)
    return finish(f, g, it)


def sinkhorn_convert(
    src: EmbeddingSequence,
    ref: EmbeddingSequence,
    cfg: SinkhornConfig,
) -> EmbeddingSequence:
    """Entropic-OT conversion: plan over full-dimension costs, then
    row-normalized barycentric projection onto the reference frames."""
    if ref.dim != src.dim:
        raise ValidationError(f"source dim {src.dim} != reference dim {ref.dim}")
    cost = pairwise_cost(src.frames, ref.frames, cfg.metric)
    plan = sinkhorn_plan(cost, cfg)
    weights = plan.weights / plan.weights.sum(axis=1, keepdims=True)
    out = weights @ ref.frames
    return EmbeddingSequence(frames=out, frame_rate_hz=src.frame_rate_hz)
