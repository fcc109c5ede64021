"""Symmetric-matrix primitives: eigendecomposition, square root, inverse square root.

Everything here operates on plain float64 ndarrays. Matrices are symmetrized
on entry (covariance estimates arrive symmetric only up to rounding) and all
results are explicitly re-symmetrized, so downstream code can rely on exact
``M == M.T``. Eigendecomposition is used instead of Newton-type iterations:
at the block sizes that occur in practice (K <= 64, D <= 1024) a single
``eigh`` call is cheap and has no tuning knobs.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    EigenDecompositionError,
    NotPositiveSemidefiniteError,
    SingularMatrixError,
    ValidationError,
)

# Eigenvalues more negative than -NEG_EIG_RTOL * max|eig| indicate a genuinely
# indefinite matrix rather than floating-point noise on a PSD one.
NEG_EIG_RTOL = 1e-6

# Relative cutoff below which an eigenvalue counts as zero for inversion.
SINGULAR_RTOL = 1e-12


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return 0.5 * (M + M.T) as a float64 array."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    return 0.5 * (m + m.T)


def sym_eig(s: np.ndarray):
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, orthonormal eigenvector columns) such
    that ``Q @ diag(w) @ Q.T`` reconstructs the symmetrized input.
    """
    s = symmetrize(s)
    try:
        w, q = np.linalg.eigh(s)
    except np.linalg.LinAlgError as exc:
        raise EigenDecompositionError(s.shape[0]) from exc
    return w, q


def _clamped_eig(s: np.ndarray, eig_floor: float):
    """eigh + negative-eigenvalue policy shared by the square roots.

    Noise-level negatives (within NEG_EIG_RTOL of the spectral radius) are
    clamped up to ``eig_floor``; anything larger is a real indefiniteness
    and raises.
    """
    w, q = sym_eig(s)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if scale > 0.0 and w[0] < -NEG_EIG_RTOL * scale:
        raise NotPositiveSemidefiniteError(
            f"matrix is not PSD: min eigenvalue {w[0]:.3e} vs max |eigenvalue| {scale:.3e}"
        )
    return np.maximum(w, eig_floor), q


def sym_sqrt(s: np.ndarray, eig_floor: float = 0.0) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues are floored at ``eig_floor`` (default 0) before the square
    root, which absorbs the slightly negative eigenvalues that sample
    covariances of short sequences produce.
    """
    if eig_floor < 0:
        raise ValidationError("eig_floor must be >= 0")
    w, q = _clamped_eig(s, eig_floor)
    return symmetrize((q * np.sqrt(w)) @ q.T)


def sym_inv_sqrt(s: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Symmetric inverse square root, Q diag(1/sqrt(w + ridge)) Q.T.

    Eigenvalues are clamped at 0 first. With ridge == 0, eigenvalues at or
    below SINGULAR_RTOL of the spectral radius make the matrix numerically
    singular and raise rather than returning infinities.
    """
    if ridge < 0:
        raise ValidationError("ridge must be >= 0")
    w, q = _clamped_eig(s, 0.0)
    scale = float(w[-1]) if w.size else 0.0
    if ridge == 0.0:
        if scale <= 0.0:
            raise SingularMatrixError("matrix has no positive eigenvalues")
        if w[0] <= SINGULAR_RTOL * scale:
            raise SingularMatrixError(
                f"matrix is numerically singular: min eigenvalue {w[0]:.3e} vs max {scale:.3e}"
            )
    return symmetrize((q * (1.0 / np.sqrt(w + ridge))) @ q.T)
