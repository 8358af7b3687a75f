"""Dense symmetric positive definite matrix primitives.

Every solver in the package funnels factorizations, inversions,
log-determinants and quadratic forms through this module so tolerance
and error semantics stay uniform. Matrices are plain float64 numpy
arrays treated as immutable; all routines return fresh arrays.

Factorizations are backed by LAPACK (via scipy) with a scale-relative
pivot acceptance threshold layered on top: a matrix counts as positive
definite only when every Cholesky pivot exceeds
``SPD_TOLERANCE_SCALE * max(diagonal)``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, NotPositiveDefiniteError

SPD_TOLERANCE_SCALE = 1e-12

# Tolerated relative asymmetry in user-supplied "symmetric" input; anything
# produced internally is exactly symmetric.
_SYMMETRY_RTOL = 1e-8


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return the exactly symmetric average (m + m.T) / 2."""
    m = np.asarray(m, dtype=float)
    return (m + m.T) / 2.0


def as_spd_input(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate a square, finite, (near-)symmetric matrix and symmetrize it.

    Raises DimensionMismatchError for non-square input and ValueError for
    asymmetry beyond round-off or non-finite entries.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    scale = np.max(np.abs(m)) if m.size else 0.0
    if np.max(np.abs(m - m.T), initial=0.0) > _SYMMETRY_RTOL * (1.0 + scale):
        raise ValueError(f"{name} is not symmetric")
    return symmetrize(m)


def as_vector(v: np.ndarray, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Validate a finite 1-d array, optionally of a required dimension."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-dimensional, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def as_dataset(data: np.ndarray) -> np.ndarray:
    """Validate an n-by-p data matrix (rows are observations)."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise DimensionMismatchError(f"dataset must be 2-dimensional, got shape {data.shape}")
    n, p = data.shape
    if n < 1 or p < 1:
        raise DimensionMismatchError(f"dataset must be at least 1x1, got {n}x{p}")
    if not np.all(np.isfinite(data)):
        raise ValueError("dataset contains non-finite entries")
    return data


def spd_tolerance(m: np.ndarray) -> float:
    """Pivot acceptance threshold: scale-relative to the largest diagonal entry."""
    return SPD_TOLERANCE_SCALE * float(np.max(np.diag(m), initial=0.0))


def cholesky(m: np.ndarray) -> np.ndarray:
    """Lower-triangular factor L with L @ L.T == m.

    Raises NotPositiveDefiniteError when the factorization fails or any
    pivot (squared diagonal of L) falls at or below ``spd_tolerance(m)``.
    """
    m = as_spd_input(m)
    tol = spd_tolerance(m)
    try:
        lower = scipy.linalg.cholesky(m, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"Cholesky factorization failed: {exc}") from exc
    if np.min(np.diag(lower)) ** 2 <= tol:
        raise NotPositiveDefiniteError(
            f"Cholesky pivot at or below tolerance {tol:.3e}; matrix is numerically singular"
        )
    return lower


def is_spd(m: np.ndarray) -> bool:
    """True when ``m`` passes the Cholesky pivot test."""
    try:
        cholesky(m)
    except (NotPositiveDefiniteError, ValueError, DimensionMismatchError):
        return False
    return True


def log_det(m: np.ndarray) -> float:
    """log det of an SPD matrix, computed as twice the log-trace of its factor."""
    lower = cholesky(m)
    return float(2.0 * np.sum(np.log(np.diag(lower))))


def spd_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of an SPD matrix via Cholesky; result is exactly symmetric."""
    lower = cholesky(m)
    inv = scipy.linalg.cho_solve((lower, True), np.eye(m.shape[0]))
    return symmetrize(inv)


def mahalanobis(y: np.ndarray, mu: np.ndarray, psi: np.ndarray) -> float:
    """Quadratic form (y - mu)' psi^{-1} (y - mu) via triangular solves.

    No explicit inverse is formed; the result is nonnegative by construction.
    """
    psi = as_spd_input(psi, "psi")
    p = psi.shape[0]
    y = as_vector(y, p, "y")
    mu = as_vector(mu, p, "mu")
    lower = cholesky(psi)
    z = scipy.linalg.solve_triangular(lower, y - mu, lower=True)
    return float(z @ z)


def schur_conditional(psi: np.ndarray, targets: tuple[int, int], given) -> float:
    """Conditional-covariance numerator of a target pair given a conditioning set.

    Returns entry (i, j) of the Schur complement
    ``psi[A, A] - psi[A, C] psi[C, C]^{-1} psi[C, A]`` with ``A = (i, j)``,
    which is the quantity whose vanishing certifies that coordinates i and j
    are conditionally uncorrelated given the coordinates in ``given``.

    Parameters
    ----------
    psi : ndarray
        Scale (covariance-like) SPD matrix.
    targets : (int, int)
        Distinct indices i, j, neither of which may appear in ``given``.
    given : iterable of int
        Conditioning index set C; may be empty.
    """
    psi = as_spd_input(psi, "psi")
    p = psi.shape[0]
    i, j = targets
    cond = sorted(set(int(c) for c in given))
    for idx in (i, j, *cond):
        if not 0 <= idx < p:
            raise IndexError(f"index {idx} out of range for dimension {p}")
    if i == j:
        raise DimensionMismatchError("target indices must be distinct")
    if i in cond or j in cond:
        raise DimensionMismatchError("target indices must not appear in the conditioning set")
    if not cond:
        return float(psi[i, j])
    cc = psi[np.ix_(cond, cond)]
    try:
        lower = cholesky(cc)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(f"conditioning block is not positive definite: {exc}") from exc
    ca_i = scipy.linalg.cho_solve((lower, True), psi[cond, i])
    return float(psi[i, j] - psi[j, cond] @ ca_i)


def partition_drop(m: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Split off row/column ``j``: (matrix without j, column j without m[j, j], m[j, j])."""
    m = np.asarray(m, dtype=float)
    p = m.shape[0]
    if m.ndim != 2 or m.shape[1] != p:
        raise DimensionMismatchError(f"matrix must be square, got shape {m.shape}")
    if not 0 <= j < p:
        raise IndexError(f"index {j} out of range for dimension {p}")
    keep = np.arange(p) != j
    block = m[np.ix_(keep, keep)].copy()
    column = m[keep, j].copy()
    return block, column, float(m[j, j])
