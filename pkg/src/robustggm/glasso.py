"""Graphical lasso: L1-penalized Gaussian log-likelihood maximization.

Maximizes ``log det(Theta) - tr(S Theta) - rho * sum_{i != j} |theta_ij|``
over positive definite matrices by block coordinate descent: the working
covariance W is updated one row/column at a time, each update solved as a
soft-threshold lasso over the remaining coordinates. The precision matrix
is recovered from the final regression coefficients of each block, so the
exact zeros produced by soft-thresholding survive into ``theta_hat``.

Penalty convention: ``rho`` is the per-entry soft-threshold level, which
makes the maximized objective count every *ordered* off-diagonal pair
(equivalently ``2 * rho`` per unordered pair). The stationarity conditions
reported by :func:`kkt_residual` use the same per-entry convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergenceError, NotPositiveDefiniteError, DimensionMismatchError
from .linalg import as_spd_input, log_det, spd_inverse, symmetrize

DEFAULT_TOL = 1e-5
DEFAULT_MAX_SWEEPS = 200
DEFAULT_MAX_INNER_ITER = 1000

try:  # optional accelerator; the kernel runs identically without it
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _cd_cycles(v, s_col, rho, beta, inner_tol, max_cycles):
    """Coordinate-descent cycles for the block lasso, updating beta in place.

    Returns the number of cycles used, or -1 when the change criterion
    ``max|delta| <= inner_tol * (1 + max|beta|)`` was never met.
    """
    m = beta.shape[0]
    resid = np.dot(v, beta)
    for cycle in range(max_cycles):
        max_delta = 0.0
        max_beta = 0.0
        for j in range(m):
            old = beta[j]
            grad = s_col[j] - resid[j] + v[j, j] * old
            if grad > rho:
                new = (grad - rho) / v[j, j]
            elif grad < -rho:
                new = (grad + rho) / v[j, j]
            else:
                new = 0.0
            delta = new - old
            if delta != 0.0:
                for k in range(m):
                    resid[k] += v[k, j] * delta
                beta[j] = new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
            if abs(new) > max_beta:
                max_beta = abs(new)
        if max_delta <= inner_tol * (1.0 + max_beta):
            return cycle + 1
    return -1


if _HAVE_NUMBA:
    _cd_cycles = _njit(cache=True)(_cd_cycles)


@dataclass
class PenaltySpec:
    """L1 penalty: multiplier ``rho`` and whether the diagonal is penalized."""

    rho: float
    penalize_diagonal: bool = False

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError(f"rho must be nonnegative, got {self.rho}")


@dataclass
class GlassoResult:
    """Converged estimates plus bookkeeping of the sweep history.

    ``sigma_hat`` is the working covariance W, ``theta_hat`` the precision
    estimate with exact zeros. ``objective`` is the penalized log-likelihood
    value at ``theta_hat``; ``objective_trace`` holds the same functional
    evaluated at inv(W) after every full sweep.
    """

    sigma_hat: np.ndarray
    theta_hat: np.ndarray
    iterations: int
    converged: bool
    objective: float
    objective_trace: list = field(default_factory=list)


def soft_threshold(x, t):
    """Shrinkage map sgn(x) * max(|x| - t, 0); accepts scalars or arrays."""
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def glasso_objective(s: np.ndarray, theta: np.ndarray, penalty: PenaltySpec) -> float:
    """Penalized Gaussian log-likelihood at ``theta`` (ordered-pair penalty).

    ``log det(theta) - tr(s theta) - rho * sum_{i != j} |theta_ij|``, minus
    ``rho * sum_i |theta_ii|`` as well when the diagonal is penalized. The
    off-diagonal sum runs over ordered pairs so that the value is exactly
    the function maximized by :func:`glasso_fit` at threshold ``rho``.
    """
    abs_theta = np.abs(theta)
    abs_diag = np.sum(np.diag(abs_theta))
    pen = penalty.rho * (np.sum(abs_theta) - abs_diag)
    if penalty.penalize_diagonal:
        pen += penalty.rho * abs_diag
    return log_det(theta) - float(np.sum(s * theta)) - float(pen)


def inner_lasso(
    v_block: np.ndarray,
    s_col: np.ndarray,
    rho: float,
    beta_init: np.ndarray,
    inner_tol: float = 1e-9,
    max_inner_iter: int = DEFAULT_MAX_INNER_ITER,
) -> np.ndarray:
    """Coordinate-descent lasso for one block update.

    Minimizes ``0.5 * b' V b - b' s + rho * ||b||_1`` with V = ``v_block``
    (SPD), cycling coordinates with the update
    ``b_j <- T(s_j - sum_{k != j} V_kj b_k, rho) / V_jj`` until the largest
    coordinate change in a full cycle is at most
    ``inner_tol * (1 + max|b|)``.

    Raises NonConvergenceError (with the current ``b`` attached) after
    ``max_inner_iter`` cycles.
    """
    m = s_col.shape[0]
    beta = np.array(beta_init, dtype=float, copy=True)
    if m == 0:
        return beta
    if np.any(np.diag(v_block) <= 0):
        raise NotPositiveDefiniteError("inner lasso block has non-positive diagonal")
    cycles = _cd_cycles(
        np.ascontiguousarray(v_block, dtype=float),
        np.ascontiguousarray(s_col, dtype=float),
        float(rho),
        beta,
        float(inner_tol),
        int(max_inner_iter),
    )
    if not np.all(np.isfinite(beta)):
        raise NotPositiveDefiniteError(
            "inner lasso diverged; the block matrix is not positive definite"
        )
    if cycles < 0:
        raise NonConvergenceError(
            f"inner lasso did not converge in {max_inner_iter} cycles",
            result=beta,
        )
    return beta


def _betas_from_theta(theta: np.ndarray) -> np.ndarray:
    """Per-column regression coefficients implied by a precision matrix."""
    p = theta.shape[0]
    betas = np.zeros((p, p - 1))
    for j in range(p):
        keep = np.arange(p) != j
        betas[j] = -theta[keep, j] / theta[j, j]
    return betas


def _recover_theta(w: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """Build the precision matrix from each block's final coefficients.

    Zeros in the coefficients propagate to exact zeros in the result; the
    support is intersected with its transpose before averaging so the zero
    pattern is exactly symmetric.
    """
    p = w.shape[0]
    theta = np.zeros((p, p))
    for j in range(p):
        keep = np.arange(p) != j
        denom = w[j, j] - w[keep, j] @ betas[j]
        if denom <= 0:
            raise NotPositiveDefiniteError(
                "working covariance lost positive definiteness during precision recovery"
            )
        theta[j, j] = 1.0 / denom
        theta[keep, j] = -betas[j] * theta[j, j]
    support = (theta != 0.0) & (theta.T != 0.0)
    return np.where(support, symmetrize(theta), 0.0)


def glasso_fit(
    s: np.ndarray,
    penalty: PenaltySpec,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    warm: GlassoResult | None = None,
    max_inner_iter: int = DEFAULT_MAX_INNER_ITER,
) -> GlassoResult:
    """Fit the graphical lasso on a covariance-like input matrix.

    Parameters
    ----------
    s : ndarray
        Symmetric input with positive diagonal (an empirical covariance or
        a weighted scatter). Positive semidefinite inputs are accepted; for
        rho > 0 the penalty regularizes them.
    penalty : PenaltySpec
        Per-entry soft-threshold level; the diagonal of W is held at
        ``s_ii`` (plus rho when the diagonal is penalized).
    tol : float
        Convergence threshold: mean absolute change of the off-diagonal of
        W over one full sweep, relative to the mean absolute off-diagonal
        of ``s``.
    max_sweeps : int
        Sweep budget; exhausting it raises NonConvergenceError with the
        partial result attached.
    warm : GlassoResult, optional
        Previous fit (typically at a nearby rho) used to initialize W and
        the per-column coefficients. A warm state whose scale no longer
        matches the input can lose definiteness mid-sweep; when that
        happens the fit silently restarts cold.

    Columns are visited in ascending order every sweep, and coefficient
    vectors are cached across sweeps, so runs are deterministic.
    """
    s = as_spd_input(s, "s")
    p = s.shape[0]
    if np.any(np.diag(s) <= 0):
        raise NotPositiveDefiniteError("input matrix must have a positive diagonal")
    rho = penalty.rho
    diag_shift = rho if penalty.penalize_diagonal else 0.0

    if p == 1:
        w = np.array([[s[0, 0] + diag_shift]])
        theta = np.array([[1.0 / w[0, 0]]])
        obj = glasso_objective(s, theta, penalty)
        return GlassoResult(w, theta, 0, True, obj, [obj])

    if warm is not None:
        if warm.sigma_hat.shape != s.shape:
            raise DimensionMismatchError("warm start has mismatched dimensions")
        try:
            return _glasso_sweeps(s, penalty, tol, max_sweeps, max_inner_iter,
                                  warm.sigma_hat.copy(), _betas_from_theta(warm.theta_hat))
        except NotPositiveDefiniteError:
            pass
        except NonConvergenceError as exc:
            if exc.result is not None:  # genuine sweep exhaustion, not a stall
                raise
    return _glasso_sweeps(s, penalty, tol, max_sweeps, max_inner_iter,
                          s.copy(), np.zeros((p, p - 1)))


def _glasso_sweeps(s, penalty, tol, max_sweeps, max_inner_iter, w, betas) -> GlassoResult:
    p = s.shape[0]
    rho = penalty.rho
    diag_shift = rho if penalty.penalize_diagonal else 0.0
    np.fill_diagonal(w, np.diag(s) + diag_shift)

    off_mask = ~np.eye(p, dtype=bool)
    mean_s_off = float(np.mean(np.abs(s[off_mask])))
    conv_target = tol * mean_s_off if mean_s_off > 0 else tol
    inner_tol = 1e-9 * max(1.0, float(np.mean(np.diag(s))))

    keep_idx = [np.arange(p) != j for j in range(p)]
    trace: list = []
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        w_prev = w[off_mask].copy()
        for j in range(p):
            keep = keep_idx[j]
            v_block = w[np.ix_(keep, keep)]
            try:
                betas[j] = inner_lasso(
                    v_block, s[keep, j], rho, betas[j],
                    inner_tol=inner_tol, max_inner_iter=max_inner_iter,
                )
            except NonConvergenceError as exc:
                raise NonConvergenceError(
                    f"inner lasso stalled on column {j}: {exc}", result=None
                ) from exc
            w_col = v_block @ betas[j]
            w[keep, j] = w_col
            w[j, keep] = w_col
        trace.append(glasso_objective(s, spd_inverse(w), penalty))
        delta = float(np.mean(np.abs(w[off_mask] - w_prev)))
        if delta <= conv_target:
            converged = True
            break

    theta = _recover_theta(w, betas)
    result = GlassoResult(
        sigma_hat=symmetrize(w),
        theta_hat=theta,
        iterations=sweeps,
        converged=converged,
        objective=glasso_objective(s, theta, penalty),
        objective_trace=trace,
    )
    if not converged:
        raise NonConvergenceError(
            f"glasso did not converge in {max_sweeps} sweeps "
            f"(last mean off-diagonal change {delta:.3e}, target {conv_target:.3e})",
            result=result,
        )
    return result


def kkt_residual(s: np.ndarray, result: GlassoResult, penalty: PenaltySpec) -> float:
    """Largest violation of the stationarity conditions at a fitted solution.

    Off-diagonal entries with ``theta_ij != 0`` must satisfy
    ``W_ij = S_ij + rho * sgn(theta_ij)``; zero entries must satisfy
    ``|W_ij - S_ij| <= rho``. The diagonal of W must match the diagonal of
    S (shifted by rho when the diagonal is penalized).
    """
    s = as_spd_input(s, "s")
    w = result.sigma_hat
    theta = result.theta_hat
    if w.shape != s.shape or theta.shape != s.shape:
        raise DimensionMismatchError("result dimensions do not match the input matrix")
    rho = penalty.rho
    p = s.shape[0]
    off = ~np.eye(p, dtype=bool)
    diff = w - s
    nonzero = off & (theta != 0.0)
    zero = off & (theta == 0.0)
    res = 0.0
    if np.any(nonzero):
        res = max(res, float(np.max(np.abs(diff[nonzero] - rho * np.sign(theta[nonzero])))))
    if np.any(zero):
        res = max(res, float(np.max(np.maximum(np.abs(diff[zero]) - rho, 0.0))))
    diag_diff = np.abs(np.diag(diff) - (rho if penalty.penalize_diagonal else 0.0))
    res = max(res, float(np.max(diag_diff)))
    return res
