"""Multivariate t distribution: density, sampling, and EM maximum likelihood.

The distribution is parameterized by a location vector, an SPD scale
matrix, and the degrees of freedom (at least 3 so the covariance exists;
the covariance is ``nu / (nu - 2)`` times the scale matrix). Sampling uses
the scale-mixture construction: a Gaussian vector divided by the square
root of a single Gamma(nu/2, rate=nu/2) variable shared by all
coordinates, which has unit mean.

The EM fit treats the Gamma divisors as latent: the conditional
expectation of each divisor given an observation is
``(nu + p) / (nu + delta)`` with ``delta`` the Mahalanobis distance, and
the update of the location and scale uses the divisor-weighted mean and
scatter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .errors import DimensionMismatchError, NonConvergenceError
from .linalg import (
    as_dataset,
    as_spd_input,
    as_vector,
    cholesky,
    mahalanobis,
    symmetrize,
)

MIN_NU = 3.0


@dataclass
class TParams:
    """Location ``mu``, SPD scale matrix ``psi``, degrees of freedom ``nu``."""

    mu: np.ndarray
    psi: np.ndarray
    nu: float

    def __post_init__(self):
        self.psi = as_spd_input(self.psi, "psi")
        self.mu = as_vector(self.mu, self.psi.shape[0], "mu")
        if self.nu < MIN_NU:
            raise ValueError(f"nu must be at least {MIN_NU}, got {self.nu}")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


@dataclass
class SufficientStats:
    """Divisor-weighted sums: total weight, weighted sum, weighted outer sum."""

    s_tau: float
    s_tau_y: np.ndarray
    s_tau_yy: np.ndarray


def sufficient_stats(data: np.ndarray, weights: np.ndarray) -> SufficientStats:
    """Accumulate the complete-data sufficient statistics, linear in the weights."""
    data = as_dataset(data)
    weights = as_vector(weights, data.shape[0], "weights")
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    wy = data * weights[:, None]
    return SufficientStats(
        s_tau=float(np.sum(weights)),
        s_tau_y=wy.sum(axis=0),
        s_tau_yy=symmetrize(wy.T @ data),
    )


def _log_density_constant(p: int, nu: float) -> float:
    return float(gammaln((nu + p) / 2.0) - gammaln(nu / 2.0) - (p / 2.0) * np.log(np.pi * nu))


def t_log_density(y: np.ndarray, params: TParams) -> float:
    """Log density of the multivariate t at ``y``, computed in log space."""
    delta = mahalanobis(y, params.mu, params.psi)
    p, nu = params.dim, params.nu
    lower = cholesky(params.psi)
    half_log_det = float(np.sum(np.log(np.diag(lower))))
    return (
        _log_density_constant(p, nu)
        - half_log_det
        - ((nu + p) / 2.0) * np.log1p(delta / nu)
    )


def sample_t(params: TParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` rows; each row shares one Gamma divisor across coordinates."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    lower = cholesky(params.psi)
    gauss = rng.standard_normal((n, params.dim)) @ lower.T
    tau = rng.gamma(shape=params.nu / 2.0, scale=2.0 / params.nu, size=n)
    return params.mu + gauss / np.sqrt(tau)[:, None]


def e_step_weight(y: np.ndarray, params: TParams) -> float:
    """Conditional divisor mean ``(nu + p) / (nu + delta)`` for one observation."""
    delta = mahalanobis(y, params.mu, params.psi)
    return (params.nu + params.dim) / (params.nu + delta)


def squared_distances(data: np.ndarray, mu: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Mahalanobis distances of every row of ``data`` from ``mu`` under ``psi``."""
    data = as_dataset(data)
    psi = as_spd_input(psi, "psi")
    mu = as_vector(mu, psi.shape[0], "mu")
    if data.shape[1] != psi.shape[0]:
        raise DimensionMismatchError(
            f"dataset has {data.shape[1]} columns, scale matrix is {psi.shape[0]}x{psi.shape[0]}"
        )
    lower = cholesky(psi)
    z = scipy.linalg.solve_triangular(lower, (data - mu).T, lower=True)
    return np.sum(z * z, axis=0)


def weighted_scatter(data: np.ndarray, mu: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted scatter ``(1/n) sum_i w_i (y_i - mu)(y_i - mu)'`` around ``mu``."""
    data = as_dataset(data)
    n, p = data.shape
    mu = as_vector(mu, p, "mu")
    weights = as_vector(weights, n, "weights")
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    centered = data - mu
    return symmetrize((centered * weights[:, None]).T @ centered / n)


def _observed_loglik(data: np.ndarray, params: TParams) -> float:
    n, p = data.shape
    lower = cholesky(params.psi)
    half_log_det = float(np.sum(np.log(np.diag(lower))))
    z = scipy.linalg.solve_triangular(lower, (data - params.mu).T, lower=True)
    delta = np.sum(z * z, axis=0)
    nu = params.nu
    return float(
        n * (_log_density_constant(p, nu) - half_log_det)
        - ((nu + p) / 2.0) * np.sum(np.log1p(delta / nu))
    )


def em_fit_mle(
    data: np.ndarray,
    nu: float,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> tuple[TParams, np.ndarray, list]:
    """Maximum likelihood fit of location and scale for fixed ``nu``.

    Alternates divisor-expectation steps with weighted mean/scatter updates
    until the observed log-likelihood changes by at most ``tol``. Returns
    the fitted parameters, the divisor weights evaluated at the final
    parameters, and the log-likelihood trace (non-decreasing, starting at
    the value of the initializer).

    Initialization is the sample mean and the (1/n)-normalized empirical
    covariance; degenerate inputs surface as NotPositiveDefiniteError.
    """
    data = as_dataset(data)
    n, p = data.shape
    if nu < MIN_NU:
        raise ValueError(f"nu must be at least {MIN_NU}, got {nu}")
    if n < 2:
        raise DimensionMismatchError("at least two observations are required")

    mu = data.mean(axis=0)
    psi = symmetrize((data - mu).T @ (data - mu) / n)
    params = TParams(mu=mu, psi=psi, nu=nu)
    trace = [_observed_loglik(data, params)]

    converged = False
    for _ in range(max_iter):
        delta = squared_distances(data, params.mu, params.psi)
        weights = (nu + p) / (nu + delta)
        stats = sufficient_stats(data, weights)
        mu = stats.s_tau_y / stats.s_tau
        psi = weighted_scatter(data, mu, weights)
        params = TParams(mu=mu, psi=psi, nu=nu)
        trace.append(_observed_loglik(data, params))
        if abs(trace[-1] - trace[-2]) <= tol:
            converged = True
            break

    final_delta = squared_distances(data, params.mu, params.psi)
    final_weights = (nu + p) / (nu + final_delta)
    if not converged:
        raise NonConvergenceError(
            f"EM did not converge in {max_iter} iterations "
            f"(last log-likelihood change {abs(trace[-1] - trace[-2]):.3e})",
            result=(params, final_weights, trace),
        )
    return params, final_weights, trace
