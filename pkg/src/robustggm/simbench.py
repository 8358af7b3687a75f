"""Synthetic scenarios and graph-recovery evaluation.

Generates sparse random concentration matrices, draws clean, heavy-tailed
or contaminated datasets from them, fits any of the three methods along a
penalty path, and scores edge recovery with ROC curves.

Penalty units: every grid value is a per-entry glasso threshold. The
t-model fits rescale internally (full-likelihood coefficient = threshold
times n) so that the same grid sweeps a comparable sparsity range for all
methods.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    GridMismatchError,
    InfeasibleError,
    InvalidScenarioError,
    NonConvergenceError,
)
from .glasso import PenaltySpec, glasso_fit
from .linalg import as_dataset, cholesky, spd_inverse, symmetrize
from .tlasso import TlassoConfig, tlasso_fit
from .alt_tmodel import McmcConfig, alt_tlasso_fit
from .tmodel import TParams, sample_t

METHODS = ("glasso", "tlasso", "alt_tlasso")
SCENARIO_KINDS = ("gaussian", "student_t", "contaminated_fixed", "contaminated_blocks")

DEFAULT_GRID_SIZE = 30
DEFAULT_GRID_SPAN = 0.01


@dataclass
class GraphSpec:
    """Random-graph recipe: size, edge probability, magnitude range, seed."""

    p: int
    edge_prob: float
    offdiag_value: tuple = (0.3, 0.6)
    seed: int = 0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise ValueError("edge_prob must lie in [0, 1]")
        lo, hi = self.offdiag_value
        if not 0 < lo <= hi:
            raise ValueError("offdiag_value must be an increasing pair of positive magnitudes")


@dataclass
class ScenarioSpec:
    """Data-generating scenario attached to a graph.

    ``contam_nodes`` is the number of contaminated coordinates per
    affected observation, ``contam_rows`` the number of affected
    observations (fixed-node kind), ``mean_multiplier`` scales the largest
    variance of the clean model into the contamination mean, and
    ``block_size`` partitions the observations for the block kind (every
    block contaminates its own disjoint node set in all of its rows).
    """

    kind: str
    n: int
    nu: float = 3.0
    contam_nodes: int = 0
    contam_rows: int = 0
    mean_multiplier: float = 0.0
    block_size: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise InvalidScenarioError(f"unknown scenario kind {self.kind!r}")
        if self.n < 1:
            raise InvalidScenarioError("n must be at least 1")
        if self.kind == "student_t" and self.nu < 3.0:
            raise InvalidScenarioError("student_t scenarios require nu >= 3")
        if self.kind == "contaminated_fixed" and self.contam_rows > self.n:
            raise InvalidScenarioError("contam_rows exceeds the sample size")
        if self.kind == "contaminated_blocks":
            if self.block_size < 1:
                raise InvalidScenarioError("block_size must be at least 1 for block contamination")
            if self.n % self.block_size != 0:
                raise InvalidScenarioError("n must be a multiple of block_size")


@dataclass(frozen=True)
class EdgeSet:
    """Unordered off-diagonal support of a concentration matrix."""

    p: int
    edges: frozenset

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.p):
                raise ValueError(f"invalid edge ({i}, {j}) for {self.p} nodes")

    def __len__(self) -> int:
        return len(self.edges)

    def max_edges(self) -> int:
        return self.p * (self.p - 1) // 2


@dataclass
class RocCurve:
    """(rho, FPR, TPR) points in descending rho order plus the trapezoid AUC.

    ``rho_grid`` is the full requested grid (descending); points whose fit
    failed are kept out of ``points`` and recorded in ``failures`` as
    (rho, message) pairs.
    """

    points: list
    auc: float
    rho_grid: tuple
    failures: list = field(default_factory=list)


@dataclass
class TopKResult:
    """Edge set of the requested size plus the penalty that produced it.

    ``tie_broken`` flags the fallback where no penalty achieved exactly k
    edges and the k largest-magnitude entries of the closest larger fit
    were kept. ``magnitudes`` maps each selected edge to |theta_ij|.
    """

    edges: EdgeSet
    rho: float
    tie_broken: bool
    magnitudes: dict


def random_concentration(spec: GraphSpec, rng: np.random.Generator | None = None):
    """Draw a sparse SPD concentration matrix and its true edge set.

    Off-diagonal pairs are nonzero independently with ``spec.edge_prob``;
    nonzero entries get a random sign and a magnitude uniform on
    ``spec.offdiag_value``. The diagonal is set to the absolute row sum
    plus one, which makes the matrix strictly diagonally dominant and
    hence positive definite.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    p = spec.p
    lo, hi = spec.offdiag_value
    iu = np.triu_indices(p, k=1)
    m = iu[0].shape[0]
    present = rng.random(m) < spec.edge_prob
    magnitude = rng.uniform(lo, hi, size=m)
    sign = np.where(rng.random(m) < 0.5, -1.0, 1.0)
    theta = np.zeros((p, p))
    theta[iu] = np.where(present, sign * magnitude, 0.0)
    theta = theta + theta.T
    np.fill_diagonal(theta, np.abs(theta).sum(axis=1) + 1.0)
    edges = frozenset(
        (int(i), int(j)) for i, j, keep in zip(iu[0], iu[1], present) if keep
    )
    return theta, EdgeSet(p=p, edges=edges)


def generate_scenario(graph, scenario: ScenarioSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw a dataset for a scenario from a (theta, truth) pair.

    The clean rows are always drawn first, so a contaminated dataset and
    the plain Gaussian dataset from the same stream agree everywhere
    except the contaminated cells. Contaminated cells are replaced by
    unit-variance normal draws centered at ``mean_multiplier`` times the
    largest variance of the clean model.
    """
    theta, _ = graph
    p = theta.shape[0]
    psi = spd_inverse(theta)
    n = scenario.n

    if scenario.kind == "student_t":
        return sample_t(TParams(mu=np.zeros(p), psi=psi, nu=scenario.nu), n, rng)

    data = rng.standard_normal((n, p)) @ cholesky(psi).T
    if scenario.kind == "gaussian":
        return data

    level = scenario.mean_multiplier * float(np.max(np.diag(psi)))
    if scenario.kind == "contaminated_fixed":
        if scenario.contam_nodes > p:
            raise InvalidScenarioError("contam_nodes exceeds the number of variables")
        if scenario.contam_rows > 0 and scenario.contam_nodes > 0:
            rows = np.sort(rng.choice(n, size=scenario.contam_rows, replace=False))
            nodes = np.sort(rng.choice(p, size=scenario.contam_nodes, replace=False))
            data[np.ix_(rows, nodes)] = level + rng.standard_normal(
                (rows.shape[0], nodes.shape[0])
            )
        return data

    # contaminated_blocks
    n_blocks = n // scenario.block_size
    if n_blocks * scenario.contam_nodes > p:
        raise InvalidScenarioError(
            f"{n_blocks} blocks of {scenario.contam_nodes} nodes need "
            f"{n_blocks * scenario.contam_nodes} distinct nodes but only {p} exist"
        )
    if scenario.contam_nodes > 0:
        node_pool = rng.permutation(p)[: n_blocks * scenario.contam_nodes]
        node_sets = node_pool.reshape(n_blocks, scenario.contam_nodes)
        for b in range(n_blocks):
            rows = np.arange(b * scenario.block_size, (b + 1) * scenario.block_size)
            nodes = np.sort(node_sets[b])
            data[np.ix_(rows, nodes)] = level + rng.standard_normal(
                (rows.shape[0], nodes.shape[0])
            )
    return data


def edges_from_theta(theta: np.ndarray) -> EdgeSet:
    """Edge set of the exactly nonzero off-diagonal entries."""
    theta = np.asarray(theta)
    p = theta.shape[0]
    iu = np.triu_indices(p, k=1)
    edges = frozenset(
        (int(i), int(j))
        for i, j in zip(*iu)
        if theta[i, j] != 0.0 or theta[j, i] != 0.0
    )
    return EdgeSet(p=p, edges=edges)


def empirical_covariance(data: np.ndarray) -> np.ndarray:
    """(1/n)-normalized covariance around the sample mean."""
    data = as_dataset(data)
    centered = data - data.mean(axis=0)
    return symmetrize(centered.T @ centered / data.shape[0])


def default_rho_grid(
    data: np.ndarray, size: int = DEFAULT_GRID_SIZE, span: float = DEFAULT_GRID_SPAN
) -> np.ndarray:
    """Log-spaced per-entry thresholds spanning [span * rho_max, rho_max].

    ``rho_max`` is the largest absolute off-diagonal of the empirical
    covariance, the smallest threshold producing an empty glasso graph.
    Heavily contaminated data inflates ``rho_max``; pass a smaller ``span``
    there so the grid still reaches the uncontaminated scale.
    """
    s = empirical_covariance(data)
    off = np.abs(s - np.diag(np.diag(s)))
    rho_max = float(np.max(off))
    if rho_max <= 0:
        rho_max = 1.0
    return np.logspace(np.log10(span * rho_max), np.log10(rho_max), size)


def confusion_rates(found: EdgeSet, truth: EdgeSet) -> tuple[float, float]:
    """(FPR, TPR) of a recovered edge set against the truth.

    Vacuous denominators resolve conservatively: TPR is 1 when there are
    no true edges, FPR is 0 when there are no true non-edges.
    """
    if found.p != truth.p:
        raise GridMismatchError("edge sets refer to different node counts")
    n_true = len(truth)
    n_non = truth.max_edges() - n_true
    fp = len(found.edges - truth.edges)
    tp = len(found.edges & truth.edges)
    fpr = fp / n_non if n_non > 0 else 0.0
    tpr = tp / n_true if n_true > 0 else 1.0
    return fpr, tpr


def _auc_from_points(points) -> float:
    """Trapezoid area over FPR after extending the curve to (0,0) and (1,1)."""
    pairs = sorted((fpr, tpr) for _, fpr, tpr in points)
    pairs = [(0.0, 0.0)] + pairs + [(1.0, 1.0)]
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pairs, pairs[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def _fit_edges(method, data, rho, s, config, mcmc, warm):
    """One path step: returns (edge set, warm-start state for the next rho)."""
    n = data.shape[0]
    if method == "glasso":
        res = glasso_fit(s, PenaltySpec(rho=rho), warm=warm)
        return edges_from_theta(res.theta_hat), res
    cfg = replace(config, rho=rho * n)
    if method == "tlasso":
        fit = tlasso_fit(data, cfg, warm=warm)
    else:
        fit = alt_tlasso_fit(data, cfg, mcmc if mcmc is not None else McmcConfig(), warm=warm)
    return edges_from_theta(fit.theta_hat), fit


def roc_curve(
    method: str,
    data: np.ndarray,
    truth: EdgeSet,
    rho_grid,
    config: TlassoConfig | None = None,
    mcmc: McmcConfig | None = None,
) -> RocCurve:
    """Recovery rates of one method along a penalty path.

    Fits run in ascending rho order, warm-started from the previous
    point; a fit failure records the point under ``failures`` and the
    path continues from the last good state. Points are reported in
    descending rho order.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    data = as_dataset(data)
    grid = sorted(float(r) for r in rho_grid)
    if not grid:
        raise ValueError("rho_grid must be nonempty")
    if any(r <= 0 for r in grid):
        raise ValueError("all penalty values must be positive")
    if config is None:
        config = TlassoConfig(rho=0.0)
    s = empirical_covariance(data) if method == "glasso" else None

    points = []
    failures = []
    warm = None
    for rho in grid:
        try:
            found, warm = _fit_edges(method, data, rho, s, config, mcmc, warm)
        except NonConvergenceError as exc:
            failures.append((rho, str(exc)))
            continue
        fpr, tpr = confusion_rates(found, truth)
        points.append((rho, fpr, tpr))
    points.reverse()
    failures.reverse()
    return RocCurve(
        points=points,
        auc=_auc_from_points(points),
        rho_grid=tuple(sorted(grid, reverse=True)),
        failures=failures,
    )


def average_roc(curves) -> RocCurve:
    """Pointwise mean of several curves sharing one grid; AUC is recomputed."""
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one curve")
    grid = curves[0].rho_grid
    for curve in curves[1:]:
        if curve.rho_grid != grid:
            raise GridMismatchError("curves do not share a common rho grid")
    points = []
    for rho in grid:
        rates = [
            (fpr, tpr)
            for curve in curves
            for r, fpr, tpr in curve.points
            if r == rho
        ]
        if not rates:
            continue
        arr = np.asarray(rates)
        points.append((rho, float(arr[:, 0].mean()), float(arr[:, 1].mean())))
    return RocCurve(points=points, auc=_auc_from_points(points), rho_grid=grid)


def top_k_edges(
    method: str,
    data: np.ndarray,
    k: int,
    config: TlassoConfig | None = None,
    mcmc: McmcConfig | None = None,
    max_bisect: int = 60,
) -> TopKResult:
    """Tune the penalty by bisection until exactly ``k`` edges are recovered.

    When edge counts skip ``k`` everywhere (counts are not perfectly
    monotone in the penalty), the smallest achieved count above ``k`` is
    reduced to its ``k`` largest-magnitude entries and the result is
    flagged ``tie_broken``. Raises InfeasibleError when no explored
    penalty yields at least ``k`` edges.
    """
    data = as_dataset(data)
    p = data.shape[1]
    max_edges = p * (p - 1) // 2
    if not 0 <= k <= max_edges:
        raise ValueError(f"k must lie in [0, {max_edges}], got {k}")
    if config is None:
        config = TlassoConfig(rho=0.0)
    s = empirical_covariance(data) if method == "glasso" else None

    def fit_at(rho):
        edges, fit = _fit_edges(method, data, rho, s, config, mcmc, None)
        theta = fit.theta_hat
        return edges, theta

    off = np.abs(s if s is not None else empirical_covariance(data))
    np.fill_diagonal(off, 0.0)
    hi = float(np.max(off)) if np.max(off) > 0 else 1.0
    edges_hi, theta_hi = fit_at(hi)
    expand = 0
    while len(edges_hi) > k and expand < 10:
        hi *= 2.0
        edges_hi, theta_hi = fit_at(hi)
        expand += 1
    if len(edges_hi) == k:
        return _topk_result(edges_hi, theta_hi, hi, False)

    lo = hi * 1e-4
    edges_lo, theta_lo = fit_at(lo)
    while len(edges_lo) < k and lo > hi * 1e-14:
        lo /= 10.0
        edges_lo, theta_lo = fit_at(lo)
    if len(edges_lo) == k:
        return _topk_result(edges_lo, theta_lo, lo, False)
    if len(edges_lo) < k:
        raise InfeasibleError(
            f"even the smallest explored penalty recovers only {len(edges_lo)} edges, "
            f"fewer than the requested {k}"
        )

    best = (len(edges_lo), edges_lo, theta_lo, lo)  # smallest count >= k seen so far
    for _ in range(max_bisect):
        mid = (lo + hi) / 2.0
        edges_mid, theta_mid = fit_at(mid)
        count = len(edges_mid)
        if count == k:
            return _topk_result(edges_mid, theta_mid, mid, False)
        if count > k:
            lo = mid
            if count < best[0]:
                best = (count, edges_mid, theta_mid, mid)
        else:
            hi = mid
    _, edges_best, theta_best, rho_best = best
    ranked = sorted(
        edges_best.edges,
        key=lambda e: (-abs(theta_best[e[0], e[1]]), e),
    )
    kept = frozenset(ranked[:k])
    trimmed = EdgeSet(p=edges_best.p, edges=kept)
    return _topk_result(trimmed, theta_best, rho_best, True)


def _topk_result(edges: EdgeSet, theta: np.ndarray, rho: float, tie_broken: bool) -> TopKResult:
    magnitudes = {e: float(abs(theta[e[0], e[1]])) for e in sorted(edges.edges)}
    return TopKResult(edges=edges, rho=rho, tie_broken=tie_broken, magnitudes=magnitudes)
