"""Robust sparse graph-structure estimation from multivariate data.

Implements the graphical lasso, a penalized EM fit of the graphical
multivariate t model (tlasso), and a stochastic-EM fit of an alternative
t model with per-coordinate divisors, plus a simulation harness for
ROC-based recovery comparisons and a command-line interface.
"""

from .errors import (
    DegenerateProposalError,
    DimensionMismatchError,
    GridMismatchError,
    InfeasibleError,
    InvalidScenarioError,
    NonConvergenceError,
    NotPositiveDefiniteError,
    RobustGgmError,
)
from .glasso import (
    GlassoResult,
    PenaltySpec,
    glasso_fit,
    glasso_objective,
    inner_lasso,
    kkt_residual,
    soft_threshold,
)
from .linalg import (
    cholesky,
    is_spd,
    log_det,
    mahalanobis,
    partition_drop,
    schur_conditional,
    spd_inverse,
    symmetrize,
)
from .tmodel import (
    SufficientStats,
    TParams,
    e_step_weight,
    em_fit_mle,
    sample_t,
    sufficient_stats,
    t_log_density,
    weighted_scatter,
)
from .tlasso import (
    TlassoConfig,
    TlassoFit,
    estimate_nu,
    penalized_obs_loglik,
    tlasso_fit,
    tlasso_path,
)
from .alt_tmodel import (
    McmcConfig,
    TauStats,
    alt_cov_factor,
    alt_tlasso_fit,
    alt_weighted_scatter,
    gibbs_mh_estep,
    sample_alt_t,
)
from .simbench import (
    EdgeSet,
    GraphSpec,
    RocCurve,
    ScenarioSpec,
    TopKResult,
    average_roc,
    default_rho_grid,
    edges_from_theta,
    empirical_covariance,
    generate_scenario,
    random_concentration,
    roc_curve,
    top_k_edges,
)

__version__ = "0.1.0"

__all__ = [
    "RobustGgmError",
    "NotPositiveDefiniteError",
    "DimensionMismatchError",
    "NonConvergenceError",
    "DegenerateProposalError",
    "InvalidScenarioError",
    "GridMismatchError",
    "InfeasibleError",
    "PenaltySpec",
    "GlassoResult",
    "soft_threshold",
    "inner_lasso",
    "glasso_fit",
    "glasso_objective",
    "kkt_residual",
    "cholesky",
    "is_spd",
    "log_det",
    "spd_inverse",
    "mahalanobis",
    "schur_conditional",
    "partition_drop",
    "symmetrize",
    "TParams",
    "SufficientStats",
    "sufficient_stats",
    "t_log_density",
    "sample_t",
    "e_step_weight",
    "weighted_scatter",
    "em_fit_mle",
    "TlassoConfig",
    "TlassoFit",
    "penalized_obs_loglik",
    "tlasso_fit",
    "tlasso_path",
    "estimate_nu",
    "McmcConfig",
    "TauStats",
    "alt_cov_factor",
    "sample_alt_t",
    "gibbs_mh_estep",
    "alt_weighted_scatter",
    "alt_tlasso_fit",
    "GraphSpec",
    "ScenarioSpec",
    "EdgeSet",
    "RocCurve",
    "TopKResult",
    "random_concentration",
    "generate_scenario",
    "edges_from_theta",
    "empirical_covariance",
    "default_rho_grid",
    "roc_curve",
    "average_roc",
    "top_k_edges",
    "__version__",
]
