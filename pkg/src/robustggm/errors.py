"""Exception types shared across the package."""


class RobustGgmError(Exception):
    """Base class for errors raised by robustggm."""


class NotPositiveDefiniteError(RobustGgmError):
    """A matrix required to be symmetric positive definite is not."""


class DimensionMismatchError(RobustGgmError):
    """Operands have incompatible shapes."""


class NonConvergenceError(RobustGgmError):
    """An iterative solver exhausted its iteration budget.

    When a usable partial state exists it is attached as ``result`` so
    callers can inspect or resume from it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateProposalError(RobustGgmError):
    """The sampler's proposal distribution is undefined (non-positive precision)."""


class InvalidScenarioError(RobustGgmError):
    """Simulation scenario parameters are inconsistent with the graph dimensions."""


class GridMismatchError(RobustGgmError):
    """ROC curves do not share a common penalty grid."""


class InfeasibleError(RobustGgmError):
    """No penalty value can achieve the requested edge count."""
