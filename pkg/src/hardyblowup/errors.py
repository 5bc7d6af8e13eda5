"""Exception types shared across the package."""


class HardyBlowupError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HardyBlowupError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(HardyBlowupError):
    """An operation was requested in a parameter regime where it is undefined
    (e.g. building an existence construction in the nonexistence regime)."""


class PreconditionError(HardyBlowupError):
    """A documented precondition of an operation was violated."""


class NonConvergence(HardyBlowupError):
    """An iterative procedure exhausted its budget without converging."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class BracketFailure(HardyBlowupError):
    """A root bracket for a scalar solve could not be established."""


class NotBlowingUp(HardyBlowupError):
    """Blow-up radius detection was requested for a trajectory that reaches
    the inner integration limit without exceeding the smallest cap."""


class IncompatibleProblems(HardyBlowupError):
    """Two trajectories or solutions do not share the same coefficients."""
