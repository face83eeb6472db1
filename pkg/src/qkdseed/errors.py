"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class ParameterError(ValueError):
    """Security parameters are inconsistent (e.g. eps_sec <= eps_smooth)."""


class EstimationError(RuntimeError):
    """Not enough data to produce a min-entropy estimate."""


class ResourceError(RuntimeError):
    """An exhaustive computation was requested beyond its enumeration bound."""


class ConvergenceError(ArithmeticError):
    """An iterative solver failed to converge."""
