"""Exception types shared across the package."""


class FredgapError(Exception):
    """Base class for all package errors."""


class ConfigurationError(FredgapError, ValueError):
    """Invalid parameters or configuration values."""


class DomainError(FredgapError, ValueError):
    """Argument outside the supported domain of an operation."""


class ConvergenceError(FredgapError, RuntimeError):
    """An iterative or refinement procedure failed to converge.

    ``iterates`` holds the last values seen (may be empty).
    """

    def __init__(self, message, iterates=()):
        super().__init__(message)
        self.iterates = tuple(iterates)


class TruncationError(FredgapError, RuntimeError):
    """A contour was cut too early; ``residual`` estimates the lost mass."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = float(residual)


class SingularOperatorError(FredgapError, RuntimeError):
    """``Id - K`` is singular to working precision."""

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = float(condition)
