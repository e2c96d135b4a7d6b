"""Exception hierarchy shared by all modules."""


class PucciError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(PucciError, ValueError):
    """Non-finite or malformed numeric input."""


class ParameterError(PucciError, ValueError):
    """Parameters outside the admissible range (omega, gamma, a, delta, ...)."""


class DomainError(PucciError, ValueError):
    """A point lies outside the set where a function is defined."""


class UnsupportedError(PucciError):
    """The requested operation has no implementation for this domain type."""


class QuadratureError(PucciError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class GridError(PucciError):
    """The discretized domain is unusable (empty or disconnected interior)."""


class MonotonicityError(PucciError):
    """An assembled operator is not an M-matrix."""


class IterationError(PucciError):
    """An iterative solver stopped without meeting its termination test."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
