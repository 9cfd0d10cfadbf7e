class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A quadrature or extrapolation failed to reach the requested tolerance."""
