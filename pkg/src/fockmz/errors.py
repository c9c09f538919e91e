class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(ArithmeticError):
    """An iterative method failed to reach its tolerance."""
