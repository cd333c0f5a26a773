class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class NumericalError(ArithmeticError):
    """An iterative or time-stepping scheme failed to produce a valid result."""
