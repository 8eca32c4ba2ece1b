"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class NumericalFailureError(ArithmeticError):
    """Raised when a solver fails to converge or a result is not finite."""
