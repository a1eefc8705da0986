"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    partial : float, optional
        Best value available when the procedure stopped.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
