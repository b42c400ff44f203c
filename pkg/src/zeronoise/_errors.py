class InvalidArgumentError(ValueError):
    """Raised when an input violates a documented precondition."""


class RegimeViolationError(InvalidArgumentError):
    """Raised when alpha + 1/beta <= 1 and the caller did not force the run."""


class NumericalFailureError(ArithmeticError):
    """Raised when a numerical routine cannot produce a valid result."""


class DivergedError(NumericalFailureError):
    """Raised when an integrated path leaves the finite range.

    ``index`` is the first grid index at which the value became non-finite
    or exceeded the blow-up guard.
    """

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index
