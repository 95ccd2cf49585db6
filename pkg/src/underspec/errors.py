"""Exception types raised across the package."""


class UnderspecError(Exception):
    """Base class for errors raised by this package."""


class DomainError(UnderspecError, ValueError):
    """An argument lies outside the domain of a function."""


class UsageError(UnderspecError, ValueError):
    """Inconsistent or incomplete inputs (empty references, mismatched axes)."""


class ConvergenceError(UnderspecError, ArithmeticError):
    """An iterative expansion did not converge."""

    def __init__(self, message, iterations):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations
