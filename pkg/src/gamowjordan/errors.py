"""Exception hierarchy shared by all modules."""


class GamowJordanError(Exception):
    """Base class for every error raised by this package."""


class PoleEvaluationError(GamowJordanError, ZeroDivisionError):
    """A function was evaluated at (or numerically on top of) one of its poles."""


class DomainError(GamowJordanError, ValueError):
    """An argument lies outside the mathematical domain of an operation.

    Raised e.g. for negative times (the evolution is a semigroup defined
    only for ``t >= 0``) or for out-of-range Jordan indices.
    """


class HardyValidationError(GamowJordanError, ValueError):
    """A rational wave function violates the Hardy-class constraints."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid Hardy function")


class ConvergenceError(GamowJordanError, ArithmeticError):
    """A quadrature or series did not reach the requested tolerance."""

    def __init__(self, message, estimate=None):
        self.estimate = estimate
        if estimate is not None:
            message = f"{message} (achieved error estimate {estimate:.3e})"
        super().__init__(message)
