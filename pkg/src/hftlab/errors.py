"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class HftError(Exception):
    """Base class for every error raised by hftlab."""

    kind = "error"


class DomainError(HftError, ValueError):
    """An argument lies outside the operation's domain."""

    kind = "domain"


class ParseError(HftError, ValueError):
    """A function spec string or complex literal could not be parsed."""

    kind = "parse"


class NotSmoothError(DomainError):
    """The requested derivative does not extend continuously to t = 0."""

    kind = "not-smooth"

    def __init__(self, message: str, order: int):
        super().__init__(message)
        self.order = order


class NumericalError(HftError, ArithmeticError):
    """A numerical procedure failed; ``best`` carries the best estimate if any."""

    kind = "numerical"

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class BudgetExhausted(NumericalError):
    kind = "budget-exhausted"


class PrecisionLoss(BudgetExhausted):
    """Cancellation limits the attainable accuracy below the requested one."""

    kind = "precision-loss"


class DivergentTail(NumericalError):
    kind = "divergent-tail"


class InvalidContour(DomainError):
    kind = "invalid-contour"


class CutProximityError(DomainError):
    """The evaluation point is on, or too close to, the excluded ray."""

    kind = "cut-proximity"


class VerificationFailure(NumericalError):
    """No candidate formula variant reproduced its defining integral."""

    kind = "verification-failure"


class AnalyticitySuspect(NumericalError):
    kind = "analyticity-suspect"
