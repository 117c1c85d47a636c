"""
hftlab: half-line Fourier-Laplace transforms, their boundary Taylor data and
analytic continuations, with finite-budget witnesses for singular behaviour
on the real axis.
"""

from .catalog import (
    Chi,
    Combination,
    HalfLineFunction,
    Phi,
    PolyExp,
    PsiP,
    XAlphaM,
    combine,
    evaluate,
    format_function,
    parse_function,
)
from .errors import (
    AnalyticitySuspect,
    BudgetExhausted,
    CutProximityError,
    DivergentTail,
    DomainError,
    HftError,
    InvalidContour,
    NotSmoothError,
    NumericalError,
    ParseError,
    PrecisionLoss,
    VerificationFailure,
)
from .logdomain import LogComplex

__version__ = "0.1.0"

__all__ = [
    "Chi",
    "Combination",
    "HalfLineFunction",
    "Phi",
    "PolyExp",
    "PsiP",
    "XAlphaM",
    "combine",
    "evaluate",
    "format_function",
    "parse_function",
    "LogComplex",
    "HftError",
    "DomainError",
    "ParseError",
    "NotSmoothError",
    "NumericalError",
    "BudgetExhausted",
    "PrecisionLoss",
    "DivergentTail",
    "InvalidContour",
    "CutProximityError",
    "VerificationFailure",
    "AnalyticitySuspect",
    "__version__",
]
