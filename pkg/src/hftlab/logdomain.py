"""
Complex numbers stored as (log-magnitude, phase).

Boundary derivatives of the transforms studied here behave like (2n+1)! and
leave the double range quickly, so every magnitude that can grow
factorially travels through :class:`LogComplex`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = ["LogComplex", "log_factorial", "normalize_phase", "log_sum", "log_sum_arrays"]

_TWO_PI = 2.0 * math.pi


def normalize_phase(phase: float) -> float:
    """Map an angle into (-pi, pi]."""
    if not math.isfinite(phase):
        raise ValueError(f"phase must be finite, got {phase!r}")
    if -math.pi < phase <= math.pi:
        return phase
    phase = math.fmod(phase, _TWO_PI)
    if phase <= -math.pi:
        phase += _TWO_PI
    elif phase > math.pi:
        phase -= _TWO_PI
    return phase


def log_factorial(n: float) -> float:
    """log(n!) through the log-gamma function."""
    return math.lgamma(n + 1.0)


@dataclass(frozen=True)
class LogComplex:
    """
    A complex number ``exp(log_abs) * exp(i*phase)``.

    ``log_abs = -inf`` encodes zero; the phase of zero is always 0.
    """

    log_abs: float
    phase: float = 0.0

    def __post_init__(self):
        if math.isnan(self.log_abs):
            raise ValueError("log_abs is NaN")
        if self.log_abs == math.inf:
            raise OverflowError("log_abs is +inf")
        if self.log_abs == -math.inf:
            object.__setattr__(self, "phase", 0.0)
        else:
            object.__setattr__(self, "phase", normalize_phase(float(self.phase)))

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(-math.inf, 0.0)

    @classmethod
    def one(cls) -> "LogComplex":
        return cls(0.0, 0.0)

    @classmethod
    def from_complex(cls, value: complex) -> "LogComplex":
        value = complex(value)
        if value == 0:
            return cls.zero()
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError(f"cannot take log of {value!r}")
        # abs() and cmath.phase raise spuriously on underflowing parts
        return cls(math.log(math.hypot(value.real, value.imag)), math.atan2(value.imag, value.real))

    @classmethod
    def from_log(cls, log_value: complex) -> "LogComplex":
        """Build from a complex logarithm ``log|w| + i*arg w``."""
        log_value = complex(log_value)
        return cls(log_value.real, log_value.imag)

    @classmethod
    def unit(cls, phase: float) -> "LogComplex":
        return cls(0.0, phase)

    # views --------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    def to_complex(self) -> complex:
        """Plain complex value; raises OverflowError when out of range."""
        if self.is_zero:
            return 0j
        if self.log_abs > 709.78:
            raise OverflowError(f"|value| = exp({self.log_abs}) overflows a double")
        return cmath.rect(math.exp(self.log_abs), self.phase)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __abs__(self) -> float:
        return math.exp(self.log_abs) if not self.is_zero else 0.0

    # arithmetic ---------------------------------------------------------
    def __mul__(self, other) -> "LogComplex":
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_abs + other.log_abs, self.phase + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogComplex":
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("LogComplex division by zero")
        if self.is_zero:
            return LogComplex.zero()
        return LogComplex(self.log_abs - other.log_abs, self.phase - other.phase)

    def __rtruediv__(self, other) -> "LogComplex":
        return _coerce(other) / self

    def __neg__(self) -> "LogComplex":
        if self.is_zero:
            return self
        return LogComplex(self.log_abs, self.phase + math.pi)

    def __add__(self, other) -> "LogComplex":
        return log_sum([self, _coerce(other)])

    __radd__ = __add__

    def __sub__(self, other) -> "LogComplex":
        return log_sum([self, -_coerce(other)])

    def __rsub__(self, other) -> "LogComplex":
        return log_sum([_coerce(other), -self])

    def __pow__(self, q: float) -> "LogComplex":
        """Real power on the principal branch of the stored phase."""
        if self.is_zero:
            if q > 0:
                return LogComplex.zero()
            raise ZeroDivisionError("zero to a non-positive power")
        return LogComplex(q * self.log_abs, q * self.phase)

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_abs, -self.phase)

    def scaled(self, log_scale: float) -> complex:
        """Return ``value * exp(-log_scale)`` as a plain complex."""
        if self.is_zero:
            return 0j
        return cmath.rect(math.exp(self.log_abs - log_scale), self.phase)

    def isclose(self, other, rel_tol: float = 1e-9, phase_tol: float = 1e-9) -> bool:
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        dphase = abs(normalize_phase(self.phase - other.phase))
        return abs(self.log_abs - other.log_abs) <= rel_tol and dphase <= phase_tol

    def __repr__(self) -> str:
        return f"LogComplex(log_abs={self.log_abs!r}, phase={self.phase!r})"


def _coerce(value) -> LogComplex:
    if isinstance(value, LogComplex):
        return value
    return LogComplex.from_complex(complex(value))


def log_sum(values: Iterable[LogComplex]) -> LogComplex:
    """
    Sum LogComplex values with a common scale (the largest magnitude), so
    phase cancellation is preserved without overflow.
    """
    values = [v for v in values if not v.is_zero]
    if not values:
        return LogComplex.zero()
    scale = max(v.log_abs for v in values)
    total = sum(v.scaled(scale) for v in values)
    return LogComplex.from_complex(total) * LogComplex(scale)


def log_sum_arrays(log_abs: np.ndarray, phase: np.ndarray) -> tuple[LogComplex, float]:
    """
    Scaled accumulation of many terms given as arrays.

    Returns the sum and ``log(sum of |terms|)``, which callers use as a
    round-off floor.
    """
    log_abs = np.asarray(log_abs, dtype=float)
    finite = np.isfinite(log_abs)
    if not finite.any():
        return LogComplex.zero(), -math.inf
    la = log_abs[finite]
    ph = np.asarray(phase, dtype=float)[finite]
    scale = float(la.max())
    mags = np.exp(la - scale)
    live = mags > 0  # underflowed terms may carry a non-finite phase
    total = complex(np.sum(mags[live] * np.exp(1j * ph[live])))
    log_mass = scale + math.log(float(mags.sum()))
    return LogComplex.from_complex(total) * LogComplex(scale), log_mass
