"""
The explicit function families on [0, inf) and their exact derivative data.

Families
--------
Chi(alpha)        e^{i alpha t} e^{-sqrt t}
Phi(alpha)        e^{i alpha t} e^{-sqrt(t+1)}
PsiP(p)           e^{-t^p}
XAlphaM(alpha, M) e^{i alpha t} exp(-t^{1/M^2})
PolyExp(nu, sigma) t^nu e^{-sigma t}
Combination       finite linear combination of the above (flat)

Derivatives of the radical bases e^{-sqrt(t+c)} are kept as
``e^{-sqrt u} * sum_j d_j u^{-j/2}`` with exact rational ``d_j``; the power
base e^{-t^p} as ``e^{-t^p} * sum c_ab t^{pa-b}``. Behaviour at t = 0 is
decided from the generalized power (Puiseux) expansion in powers t^q.

Text form (used by the CLI)::

    chi:alpha=0        phi:alpha=1.5        psi:p=1/3
    x:alpha=0,M=2      polyexp:nu=1,sigma=1+0.5i
    sum:(1+0i)*polyexp:nu=0,sigma=1+0i+(0.1+0i)*phi:alpha=0
    sum:               (the zero function)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

import numpy as np

from .errors import DomainError, NotSmoothError, ParseError
from .logdomain import LogComplex, log_sum

__all__ = [
    "HalfLineFunction",
    "Chi",
    "Phi",
    "PsiP",
    "XAlphaM",
    "PolyExp",
    "Combination",
    "SmoothnessReport",
    "combine",
    "evaluate",
    "eval_derivative",
    "log_evaluate",
    "closed_taylor_coeff",
    "smoothness_report",
    "singular_at_zero",
    "parse_function",
    "format_function",
    "parse_complex",
    "format_complex",
]

# Highest derivative order probed when looking for the first non-smooth one.
MAX_SMOOTHNESS_PROBE = 64


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x)).limit_denominator(10**9)


# --------------------------------------------------------------------------
# exact derivative recursions
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def radical_coefficients(m: int) -> tuple[tuple[int, Fraction], ...]:
    """
    d^m/du^m e^{-sqrt u} = e^{-sqrt u} * sum_j d_j u^{-j/2}.

    Returns the pairs (j, d_j) with d_j != 0.
    """
    if m == 0:
        return ((0, Fraction(1)),)
    prev = radical_coefficients(m - 1)
    out: dict[int, Fraction] = {}
    for j, d in prev:
        # d/du [u^{-j/2} e^{-sqrt u}] = (-j/2) u^{-j/2-1} - (1/2) u^{-(j+1)/2}
        if j:
            out[j + 2] = out.get(j + 2, Fraction(0)) + d * Fraction(-j, 2)
        out[j + 1] = out.get(j + 1, Fraction(0)) + d * Fraction(-1, 2)
    return tuple(sorted((j, d) for j, d in out.items() if d != 0))


@lru_cache(maxsize=None)
def power_coefficients(p: Fraction, m: int) -> tuple[tuple[int, int, Fraction], ...]:
    """
    d^m/dt^m e^{-t^p} = e^{-t^p} * sum c_ab t^{p a - b}.

    Returns the triples (a, b, c_ab) with c_ab != 0.
    """
    if m == 0:
        return ((0, 0, Fraction(1)),)
    out: dict[tuple[int, int], Fraction] = {}
    for a, b, c in power_coefficients(p, m - 1):
        e = p * a - b
        if e != 0:
            out[(a, b + 1)] = out.get((a, b + 1), Fraction(0)) + c * e
        out[(a + 1, b + 1)] = out.get((a + 1, b + 1), Fraction(0)) - c * p
    return tuple(sorted((a, b, c) for (a, b), c in out.items() if c != 0))


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------


def _complex_array(t) -> np.ndarray:
    # keeps extended-precision input extended
    t = np.asarray(t)
    return t if t.dtype == np.clongdouble else t.astype(complex)


def _power(t, p: float) -> np.ndarray:
    """Principal t^p; unlike ``**`` it overflows with the correct signs."""
    t = _complex_array(t)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.exp(p * np.log(t))
    return np.where(t == 0, 0, out)


class HalfLineFunction:
    """Common behaviour of the catalog families (arithmetic, text form)."""

    __slots__ = ()

    def __add__(self, other):
        if not isinstance(other, HalfLineFunction):
            return NotImplemented
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        if not isinstance(other, HalfLineFunction):
            return NotImplemented
        return combine([(1.0, self), (-1.0, other)])

    def __neg__(self):
        return combine([(-1.0, self)])

    def __mul__(self, c):
        if isinstance(c, HalfLineFunction):
            return NotImplemented
        return combine([(complex(c), self)])

    __rmul__ = __mul__

    def __str__(self) -> str:
        return format_function(self)

    @property
    def distinguished_point(self) -> Optional[float]:
        raise NotImplementedError


class SingleTerm(HalfLineFunction):
    """A family member: modulation e^{i alpha t} times a base function."""

    __slots__ = ()

    @property
    def alpha(self) -> float:
        return 0.0

    @property
    def distinguished_point(self) -> float:
        return self.alpha

    # hooks implemented by the families
    def base_derivative(self, m: int, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def base_log(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def base_puiseux(self, qmax: Fraction) -> dict[Fraction, complex]:
        raise NotImplementedError

    # d^m/dt^m base = exp(envelope(t)) * sum_i c_i v(t)^{e_i}
    def envelope_log(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def poly_variable(self, t: np.ndarray) -> np.ndarray:
        return _complex_array(t)

    def derivative_terms(self, m: int) -> tuple:
        """Pairs (c_i, e_i) of the m-th derivative's prefactor."""
        raise NotImplementedError

    def log_modulated_derivative(self, k: int, t: np.ndarray) -> np.ndarray:
        """
        Complex log of d^k/dt^k [e^{i alpha t} base(t)], formed without
        leaving the log domain (so it survives where the value over- or
        underflows).
        """
        out = self.envelope_log(t) + _log_poly(_leibniz_terms(self, k), np.log(self.poly_variable(t)))
        if self.alpha:
            out = out + 1j * self.alpha * _complex_array(t)
        return out

    @property
    def linear_rate(self) -> complex:
        """Rate ``a`` such that the base behaves like e^{a t} times slower factors."""
        return 0j

    def sector_ok(self, angle: float) -> bool:
        """Base is analytic and sub-exponentially tame along arg t = angle."""
        return abs(angle) < math.pi / 2

    @property
    def sublinear_decay(self) -> bool:
        """Base decays on the real ray even without a linear rate."""
        return True

    def modulated_derivative(self, k: int, t: np.ndarray) -> np.ndarray:
        t = _complex_array(t)
        v = self.poly_variable(t)
        acc = np.zeros(np.shape(t), dtype=t.dtype)
        for e, c in _leibniz_terms(self, k).items():
            acc = acc + c * (v**e if e else 1.0)
        env = self.envelope_log(t)
        if self.alpha:
            env = env + 1j * self.alpha * t
        return np.exp(env) * acc

    def puiseux(self, qmax: Fraction) -> dict[Fraction, complex]:
        base = self.base_puiseux(qmax)
        if not self.alpha:
            return base
        out: dict[Fraction, complex] = {}
        ia = 1j * self.alpha
        for q, c in base.items():
            a = 0
            while q + a <= qmax:
                key = q + a
                out[key] = out.get(key, 0j) + c * ia**a / math.factorial(a)
                a += 1
        return out


@lru_cache(maxsize=4096)
def _leibniz_terms(f: "SingleTerm", k: int) -> dict:
    """Prefactor of d^k/dt^k [e^{i alpha t} base] as {exponent: coefficient}."""
    ia = 1j * f.alpha
    terms: dict = {}
    for m in range(k + 1):
        w = math.comb(k, m) * ia ** (k - m)
        if w == 0:
            continue
        for c, e in f.derivative_terms(m):
            terms[e] = terms.get(e, 0j) + w * complex(c)
    return {e: c for e, c in terms.items() if c != 0}


def _log_poly(terms: dict, log_v: np.ndarray) -> np.ndarray:
    """log sum_e c_e v^e, given log v, scaled by the largest term per point."""
    items = [(c, float(e)) for e, c in terms.items() if c != 0]
    if not items:
        return np.full(np.shape(log_v), complex(-np.inf, 0.0))
    re = np.real(log_v)
    shift = np.max([e * re for _, e in items], axis=0)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        acc = sum(c * np.exp(e * log_v - shift) for c, e in items)
        out = np.log(acc) + shift
    return np.where(acc == 0, complex(-np.inf, 0.0), out)


def _radical_derivative(c: float, m: int, t: np.ndarray) -> np.ndarray:
    u = np.asarray(t, dtype=complex) + c
    su = np.sqrt(u)
    acc = np.zeros(np.shape(u), dtype=complex)
    for j, d in radical_coefficients(m):
        acc = acc + float(d) * (u ** (-j / 2.0) if j else 1.0)
    return np.exp(-su) * acc


def _power_derivative(p: Fraction, m: int, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=complex)
    pf = float(p)
    acc = np.zeros(np.shape(t), dtype=complex)
    for a, b, c in power_coefficients(p, m):
        e = pf * a - b
        acc = acc + float(c) * (t**e if e != 0 else 1.0)
    return np.exp(-(t**pf)) * acc


@dataclass(frozen=True, eq=True)
class Chi(SingleTerm):
    """e^{i alpha t} e^{-sqrt t}: singular transform at alpha, not C^1 at 0."""

    alpha: float = 0.0

    def base_derivative(self, m, t):
        return _radical_derivative(0.0, m, t)

    def base_log(self, t):
        return -np.sqrt(_complex_array(t))

    envelope_log = base_log

    def derivative_terms(self, m):
        return tuple((float(d), -j / 2) for j, d in radical_coefficients(m))

    def base_puiseux(self, qmax):
        out = {}
        b = 0
        while Fraction(b, 2) <= qmax:
            out[Fraction(b, 2)] = complex((-1) ** b / math.factorial(b))
            b += 1
        return out


@dataclass(frozen=True, eq=True)
class Phi(SingleTerm):
    """e^{i alpha t} e^{-sqrt(t+1)}: the smooth (Schwartz) modification of Chi."""

    alpha: float = 0.0

    def base_derivative(self, m, t):
        return _radical_derivative(1.0, m, t)

    def base_log(self, t):
        return -np.sqrt(_complex_array(t) + 1)

    envelope_log = base_log

    def poly_variable(self, t):
        return _complex_array(t) + 1

    def derivative_terms(self, m):
        return tuple((float(d), -j / 2) for j, d in radical_coefficients(m))

    def base_puiseux(self, qmax):
        out = {}
        q = 0
        while q <= qmax:
            val = math.exp(-1.0) * float(sum(d for _, d in radical_coefficients(q)))
            out[Fraction(q)] = complex(val / math.factorial(q))
            q += 1
        return out


@dataclass(frozen=True, eq=True)
class PsiP(SingleTerm):
    """e^{-t^p}; p in (0, 1) gives a singular point at 0, p > 1 an entire transform."""

    p: float = 0.5

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise DomainError(f"PsiP requires p > 0, got {self.p!r}")

    @property
    def natural_boundary_case(self) -> bool:
        return self.p < 1

    @property
    def entire_case(self) -> bool:
        return self.p > 1

    def base_derivative(self, m, t):
        return _power_derivative(_frac(self.p), m, t)

    def base_log(self, t):
        return -_power(t, self.p)

    envelope_log = base_log

    def derivative_terms(self, m):
        p = _frac(self.p)
        return tuple((float(c), float(p * a - b)) for a, b, c in power_coefficients(p, m))

    def base_puiseux(self, qmax):
        p = _frac(self.p)
        out = {}
        b = 0
        while p * b <= qmax:
            out[p * b] = out.get(p * b, 0j) + complex((-1) ** b / math.factorial(b))
            b += 1
        return out

    def sector_ok(self, angle):
        return abs(angle) < math.pi / 2 and abs(self.p * angle) < math.pi / 2


@dataclass(frozen=True, eq=True)
class XAlphaM(SingleTerm):
    """e^{i alpha t} exp(-t^{1/M^2}), M >= 2."""

    alpha: float = 0.0
    M: int = 2

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise DomainError(f"XAlphaM requires an integer M >= 2, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))

    @property
    def p(self) -> Fraction:
        return Fraction(1, self.M * self.M)

    def base_derivative(self, m, t):
        return _power_derivative(self.p, m, t)

    def base_log(self, t):
        return -_power(t, float(self.p))

    envelope_log = base_log

    def derivative_terms(self, m):
        return tuple((float(c), float(self.p * a - b)) for a, b, c in power_coefficients(self.p, m))

    def base_puiseux(self, qmax):
        return PsiP(float(self.p)).base_puiseux(qmax)

    def sector_ok(self, angle):
        return abs(angle) < math.pi / 2


@dataclass(frozen=True, eq=True)
class PolyExp(SingleTerm):
    """t^nu e^{-sigma t} with Re sigma > 0; transform has a pole at i*sigma."""

    nu: int = 0
    sigma: complex = 1.0 + 0j

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 0:
            raise DomainError(f"PolyExp requires integer nu >= 0, got {self.nu!r}")
        object.__setattr__(self, "nu", int(self.nu))
        object.__setattr__(self, "sigma", complex(self.sigma))
        if not self.sigma.real > 0:
            raise DomainError(f"PolyExp requires Re sigma > 0, got {self.sigma!r}")

    @property
    def linear_rate(self) -> complex:
        return -self.sigma

    @property
    def sublinear_decay(self) -> bool:
        return False

    def sector_ok(self, angle):
        return abs(angle) < math.pi / 2

    def base_derivative(self, m, t):
        t = np.asarray(t, dtype=complex)
        nu, s = self.nu, self.sigma
        acc = np.zeros(np.shape(t), dtype=complex)
        for r in range(min(m, nu) + 1):
            coef = math.comb(m, r) * math.perm(nu, r) * (-s) ** (m - r)
            acc = acc + coef * (t ** (nu - r) if nu - r else 1.0)
        return acc * np.exp(-s * t)

    def envelope_log(self, t):
        return -self.sigma * _complex_array(t)

    def derivative_terms(self, m):
        nu, s = self.nu, self.sigma
        return tuple(
            (math.comb(m, r) * math.perm(nu, r) * (-s) ** (m - r), nu - r) for r in range(min(m, nu) + 1)
        )

    def base_log(self, t):
        t = _complex_array(t)
        if self.nu == 0:
            return -self.sigma * t
        with np.errstate(divide="ignore"):
            return self.nu * np.log(t) - self.sigma * t

    def base_puiseux(self, qmax):
        out = {}
        j = 0
        while self.nu + j <= qmax:
            out[Fraction(self.nu + j)] = (-self.sigma) ** j / math.factorial(j)
            j += 1
        return out


@dataclass(frozen=True, eq=True)
class Combination(HalfLineFunction):
    """Finite linear combination; always flat and canonically ordered."""

    terms: tuple = field(default_factory=tuple)

    @property
    def distinguished_point(self) -> Optional[float]:
        points = {f.distinguished_point for _, f in self.terms}
        if not points:
            return 0.0
        return points.pop() if len(points) == 1 else None

    def puiseux(self, qmax: Fraction) -> dict[Fraction, complex]:
        out: dict[Fraction, complex] = {}
        for c, f in self.terms:
            for q, v in f.puiseux(qmax).items():
                out[q] = out.get(q, 0j) + c * v
        return out


def combine(terms: Iterable[tuple[complex, HalfLineFunction]]) -> Combination:
    """Flatten, merge duplicate members, drop zero coefficients, sort canonically."""
    merged: dict[SingleTerm, complex] = {}
    order: list[SingleTerm] = []

    def add(c: complex, f: HalfLineFunction):
        if isinstance(f, Combination):
            for c2, g in f.terms:
                add(c * c2, g)
            return
        if f not in merged:
            merged[f] = 0j
            order.append(f)
        merged[f] += c

    for c, f in terms:
        add(complex(c), f)
    kept = [(merged[f], f) for f in order if merged[f] != 0]
    kept.sort(key=lambda cf: format_function(cf[1]))
    return Combination(tuple(kept))


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


def _check_real_t(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError("catalog functions are defined for finite t >= 0")
    return arr


def _scalar_or_array(values: np.ndarray, like):
    return complex(values) if np.ndim(like) == 0 else values


def evaluate(f: HalfLineFunction, t):
    """Pointwise value f(t) for real t >= 0 (scalar or array)."""
    arr = _check_real_t(t)
    return _scalar_or_array(_derivative_values(f, 0, arr), t)


def _derivative_values(f: HalfLineFunction, k: int, t: np.ndarray) -> np.ndarray:
    """k-th derivative at (possibly complex) t, no domain checks."""
    if isinstance(f, Combination):
        acc = np.zeros(np.shape(t), dtype=complex)
        for c, g in f.terms:
            acc = acc + c * g.modulated_derivative(k, t)
        return acc
    return f.modulated_derivative(k, t)


@lru_cache(maxsize=4096)
def singular_at_zero(f: HalfLineFunction, k: int, weight_power: int = 0) -> bool:
    """
    True when t^weight_power * d^k f/dt^k is unbounded as t -> 0+.

    A term c t^q of the expansion at 0 contributes c (q)_k t^{q-k}; only
    non-integer q below ``k - weight_power`` can blow up.
    """
    qmax = Fraction(k)
    expansion = f.puiseux(qmax)
    scale = max((abs(v) for v in expansion.values()), default=0.0)
    for q, c in expansion.items():
        if q.denominator == 1:
            continue
        if q - k + weight_power < 0 and abs(c) > 1e-13 * max(scale, 1.0):
            return True
    return False


def _derivative_at_zero(f: HalfLineFunction, k: int) -> complex:
    if singular_at_zero(f, k):
        raise NotSmoothError(
            f"{format_function(f)} is not C^{k} at 0: its {k}-th derivative "
            "is unbounded as t -> 0+",
            order=k,
        )
    expansion = f.puiseux(Fraction(k))
    return complex(expansion.get(Fraction(k), 0j) * math.factorial(k))


def eval_derivative(f: HalfLineFunction, k: int, t):
    """
    Exact k-th derivative of f at real t >= 0.

    At t = 0 the value comes from the expansion at 0 and raises
    :class:`NotSmoothError` when the derivative blows up there.
    """
    if k < 0 or int(k) != k:
        raise DomainError(f"derivative order must be a nonnegative integer, got {k!r}")
    arr = _check_real_t(t)
    flat = arr.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    zero = flat == 0
    if zero.any():
        out[zero] = _derivative_at_zero(f, k)
    if (~zero).any():
        out[~zero] = _derivative_values(f, k, flat[~zero])
    return _scalar_or_array(out.reshape(arr.shape), t)


def log_evaluate(f: SingleTerm, t) -> np.ndarray:
    """Complex log of a single-term function, analytic in t off the cut."""
    t = np.asarray(t, dtype=complex)
    out = f.base_log(t)
    if f.alpha:
        out = out + 1j * f.alpha * t
    return out


# --------------------------------------------------------------------------
# closed forms and smoothness
# --------------------------------------------------------------------------


def closed_taylor_coeff(f: HalfLineFunction, n: int) -> Optional[LogComplex]:
    """
    Closed-form n-th derivative of the transform at the distinguished point.

    Chi      2 (-i)^n (2n+1)!
    PsiP     (-i)^n Gamma((n+1)/p) / p
    XAlphaM  (-i)^n M^2 (M^2 n + M^2 - 1)!
    PolyExp  (-i)^n (nu+n)! / sigma^(nu+n+1)
    Phi      no closed form (None); see continuation.phi_boundary_derivative
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    phase = -math.pi / 2 * (n % 4)
    if isinstance(f, Chi):
        return LogComplex(math.log(2.0) + math.lgamma(2 * n + 2), phase)
    if isinstance(f, PsiP):
        return LogComplex(math.lgamma((n + 1) / f.p) - math.log(f.p), phase)
    if isinstance(f, XAlphaM):
        m2 = f.M * f.M
        return LogComplex(math.log(m2) + math.lgamma(m2 * n + m2), phase)
    if isinstance(f, PolyExp):
        num = LogComplex(math.lgamma(f.nu + n + 1), phase)
        s = LogComplex.from_complex(f.sigma)
        k = f.nu + n + 1
        return num / LogComplex(k * s.log_abs, k * s.phase)
    if isinstance(f, Combination):
        if f.distinguished_point is None:
            return None
        parts = []
        for c, g in f.terms:
            v = closed_taylor_coeff(g, n)
            if v is None:
                return None
            parts.append(v * c)
        return log_sum(parts)
    return None


@dataclass(frozen=True)
class SmoothnessReport:
    function: HalfLineFunction
    schwartz_member: bool
    first_failing_derivative: Optional[int]


def smoothness_report(f: HalfLineFunction) -> SmoothnessReport:
    """
    Classify membership of f in the half-line Schwartz class.

    All families decay faster than any power, so membership is decided by
    smoothness at t = 0 alone.
    """
    for k in range(1, MAX_SMOOTHNESS_PROBE + 1):
        if singular_at_zero(f, k):
            return SmoothnessReport(f, False, k)
    return SmoothnessReport(f, True, None)


# --------------------------------------------------------------------------
# text form
# --------------------------------------------------------------------------

_FAMILY_KEYS = {
    "chi": ("alpha",),
    "phi": ("alpha",),
    "psi": ("p",),
    "x": ("alpha", "M"),
    "polyexp": ("nu", "sigma"),
}


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` style literals (signs optional, ``i`` or ``j``)."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("J", "j")
    if not s:
        raise ParseError("empty complex literal")
    s = s.replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ParseError(f"invalid complex literal {text!r}") from None


def _parse_real(text: str) -> float:
    try:
        if "/" in text:
            return float(Fraction(text.strip()))
        value = float(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"invalid real literal {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite literal {text!r}")
    return value


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"invalid integer literal {text!r}") from None


def _split_terms(body: str) -> list[str]:
    """Split ``(c1)*f1+(c2)*f2`` at top-level '+' signs that open a term."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            if depth == 0 and i > 0 and body[i - 1] == "+":
                parts.append(body[start : i - 1])
                start = i
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses")
    if depth:
        raise ParseError("unbalanced parentheses")
    parts.append(body[start:])
    return parts


_TERM_RE = re.compile(r"^\((?P<coef>[^()]*)\)\*(?P<spec>.+)$")


def parse_function(text: str) -> HalfLineFunction:
    """Parse the compact text form (see module docstring)."""
    text = text.strip()
    name, sep, body = text.partition(":")
    name = name.strip().lower()
    if not sep:
        raise ParseError(f"missing ':' in function spec {text!r}")
    if name == "sum":
        body = body.strip()
        if not body:
            return Combination(())
        terms = []
        for part in _split_terms(body):
            m = _TERM_RE.match(part.strip())
            if not m:
                raise ParseError(f"invalid sum term {part!r}; expected (c)*spec")
            inner = parse_function(m.group("spec"))
            if isinstance(inner, Combination):
                raise ParseError("nested sum is not allowed")
            terms.append((parse_complex(m.group("coef")), inner))
        return combine(terms)
    if name not in _FAMILY_KEYS:
        raise ParseError(f"unknown function family {name!r}")
    params: dict[str, str] = {}
    for item in filter(None, (s.strip() for s in _split_params(body))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ParseError(f"expected key=value, got {item!r}")
        key = key.strip()
        if key not in _FAMILY_KEYS[name]:
            raise ParseError(f"unknown parameter {key!r} for {name}")
        if key in params:
            raise ParseError(f"duplicate parameter {key!r}")
        params[key] = value.strip()
    missing = [k for k in _FAMILY_KEYS[name] if k not in params]
    if missing and not (name == "x" and missing == ["alpha"]):
        raise ParseError(f"missing parameter(s) {missing} for {name}")
    try:
        if name == "chi":
            return Chi(_parse_real(params["alpha"]))
        if name == "phi":
            return Phi(_parse_real(params["alpha"]))
        if name == "psi":
            return PsiP(_parse_real(params["p"]))
        if name == "x":
            return XAlphaM(_parse_real(params.get("alpha", "0")), _parse_int(params["M"]))
        return PolyExp(_parse_int(params["nu"]), parse_complex(params["sigma"]))
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def _split_params(body: str) -> list[str]:
    return body.split(",")


def format_function(f: HalfLineFunction) -> str:
    """Inverse of :func:`parse_function`; floats are written with repr."""
    if isinstance(f, Chi):
        return f"chi:alpha={f.alpha!r}"
    if isinstance(f, Phi):
        return f"phi:alpha={f.alpha!r}"
    if isinstance(f, PsiP):
        return f"psi:p={f.p!r}"
    if isinstance(f, XAlphaM):
        return f"x:alpha={f.alpha!r},M={f.M}"
    if isinstance(f, PolyExp):
        return f"polyexp:nu={f.nu},sigma={format_complex(f.sigma)}"
    if isinstance(f, Combination):
        return "sum:" + "+".join(
            f"({format_complex(c)})*{format_function(g)}" for c, g in f.terms
        )
    raise TypeError(f"not a catalog function: {f!r}")


FunctionLike = Union[HalfLineFunction, str]


def as_function(f: FunctionLike) -> HalfLineFunction:
    return parse_function(f) if isinstance(f, str) else f
