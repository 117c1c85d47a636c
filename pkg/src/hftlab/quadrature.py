"""
Quadrature for half-line and finite integrals with log-domain accumulation.

Half-line integrals use the exp-sinh double-exponential map
``t = T * exp(pi/2 * sinh u)``, centred on the scale ``T`` where ``t |g(t)|``
peaks; finite segments use tanh-sinh with adaptive bisection. Both tolerate
integrable endpoint singularities such as the infinite slope of e^{-sqrt t}
at 0. Errors are estimated from the difference between successive step
halvings, floored by the round-off implied by the sum of |terms|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .catalog import SingleTerm
from .errors import (
    BudgetExhausted,
    DivergentTail,
    DomainError,
    InvalidContour,
    PrecisionLoss,
)
from .logdomain import LogComplex, log_sum_arrays

__all__ = [
    "ContourSpec",
    "QuadratureResult",
    "LogComplex",
    "REFINEMENT_SAFETY",
    "integrate_halfline",
    "integrate_rotated",
    "integrate_finite",
    "choose_ray",
    "erf_integral",
    "gauss_series",
]

EPS = np.finfo(float).eps
# Refining the node set never raises the error estimate by more than this.
REFINEMENT_SAFETY = 10.0
# Exp-sinh nodes are kept while |log t| stays below this (doubles end near 709).
_LOG_T_LIMIT = 690.0
_HALFLINE_U = math.asinh(2 * _LOG_T_LIMIT / math.pi) + 0.1
# Terms smaller than the largest by this many e-folds count as negligible.
_NEGLIGIBLE = 40.0
_MIN_LEVEL = 3
_DEFAULT_THETA = math.pi / 4


@dataclass(frozen=True)
class ContourSpec:
    """
    Integration path.

    ``kind`` is "real-axis", "rotated-ray" or "finite-segment". For a rotated
    ray ``theta`` lies in (0, pi/2) and ``direction`` is -1 for the ray
    arg t = -theta (below the axis) or +1 for arg t = +theta.
    """

    kind: str
    theta: float = 0.0
    direction: int = -1
    a: float = 0.0
    b: float = math.inf

    def __post_init__(self):
        if self.kind not in ("real-axis", "rotated-ray", "finite-segment"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.kind == "rotated-ray":
            if not 0 < self.theta < math.pi / 2:
                raise ValueError("rotated-ray needs theta in (0, pi/2)")
            if self.direction not in (-1, 1):
                raise ValueError("direction must be -1 or +1")
        if self.kind == "finite-segment" and not self.a < self.b:
            raise ValueError("finite-segment needs a < b")

    @property
    def angle(self) -> float:
        """arg t along the path (0 for the real axis)."""
        return self.direction * self.theta if self.kind == "rotated-ray" else 0.0

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "rotated-ray":
            d.update(theta=self.theta, direction=self.direction)
        if self.kind == "finite-segment":
            d.update(a=self.a, b=self.b)
        return d


@dataclass(frozen=True)
class QuadratureResult:
    """
    Integral value with an absolute error estimate.

    The estimate is kept on the log scale (``log_abs_error``) like the value,
    since both may exceed the double range; ``abs_error_estimate`` converts.
    """

    value: LogComplex
    log_abs_error: float
    nodes_used: int
    contour: ContourSpec
    error_history: tuple = ()

    @property
    def abs_error_estimate(self) -> float:
        return math.exp(self.log_abs_error) if self.log_abs_error > -math.inf else 0.0

    @property
    def rel_error_estimate(self) -> float:
        if self.value.is_zero:
            return 0.0 if self.log_abs_error == -math.inf else math.inf
        return math.exp(self.log_abs_error - self.value.log_abs)

    def to_dict(self) -> dict:
        return {
            "value": {"log_abs": self.value.log_abs, "phase": self.value.phase},
            "log_abs_error": self.log_abs_error,
            "nodes_used": self.nodes_used,
            "contour": self.contour.to_dict(),
        }


def _log_values(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(np.abs(values)) + 1j * np.angle(values)


def _find_scale(log_g: Callable[[np.ndarray], np.ndarray]) -> Optional[float]:
    """log of the t where t|g(t)| is largest on a coarse logarithmic grid."""
    log_t = np.linspace(-28.0, 28.0, 225)
    with np.errstate(all="ignore"):
        re = np.real(log_g(np.exp(log_t))) + log_t
    re = np.where(np.isnan(re), -np.inf, re)
    if not np.isfinite(re).any():
        return None
    i = int(np.argmax(re))
    if i == len(log_t) - 1 and re[i] > re[i - 1]:
        # still growing at t = e^28: widen the search on a log-log grid
        log_t = np.linspace(28.0, 600.0, 400)
        with np.errstate(all="ignore"):
            re2 = np.real(log_g(np.exp(log_t))) + log_t
        re2 = np.where(np.isnan(re2), -np.inf, re2)
        return float(log_t[int(np.argmax(re2))])
    return float(log_t[i])


def _expsinh_level(log_g, log_scale: float, h: float):
    k_max = int(math.ceil(_HALFLINE_U / h))
    u = h * np.arange(-k_max, k_max + 1)
    s = (math.pi / 2) * np.sinh(u)
    log_t = log_scale + s
    keep = np.abs(log_t) <= _LOG_T_LIMIT
    u, log_t = u[keep], log_t[keep]
    t = np.exp(log_t)
    log_w = math.log(h) + np.log((math.pi / 2) * np.cosh(u)) + log_t
    with np.errstate(all="ignore"):
        lg = np.asarray(log_g(t), dtype=complex)
    re = np.real(lg)
    # a vanishing term may carry a meaningless phase
    lg = np.where(re == -np.inf, complex(-np.inf, 0.0), lg)
    if np.any(np.isnan(re)) or np.any(re == np.inf):
        bad = np.isnan(re) | (re == np.inf)
        raise DivergentTail(
            f"integrand not finite at t = {t[bad][:3]} (envelope violated)"
        )
    terms = re + log_w
    value, log_mass = log_sum_arrays(terms, np.imag(lg))
    finite = np.isfinite(terms)
    if finite.any():
        top = terms[finite].max()
        for end in (terms[0], terms[-1]):
            if np.isfinite(end) and end > top - _NEGLIGIBLE:
                raise DivergentTail(
                    "integrand does not decay at the ends of the node set "
                    "(divergent tail or non-integrable endpoint)"
                )
    return value, log_mass, int(t.size)


def _log_diff(a: LogComplex, b: LogComplex) -> float:
    """log|a - b| without overflow."""
    d = a - b
    return d.log_abs


def integrate_halfline(
    integrand: Callable[[np.ndarray], np.ndarray],
    rel_tol: float = 1e-10,
    *,
    log_form: bool = False,
    scale: Optional[float] = None,
    max_level: int = 12,
    contour: Optional[ContourSpec] = None,
) -> QuadratureResult:
    """
    Integrate over [0, inf).

    Parameters
    ----------
    integrand : callable
        Vectorized in t > 0. Returns values, or their complex logarithms when
        ``log_form`` is set (so magnitudes beyond the double range survive).
    rel_tol : float
        Target relative error, in (0, 1).
    scale : float, optional
        Characteristic size of t; located automatically when omitted.

    Raises
    ------
    BudgetExhausted
        ``max_level`` halvings did not reach ``rel_tol``; ``best`` holds the
        last estimate. :class:`PrecisionLoss` when round-off is the cause.
    DivergentTail
        The integrand fails to decay at the ends of the node range.
    """
    if not 0 < rel_tol < 1:
        raise DomainError("rel_tol must lie in (0, 1)")
    log_g = integrand if log_form else (lambda t: _log_values(integrand(t)))
    contour = contour or ContourSpec("real-axis")
    log_scale = math.log(scale) if scale else _find_scale(log_g)
    if log_scale is None:
        return QuadratureResult(LogComplex.zero(), -math.inf, 1, contour)

    log_tol = math.log(rel_tol)
    prev = None
    history = []
    best = None
    for level in range(max_level + 1):
        h = 2.0**-level
        value, log_mass, n = _expsinh_level(log_g, log_scale, h)
        if value.is_zero and log_mass == -math.inf:
            return QuadratureResult(value, -math.inf, n, contour, tuple(history))
        floor = math.log(8 * EPS) + log_mass
        if prev is not None:
            log_err = max(_log_diff(value, prev), floor)
            history.append(log_err)
            best = QuadratureResult(value, log_err, n, contour, tuple(history))
            if level >= _MIN_LEVEL and log_err <= log_tol + value.log_abs:
                return best
            if level >= _MIN_LEVEL and floor > log_tol + value.log_abs:
                stalled = _log_diff(value, prev) <= floor + math.log(4.0)
                if stalled:
                    raise PrecisionLoss(
                        f"cancellation: round-off floor {math.exp(floor - value.log_abs):.2e} "
                        f"exceeds rel_tol {rel_tol:.1e}",
                        best=best,
                    )
        prev = value
    raise BudgetExhausted(
        f"no convergence to rel_tol {rel_tol:.1e} within {max_level} halvings",
        best=best,
    )


# --------------------------------------------------------------------------
# rotated moment integrals
# --------------------------------------------------------------------------


def _linear_coefficient(f: SingleTerm, z: complex) -> complex:
    """Coefficient a of the integrand's exponential factor e^{a t}."""
    return -1j * z + 1j * f.alpha + f.linear_rate


def _ray_ok(f: SingleTerm, a: complex, angle: float) -> bool:
    if not f.sector_ok(angle):
        return False
    rate = (a * cmath.exp(1j * angle)).real
    tiny = 1e-14 * max(1.0, abs(a))
    if rate < -tiny:
        return True
    return abs(rate) <= tiny and f.sublinear_decay


def choose_ray(f: SingleTerm, z: complex, theta="auto") -> ContourSpec:
    """
    Pick the integration path for the moment integral of f at z.

    With a numeric ``theta`` the direction (below/above the axis) giving the
    stronger decay is used. ``"auto"`` takes the steepest-descent angle for
    the exponential factor, clipped to the family's sector of validity.
    """
    a = _linear_coefficient(f, z)
    if theta == "auto":
        if abs(a) == 0:
            return ContourSpec("real-axis")
        angle = -math.pi - math.atan2(a.imag, a.real)
        angle = (angle + math.pi) % (2 * math.pi) - math.pi
        limit = math.pi / 2 - 0.05
        p = getattr(f, "p", None)
        if p is not None and float(p) > 1:
            limit = min(limit, 0.9 * math.pi / (2 * float(p)))
        angle = max(-limit, min(limit, angle))
        if abs(angle) < 1e-3:
            return ContourSpec("real-axis")
        direction = 1 if angle > 0 else -1
        spec = ContourSpec("rotated-ray", abs(angle), direction)
        if not _ray_ok(f, a, spec.angle):
            raise InvalidContour(f"no admissible ray for {f} at z={z}")
        return spec
    theta = float(theta)
    if theta == 0:
        if not _ray_ok(f, a, 0.0):
            raise InvalidContour(f"integrand of {f} at z={z} does not decay on the real axis")
        return ContourSpec("real-axis")
    if not 0 < theta < math.pi / 2:
        raise InvalidContour("theta must lie in (0, pi/2)")
    rates = {d: (a * cmath.exp(1j * d * theta)).real for d in (-1, 1)}
    order = sorted((-1, 1), key=lambda d: (rates[d], d != -1))
    for d in order:
        if _ray_ok(f, a, d * theta):
            return ContourSpec("rotated-ray", theta, d)
    raise InvalidContour(
        f"ray arg t = +-{theta:.4g} is not admissible for {f} at z={z} "
        "(sector of analyticity or decay condition fails)"
    )


def integrate_rotated(
    f: SingleTerm,
    z: complex,
    n: int,
    theta=_DEFAULT_THETA,
    rel_tol: float = 1e-10,
    max_level: int = 12,
) -> QuadratureResult:
    """
    n-th derivative of the transform of ``f`` at ``z``,
    int_0^inf e^{-izt} (-it)^n f(t) dt, computed on a rotated ray.

    The ray t = r e^{+-i theta} turns the oscillation of e^{-izt} into decay;
    by Cauchy's theorem the value equals the real-axis integral.
    """
    if not isinstance(f, SingleTerm):
        raise TypeError("integrate_rotated takes a single catalog family member")
    z = complex(z)
    if z.imag > 0:
        raise DomainError("Im z must be <= 0 (use the continuation module above the axis)")
    if n < 0:
        raise DomainError("n must be nonnegative")
    return _moment_integral(f, z, n, choose_ray(f, z, theta), rel_tol, max_level)


_LD = np.longdouble
_TWO_PI_LD = 2 * np.arccos(_LD(-1))
_EPS_LD = np.finfo(_LD).eps


def _moment_log_integrand(f: SingleTerm, z: complex, n: int, angle: float, dtype):
    """
    log of e^{-izt} (-it)^n f(t) dt/dr on t = r e^{i angle}.

    The phase of e^{-i(z - alpha)t} reaches ~1e7 rad for large n, so that
    factor is formed and reduced mod 2 pi in extended precision.
    """
    w = complex(z) - f.alpha
    ca, sa = np.cos(_LD(angle)), np.sin(_LD(angle))
    wr, wi = _LD(w.real), _LD(w.imag)
    c_re, c_im = wi * ca + wr * sa, wi * sa - wr * ca
    rot = np.exp(1j * _LD(angle)).astype(np.clongdouble) if dtype is _LD else cmath.exp(1j * angle)
    cdtype = np.clongdouble if dtype is _LD else complex
    dir_phase = angle - math.pi / 2

    def log_integrand(r):
        rl = np.asarray(r, dtype=_LD)
        lin = (c_re * rl).astype(dtype) + 1j * np.fmod(c_im * rl, _TWO_PI_LD).astype(dtype)
        t = (rl * rot).astype(cdtype)
        out = lin + f.base_log(t) + 1j * angle
        if n:
            out = out + n * (np.log(rl).astype(dtype) + 1j * dir_phase)
        return out

    return log_integrand


def _moment_integral(
    f: SingleTerm, z: complex, n: int, contour: ContourSpec, rel_tol: float, max_level: int = 12
) -> QuadratureResult:
    log_integrand = _moment_log_integrand(f, z, n, contour.angle, float)
    try:
        return integrate_halfline(
            log_integrand, rel_tol, log_form=True, max_level=max_level, contour=contour
        )
    except PrecisionLoss as exc:
        scale = _find_scale(log_integrand)
        return _extended_halfline(
            _moment_log_integrand(f, z, n, contour.angle, _LD), scale, rel_tol, max_level, contour, exc
        )


def _extended_halfline(log_g, log_scale, rel_tol, max_level, contour, exc) -> QuadratureResult:
    """
    Exp-sinh rule evaluated and summed in long double, for integrals whose
    cancellation defeats double precision.
    """
    prev = None
    shift = None
    history = []
    best = exc.best
    for level in range(max_level + 1):
        h = _LD(2.0) ** -level
        k_max = int(math.ceil(_HALFLINE_U / float(h)))
        u = h * np.arange(-k_max, k_max + 1, dtype=_LD)
        log_t = _LD(log_scale) + (np.pi / 2) * np.sinh(u)
        keep = np.abs(log_t) <= _LOG_T_LIMIT
        u, log_t = u[keep], log_t[keep]
        log_w = np.log(h) + np.log((np.arccos(_LD(-1)) / 2) * np.cosh(u)) + log_t
        with np.errstate(all="ignore"):
            lg = log_g(np.exp(log_t)) + log_w
        re = lg.real
        lg = np.where(re == -np.inf, -np.inf, lg)
        if not np.all(np.isfinite(re) | (re == -np.inf)):
            raise exc
        if shift is None:
            # one common scale so successive levels compare directly
            shift = re.max()
        terms = np.exp(lg - shift)
        value_ld = terms.sum()
        mass = np.abs(terms).sum()
        a = abs(value_ld)
        value = (
            LogComplex.zero()
            if a == 0
            else LogComplex(float(np.log(a) + shift), float(np.arctan2(value_ld.imag, value_ld.real)))
        )
        floor = float(np.log(8 * _EPS_LD * mass) + shift)
        if prev is not None:
            diff = abs(value_ld - prev)
            log_err = max(float(np.log(diff) + shift) if diff > 0 else -math.inf, floor)
            history.append(log_err)
            best = QuadratureResult(value, log_err, int(u.size), contour, tuple(history))
            if level >= _MIN_LEVEL and log_err <= math.log(rel_tol) + value.log_abs:
                return best
        prev = value_ld
    raise PrecisionLoss(
        f"extended-precision pass did not reach rel_tol {rel_tol:.1e}", best=best
    )


# --------------------------------------------------------------------------
# finite segments
# --------------------------------------------------------------------------

_FINITE_U = 4.0


def _tanhsinh_level(g, a: float, b: float, h: float):
    half = 0.5 * (b - a)
    k_max = int(math.ceil(_FINITE_U / h))
    u = h * np.arange(-k_max, k_max + 1)
    s = (math.pi / 2) * np.sinh(u)
    cs = np.cosh(s)
    # distance to the nearer endpoint without cancellation
    gap = half * np.exp(-np.abs(s)) / cs
    x = np.where(s < 0, a + gap, b - gap)
    w = h * half * (math.pi / 2) * np.cosh(u) / cs**2
    ok = (gap > 0) & (w > 0)
    vals = np.asarray(g(x[ok]), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise BudgetExhausted("integrand not finite inside the segment")
    terms = w[ok] * vals
    return complex(terms.sum()), float(np.abs(terms).sum()), int(ok.sum())


def _finite_panel(g, a, b, abs_tol, rel_tol, max_level):
    prev = None
    for level in range(max_level + 1):
        value, mass, n = _tanhsinh_level(g, a, b, 2.0**-level)
        if prev is not None:
            err = max(abs(value - prev), 8 * EPS * mass)
            if level >= _MIN_LEVEL and err <= max(abs_tol, rel_tol * abs(value)):
                return value, err, n, True
        prev = value
    return value, err, n, False


def integrate_finite(
    integrand: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    max_depth: int = 12,
    max_level: int = 7,
) -> QuadratureResult:
    """
    Integrate over [a, b] by tanh-sinh panels, bisecting panels that do not
    converge. Integrable endpoint singularities are fine.
    """
    a, b = float(a), float(b)
    if not a < b:
        raise DomainError("integrate_finite needs a < b")
    if not 0 < rel_tol < 1:
        raise DomainError("rel_tol must lie in (0, 1)")
    contour = ContourSpec("finite-segment", a=a, b=b)
    whole, err, n, ok = _finite_panel(integrand, a, b, 0.0, rel_tol, max_level)
    if ok:
        return QuadratureResult(LogComplex.from_complex(whole), _safe_log(err), n, contour)

    abs_tol = rel_tol * max(abs(whole), EPS)
    total, total_err, nodes = 0j, 0.0, 0
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        v, e, k, ok = _finite_panel(
            integrand, lo, hi, abs_tol * (hi - lo) / (b - a), rel_tol, max_level
        )
        nodes += k
        if ok or depth >= max_depth:
            if not ok:
                raise BudgetExhausted(
                    f"segment [{lo}, {hi}] did not converge at bisection depth {depth}",
                    best=QuadratureResult(
                        LogComplex.from_complex(total + v), _safe_log(total_err + e), nodes, contour
                    ),
                )
            total += v
            total_err += e
            continue
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi, depth + 1))
        stack.append((lo, mid, depth + 1))
    return QuadratureResult(LogComplex.from_complex(total), _safe_log(total_err), nodes, contour)


def _safe_log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


# --------------------------------------------------------------------------
# Gaussian integral int_0^x e^{-u^2} du
# --------------------------------------------------------------------------

_ERF_SWITCH = 5.0
_HALF_SQRT_PI = 0.5 * math.sqrt(math.pi)


def gauss_series(x, terms: Optional[int] = None):
    """
    Alternating Maclaurin series sum_n (-1)^n x^{2n+1} / (n! (2n+1)).

    Works for complex ``x``. Without ``terms`` it sums until the terms stop
    mattering; accuracy degrades for |x| >~ 3 through cancellation.
    """
    total = 0j if isinstance(x, complex) else 0.0
    term = x  # x^{2n+1} (-1)^n / n!
    x2 = x * x
    n = 0
    while True:
        contrib = term / (2 * n + 1)
        total += contrib
        n += 1
        if terms is not None:
            if n >= terms:
                break
        elif abs(contrib) <= 1e-17 * abs(total) and n > abs(x2):
            break
        term = -term * x2 / n
    return total


def erf_integral(x: float) -> float:
    """
    int_0^x e^{-u^2} du for real x.

    |x| <= 5: Maclaurin series of e^{x^2} times the integral, whose terms are
    all positive (no cancellation). Beyond: sqrt(pi)/2 minus the asymptotic
    expansion of the complementary tail.
    """
    x = float(x)
    if math.isnan(x):
        raise DomainError("x is NaN")
    if x < 0:
        return -erf_integral(-x)
    if x == 0:
        return 0.0
    if math.isinf(x):
        return _HALF_SQRT_PI
    if x <= _ERF_SWITCH:
        x2 = x * x
        term = x
        total = x
        n = 0
        while term > 1e-17 * total:
            n += 1
            term *= 2 * x2 / (2 * n + 1)
            total += term
        return math.exp(-x2) * total
    return _HALF_SQRT_PI - _gauss_tail(x)


def _gauss_tail(x: float) -> float:
    """int_x^inf e^{-u^2} du by its asymptotic expansion (x > 5)."""
    inv = 1.0 / (2 * x * x)
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = -term * (2 * k - 1) * inv
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-18:
            break
        term = nxt
        total += term
    return math.exp(-x * x) / (2 * x) * total
