"""
Half-line Fourier-Laplace transform, boundary Taylor data, radius estimates
and the Schwartz seminorms.

The transform is ``F(z) = int_0^inf e^{-izt} f(t) dt`` for Im z <= 0 and its
derivatives are the moment integrals ``int e^{-izt} (-it)^n f(t) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .catalog import (
    Chi,
    Combination,
    HalfLineFunction,
    Phi,
    PsiP,
    SingleTerm,
    XAlphaM,
    _derivative_values,
    as_function,
    closed_taylor_coeff,
    eval_derivative,
    singular_at_zero,
)
from .errors import (
    BudgetExhausted,
    DomainError,
    InvalidContour,
    NotSmoothError,
    PrecisionLoss,
)
from .logdomain import LogComplex, log_factorial, log_sum
from .quadrature import (
    ContourSpec,
    choose_ray,
    integrate_halfline,
    _moment_integral,
)

__all__ = [
    "TaylorEntry",
    "TaylorTable",
    "RadiusEstimate",
    "SeminormValue",
    "IbpExpansion",
    "hft_eval",
    "hft_derivative",
    "hft_derivative_detail",
    "ibp_expansion",
    "taylor_table",
    "coefficient_K",
    "estimate_radius",
    "expected_growth_exponent",
    "seminorm_rho",
    "seminorm_rho_lk",
    "weighted_sup",
    "metric_rho",
    "DIVERGENT_SLOPE",
    "REGULAR_SLOPE",
    "DIVERGENT_RESIDUAL",
]

# Classification thresholds on the fitted growth exponent of log C_n vs log n.
DIVERGENT_SLOPE = 0.2
DIVERGENT_RESIDUAL = 0.1
REGULAR_SLOPE = 0.05
WINDOW = 5


# --------------------------------------------------------------------------
# derivatives of the transform
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivativeValue:
    value: LogComplex
    method: str  # "closed-form", "identity" or "quadrature"
    log_abs_error: float = -math.inf

    @property
    def rel_error(self) -> float:
        if self.value.is_zero:
            return 0.0 if self.log_abs_error == -math.inf else math.inf
        return math.exp(self.log_abs_error - self.value.log_abs)


def _at_distinguished(f: SingleTerm, z: complex) -> bool:
    return z.imag == 0 and z.real == f.distinguished_point


def _term_derivative(f: SingleTerm, n: int, z: complex, rel_tol: float, theta, prefer: str):
    if prefer != "quadrature" and _at_distinguished(f, z):
        if isinstance(f, Phi):
            from .continuation import phi_boundary_derivative

            return DerivativeValue(phi_boundary_derivative(n), "identity")
        return DerivativeValue(closed_taylor_coeff(f, n), "closed-form")
    try:
        contour = choose_ray(f, z, theta)
    except InvalidContour:
        if prefer == "closed":
            raise
        contour = ContourSpec("real-axis")
    res = _moment_integral(f, z, n, contour, rel_tol)
    return DerivativeValue(res.value, "quadrature", res.log_abs_error)


def hft_derivative_detail(
    f: HalfLineFunction,
    n: int,
    z: complex,
    rel_tol: float = 1e-10,
    *,
    theta="auto",
    prefer: str = "auto",
) -> DerivativeValue:
    """
    n-th derivative of the transform at z with the method used and an error
    estimate.

    ``prefer`` is "auto" (closed form at the distinguished point, quadrature
    elsewhere), "closed" (closed forms only) or "quadrature" (always
    integrate, even where a closed form exists).
    """
    f = as_function(f)
    z = complex(z)
    if z.imag > 0:
        raise DomainError("Im z > 0: the defining integral diverges; use the continuation module")
    if n < 0 or int(n) != n:
        raise DomainError("n must be a nonnegative integer")
    if prefer not in ("auto", "closed", "quadrature"):
        raise DomainError(f"unknown method preference {prefer!r}")
    terms = f.terms if isinstance(f, Combination) else ((1.0, f),)
    if prefer == "closed":
        for _, g in terms:
            if not _at_distinguished(g, z):
                raise DomainError(f"no closed form for {g} at z={z}")
    parts, methods, errs = [], set(), []
    for c, g in terms:
        d = _term_derivative(g, n, z, rel_tol, theta, prefer)
        parts.append(d.value * c)
        methods.add(d.method)
        if d.log_abs_error > -math.inf:
            errs.append(d.log_abs_error + math.log(abs(c)))
    value = log_sum(parts)
    log_err = log_sum([LogComplex(e) for e in errs]).log_abs if errs else -math.inf
    if "quadrature" in methods:
        method = "quadrature"
    elif "identity" in methods:
        method = "identity"
    else:
        method = "closed-form"
    out = DerivativeValue(value, method, log_err)
    if len(parts) > 1 and errs and out.rel_error > rel_tol:
        raise PrecisionLoss(
            f"cancellation between terms: relative error {out.rel_error:.2e} > {rel_tol:.1e}",
            best=out,
        )
    return out


def hft_derivative(
    f: HalfLineFunction, n: int, z: complex, rel_tol: float = 1e-10, **kw
) -> LogComplex:
    """n-th derivative of the transform at z (Im z <= 0) as a LogComplex."""
    return hft_derivative_detail(f, n, z, rel_tol, **kw).value


def hft_eval(f: HalfLineFunction, z: complex, rel_tol: float = 1e-10, **kw) -> LogComplex:
    """The transform itself, ``int_0^inf e^{-izt} f(t) dt`` for Im z <= 0."""
    return hft_derivative_detail(f, 0, z, rel_tol, **kw).value


# --------------------------------------------------------------------------
# integration by parts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IbpExpansion:
    boundary_terms: tuple  # f^{(j)}(0) / (iz)^{j+1}, j < k
    remainder: LogComplex  # (iz)^{-k} int e^{-izt} f^{(k)}(t) dt

    @property
    def total(self) -> LogComplex:
        return log_sum([LogComplex.from_complex(b) for b in self.boundary_terms] + [self.remainder])


def _derivative_transform(g: SingleTerm, k: int, z: complex, rel_tol: float) -> LogComplex:
    contour = choose_ray(g, z, "auto")
    rot = complex(np.exp(1j * contour.angle))

    def log_integrand(r):
        t = r * rot
        return -1j * z * t + g.log_modulated_derivative(k, t) + 1j * contour.angle

    return integrate_halfline(log_integrand, rel_tol, log_form=True, contour=contour).value


def ibp_expansion(f: HalfLineFunction, k: int, z: complex, rel_tol: float = 1e-10) -> IbpExpansion:
    """
    Split the transform into boundary terms f^{(j)}(0)/(iz)^{j+1} (j < k) and
    the remainder (iz)^{-k} int e^{-izt} f^{(k)}(t) dt.
    """
    f = as_function(f)
    z = complex(z)
    if k < 1:
        raise DomainError("k must be a positive integer")
    if z == 0 or z.imag > 0:
        raise DomainError("need z != 0 with Im z <= 0")
    for j in range(1, k + 1):
        if singular_at_zero(f, j):
            raise NotSmoothError(f"{f} is not C^{k} at 0 (fails at order {j})", order=j)
    iz = 1j * z
    boundary = tuple(complex(eval_derivative(f, j, 0.0)) / iz ** (j + 1) for j in range(k))
    terms = f.terms if isinstance(f, Combination) else ((1.0, f),)
    parts = [_derivative_transform(g, k, z, rel_tol) * c for c, g in terms]
    remainder = log_sum(parts) / LogComplex.from_complex(iz**k)
    return IbpExpansion(boundary, remainder)


# --------------------------------------------------------------------------
# Taylor tables
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorEntry:
    n: int
    derivative: Optional[LogComplex]
    C: Optional[float]
    method: str
    flagged: bool = False
    rel_error: float = 0.0

    @property
    def log_coefficient(self) -> float:
        """log |F^{(n)}(alpha) / n!|."""
        if self.derivative is None:
            return math.nan
        return self.derivative.log_abs - log_factorial(self.n)


def _c_from_derivative(n: int, d: Optional[LogComplex]) -> Optional[float]:
    if n < 1 or d is None:
        return None
    if d.is_zero:
        return 0.0
    return math.exp((d.log_abs - log_factorial(n)) / n)


@dataclass(frozen=True)
class TaylorTable:
    """
    Boundary derivatives F^{(n)}(alpha), n = 0..n_max, with
    C_n = (|F^{(n)}(alpha)| / n!)^{1/n}.
    """

    function: Optional[HalfLineFunction]
    alpha: complex
    entries: tuple
    n_max: int

    def __post_init__(self):
        if len(self.entries) != self.n_max + 1:
            raise ValueError("entries must cover n = 0..n_max")
        for i, e in enumerate(self.entries):
            if e.n != i:
                raise ValueError("entries out of order")
            expect = _c_from_derivative(e.n, e.derivative)
            if (expect is None) != (e.C is None) or (
                expect is not None and not math.isclose(expect, e.C, rel_tol=1e-12)
            ):
                raise ValueError(f"stored C at n={e.n} disagrees with its derivative")

    def __getitem__(self, n: int) -> TaylorEntry:
        return self.entries[n]

    def C(self, n: int) -> Optional[float]:
        return self.entries[n].C

    @classmethod
    def from_derivatives(cls, derivatives: Sequence[LogComplex], *, function=None,
                         alpha: complex = 0.0, method: str = "closed-form") -> "TaylorTable":
        entries = tuple(
            TaylorEntry(n, d, _c_from_derivative(n, d), method) for n, d in enumerate(derivatives)
        )
        return cls(function, alpha, entries, len(entries) - 1)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[LogComplex], *, function=None,
                          alpha: complex = 0.0, method: str = "cauchy") -> "TaylorTable":
        """Build from Taylor coefficients a_n = F^{(n)}(alpha)/n!."""
        derivs = [a * LogComplex(log_factorial(n)) for n, a in enumerate(coefficients)]
        return cls.from_derivatives(derivs, function=function, alpha=alpha, method=method)


def taylor_table(
    f: HalfLineFunction,
    alpha: float,
    n_max: int,
    method: str = "auto",
    rel_tol: float = 1e-10,
) -> TaylorTable:
    """
    Boundary Taylor data of the transform of f at the real point alpha.

    ``method`` is "auto", "closed" or "quadrature". Entries whose quadrature
    runs out of precision are flagged (best estimate kept, never invented).
    """
    f = as_function(f)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if method not in ("auto", "closed", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    z = complex(float(alpha), 0.0)
    entries = []
    for n in range(n_max + 1):
        try:
            d = hft_derivative_detail(f, n, z, rel_tol, prefer=method)
            entries.append(
                TaylorEntry(n, d.value, _c_from_derivative(n, d.value), d.method, False, d.rel_error)
            )
        except BudgetExhausted as exc:
            best = exc.best
            value = getattr(best, "value", None)
            rel = getattr(best, "rel_error", math.inf)
            if value is not None and hasattr(best, "rel_error_estimate"):
                rel = best.rel_error_estimate
            entries.append(TaylorEntry(n, value, _c_from_derivative(n, value), "quadrature", True, rel))
    return TaylorTable(f, z, tuple(entries), n_max)


def coefficient_K(table: TaylorTable, M: int, n: int) -> float:
    """K_M = C_n / n^M; K_0 is the stored C_n itself."""
    if not 1 <= n <= table.n_max:
        raise DomainError(f"n must lie in [1, {table.n_max}]")
    if M < 0:
        raise DomainError("M must be nonnegative")
    c = table.entries[n].C
    if c is None:
        raise DomainError(f"no derivative available at n={n}")
    if M == 0:
        return c
    return math.exp(math.log(c) - M * math.log(n)) if c > 0 else 0.0


# --------------------------------------------------------------------------
# radius of convergence
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RadiusEstimate:
    """
    Finite-budget reading of the Cauchy-Hadamard limsup.

    classification: "regular" (radius_hat set), "divergent" (coefficients
    grow like n^{growth_exponent_hat} in C_n) or "inconclusive".
    """

    classification: str
    radius_hat: Optional[float]
    growth_exponent_hat: float
    fit_window: tuple
    residual: float
    series_C: tuple = ()
    fit_points: tuple = ()

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "radius_hat": self.radius_hat,
            "growth_exponent_hat": self.growth_exponent_hat,
            "fit_window": list(self.fit_window),
            "residual": self.residual,
            "series_C": [[n, c] for n, c in self.series_C],
        }


def _windowed_maxima(ns: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the largest C_n = exp(y_n / n) in each sliding window."""
    logc = y / ns
    keep = set()
    half = WINDOW // 2
    for i in range(len(ns)):
        lo, hi = max(0, i - half), min(len(ns), i + half + 1)
        keep.add(lo + int(np.argmax(logc[lo:hi])))
    return np.array(sorted(keep))


def estimate_radius(table: TaylorTable, fit_range: Optional[tuple] = None) -> RadiusEstimate:
    """
    Classify the boundary point from the Taylor coefficients a_n.

    Fits log|a_n| = A + kappa log n + B n + G n log n over the windowed
    maxima of C_n. G is the asymptotic slope of log C_n against log n (the
    growth exponent); when it is negligible the radius is exp(-B) from the
    fit with G = 0.
    """
    if fit_range is None:
        fit_range = (max(1, table.n_max // 3), table.n_max)
    n_lo, n_hi = int(fit_range[0]), int(fit_range[1])
    if n_lo < 1 or n_hi > table.n_max or n_hi - n_lo < 8:
        raise DomainError("fit_range must lie in [1, n_max] and span at least 8")
    window = table.entries[n_lo : n_hi + 1]
    flagged = [e.n for e in window if e.flagged or e.derivative is None]
    if flagged:
        raise PrecisionLoss(f"flagged entries {flagged} inside the fit range; pick a cleaner range")
    series_C = tuple((e.n, e.C) for e in window)
    ns = np.array([e.n for e in window], dtype=float)
    y = np.array([e.log_coefficient for e in window])
    finite = np.isfinite(y)
    if not finite.any():
        return RadiusEstimate("regular", math.inf, 0.0, (n_lo, n_hi), 0.0, series_C)
    ns, y = ns[finite], y[finite]
    idx = _windowed_maxima(ns, y)
    ns, y = ns[idx], y[idx]
    logn = np.log(ns)
    cols = [np.ones_like(ns), logn, ns, ns * logn]
    if len(ns) < 6:
        cols.pop(1)
    X = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    growth = float(coef[-1])
    resid = float(np.sqrt(np.mean(((y - X @ coef) / ns) ** 2)))
    points = tuple(zip(ns.astype(int).tolist(), (y / ns).tolist()))
    if abs(growth) < REGULAR_SLOPE:
        X3 = X[:, :-1]
        c3, *_ = np.linalg.lstsq(X3, y, rcond=None)
        radius = math.exp(-float(c3[-1]))
        return RadiusEstimate("regular", radius, growth, (n_lo, n_hi), resid, series_C, points)
    if growth > DIVERGENT_SLOPE and resid < DIVERGENT_RESIDUAL:
        return RadiusEstimate("divergent", None, growth, (n_lo, n_hi), resid, series_C, points)
    return RadiusEstimate("inconclusive", None, growth, (n_lo, n_hi), resid, series_C, points)


def expected_growth_exponent(f: HalfLineFunction) -> Optional[float]:
    """
    Predicted slope of log C_n against log n from Stirling's formula:
    1/p - 1 for PsiP with p < 1, 1 for Chi, M^2 - 1 for XAlphaM.
    """
    if isinstance(f, Chi):
        return 1.0
    if isinstance(f, PsiP) and f.p < 1:
        return 1.0 / f.p - 1.0
    if isinstance(f, XAlphaM):
        return float(f.M * f.M - 1)
    return None


# --------------------------------------------------------------------------
# seminorms and the Frechet metric
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SeminormValue:
    value: float
    attained_at: Optional[float] = None


_GRID = np.concatenate([[0.0], np.geomspace(1e-10, 1e8, 1801)])
_GOLDEN = (math.sqrt(5) - 1) / 2


def _log_weighted(f, k, t, ell, shift):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        mag = np.log(np.abs(_derivative_values(f, k, t)))
        w = ell * np.log(t + shift) if ell else 0.0
    return w + mag


def _refine(f, k, ell, shift, lo, hi):
    """Golden-section search for the maximum on [lo, hi] in log t."""
    if lo <= 0:
        lo = hi * 1e-3
    a, b = math.log(lo), math.log(hi)
    obj = lambda s: float(_log_weighted(f, k, math.exp(s), ell, shift))
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(80):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = obj(d)
        if b - a < 1e-12:
            break
    s = c if fc > fd else d
    return max(fc, fd), math.exp(s)


def _weighted_limit_at_zero(f: HalfLineFunction, k: int, ell: int) -> complex:
    """lim_{t -> 0+} t^ell f^{(k)}(t), from the expansion at 0 (assumed bounded)."""
    total = 0j
    for q, c in f.puiseux(Fraction(k - ell)).items():
        if q - k + ell != 0:
            continue
        fall = 1.0
        for i in range(k):
            fall *= float(q) - i
        total += c * fall
    return total


def _sup(f: HalfLineFunction, k: int, ell: int, shift: float) -> tuple[float, Optional[float]]:
    """log sup_t (t + shift)^ell |f^{(k)}(t)| and the maximiser."""
    weight_at_zero = ell if shift == 0 else 0
    if singular_at_zero(f, k, weight_at_zero):
        return math.inf, 0.0
    t = _GRID
    vals = _log_weighted(f, k, t[1:], ell, shift)
    if shift == 0 and ell:
        at0 = _weighted_limit_at_zero(f, k, ell)
        v0 = math.log(abs(at0)) if at0 != 0 else -math.inf
    else:
        at0 = complex(eval_derivative(f, k, 0.0))
        v0 = ell * math.log(shift) if ell else 0.0
        v0 = v0 + (math.log(abs(at0)) if at0 != 0 else -math.inf)
    vals = np.concatenate([[v0], vals])
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    if not np.isfinite(vals[i]):
        return -math.inf, None
    if i == len(t) - 1:
        # still rising at the grid edge: extend outward on a log-log scale
        far = np.exp(np.linspace(math.log(t[-1]), 690.0, 2000))
        fv = _log_weighted(f, k, far, ell, shift)
        fv = np.where(np.isnan(fv), -np.inf, fv)
        j = int(np.argmax(fv))
        if j == len(far) - 1:
            return math.inf, None
        return _refine(f, k, ell, shift, far[max(j - 1, 0)], far[min(j + 1, len(far) - 1)])
    if i == 0:
        best, arg = vals[0], 0.0
        rv, ra = _refine(f, k, ell, shift, t[1] * 1e-3, t[1])
        return (rv, ra) if rv > best else (best, arg)
    rv, ra = _refine(f, k, ell, shift, t[i - 1], t[i + 1])
    return (rv, ra) if rv > vals[i] else (float(vals[i]), float(t[i]))


def weighted_sup(f: HalfLineFunction, ell: int, k: int = 0, shift: float = 1.0) -> SeminormValue:
    """sup_{t >= 0} (t + shift)^ell |d^k f/dt^k|; shift = 1 gives the (1+t)^ell weight."""
    f = as_function(f)
    lv, arg = _sup(f, k, ell, shift)
    if lv == -math.inf:
        return SeminormValue(0.0, arg)
    return SeminormValue(math.exp(lv) if lv < 709 else math.inf, arg)


def seminorm_rho(f: HalfLineFunction, ell: int) -> SeminormValue:
    """rho_ell(f) = sup{(1+t)^ell |f^{(k)}(t)| : k <= ell, t >= 0}."""
    f = as_function(f)
    if ell < 0:
        raise DomainError("ell must be nonnegative")
    best = SeminormValue(0.0, None)
    for k in range(ell + 1):
        v = weighted_sup(f, ell, k, 1.0)
        if v.value > best.value:
            best = v
        if best.value == math.inf:
            break
    return best


def seminorm_rho_lk(f: HalfLineFunction, ell: int, k: int) -> SeminormValue:
    """rho_{ell,k}(f) = sup_{t >= 0} t^ell |f^{(k)}(t)|."""
    if ell < 0 or k < 0:
        raise DomainError("ell and k must be nonnegative")
    return weighted_sup(f, ell, k, 0.0)


def metric_rho(f: HalfLineFunction, g: HalfLineFunction, L_max: int = 20) -> float:
    """
    Frechet metric sum_ell 2^{-ell} rho_ell(f-g) / (1 + rho_ell(f-g)),
    truncated after ell = L_max (neglected tail <= 2^{-L_max}).
    """
    f, g = as_function(f), as_function(g)
    diff = f - g
    if not diff.terms:
        return 0.0
    total = 0.0
    for ell in range(L_max + 1):
        r = seminorm_rho(diff, ell).value
        frac = 1.0 if r == math.inf else r / (1.0 + r)
        total += frac / 2.0**ell
    return total
