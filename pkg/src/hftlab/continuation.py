"""
Analytic continuations of the transforms of Chi(0), Phi(alpha) and PsiP(p)
across the real axis, principal-branch powers, Cauchy-integral Taylor
coefficients and the constant-verification protocol.

Series are summed in mpmath with the working precision raised to absorb
the cancellation between the large terms near the cut. Throughout,
``mu = i z`` so the excluded ray z in i[0, inf) becomes mu in (-inf, 0],
the principal branch cut of mu^q.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional, Sequence

import mpmath as mp
import numpy as np

from .catalog import Chi, Phi, PolyExp, PsiP, XAlphaM
from .errors import (
    AnalyticitySuspect,
    BudgetExhausted,
    CutProximityError,
    DomainError,
    VerificationFailure,
)
from .logdomain import LogComplex, log_factorial, log_sum
from .quadrature import erf_integral, integrate_halfline

__all__ = [
    "CUT_TOL",
    "CutPlanePoint",
    "SeriesEvaluation",
    "branch_power",
    "chi0_continuation",
    "phi_continuation",
    "psi_p_continuation",
    "phi_boundary_derivative",
    "cauchy_derivatives",
    "LedgerLine",
    "VerificationReport",
    "FROZEN_VARIANTS",
    "run_verification",
    "write_ledger",
    "read_ledger",
    "PROVENANCE_PATH",
]

CUT_TOL = 1e-8
VERIFY_RTOL = 1e-8
REFERENCE_MU = (0.5, 1.0, 2.0, 4.0)
PROVENANCE_PATH = Path(__file__).with_name("data") / "provenance.txt"


# --------------------------------------------------------------------------
# branches and points
# --------------------------------------------------------------------------


def branch_power(w: complex, q: float) -> complex:
    """Principal power w^q = exp(q (log|w| + i arg w)), arg w in (-pi, pi]."""
    w = complex(w)
    if w == 0:
        if q > 0:
            return 0j
        raise DomainError("0 raised to a nonpositive power")
    arg = math.atan2(w.imag, w.real)
    if arg == -math.pi:  # negative real axis with a signed-zero imaginary part
        arg = math.pi
    return cmath.exp(q * complex(math.log(math.hypot(w.real, w.imag)), arg))


def _mp_power(w, q):
    # mpmath's log already uses arg in (-pi, pi]
    return mp.exp(q * mp.log(w))


@dataclass(frozen=True)
class CutPlanePoint:
    """A point of the plane slit along the ray origin + i[0, inf)."""

    z: complex
    excluded_ray_origin: float = 0.0

    def __post_init__(self):
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        a = float(self.excluded_ray_origin)
        d = abs(z.real - a) if z.imag >= 0 else abs(z - a)
        if d <= CUT_TOL:
            raise CutProximityError(
                f"z={z} lies within {CUT_TOL:g} of the excluded ray {a}+i[0,inf)"
            )

    @property
    def w(self) -> complex:
        """Offset from the ray origin."""
        return self.z - self.excluded_ray_origin


def _point(z, origin: float = 0.0) -> CutPlanePoint:
    if isinstance(z, CutPlanePoint):
        if z.excluded_ray_origin != origin:
            raise DomainError("point was built for a different excluded ray")
        return z
    return CutPlanePoint(complex(z), origin)


@dataclass(frozen=True)
class SeriesEvaluation:
    value: LogComplex
    terms_used: int
    truncation_bound: float
    variant: str  # "printed" or "oracle-derived"

    def to_complex(self) -> complex:
        return self.value.to_complex()


def _to_log(x) -> LogComplex:
    x = mp.mpc(x)
    if x == 0:
        return LogComplex.zero()
    return LogComplex(float(mp.log(abs(x))), float(mp.arg(x)))


def _extra_digits(*log_sizes: float) -> int:
    return max(0, int(math.ceil(max(log_sizes) / math.log(10)))) + 5


# --------------------------------------------------------------------------
# chi_0
# --------------------------------------------------------------------------


def _chi0_series(mu, target):
    """
    S(mu) = sum (-1)^n / (4^n n! (2n+1)) mu^{-n} with a ratio tail bound.

    Consecutive term ratios are bounded by 1 / (4 (n+1) |mu|), so once that
    is below 1 the tail after the last term t_N is at most
    |t_N| q / (1 - q).
    """
    inv = 1 / (4 * mu)
    term = mp.mpc(1)
    total = mp.mpc(0)
    n = 0
    while True:
        total += term / (2 * n + 1)
        q = 1 / (4 * (n + 1) * abs(mu))
        last = abs(term) / (2 * n + 1)
        if q < 0.5:
            bound = last * q / (1 - q)
            if bound <= target * abs(total):
                return total, n + 1, bound
        term = -term * inv / (n + 1)
        n += 1
        if n > 100000:
            raise BudgetExhausted("chi0 series did not converge")


def _chi0_mp(mu, variant: str, rel: float = 1e-20):
    """Continuation of chi0-hat at z = -i mu, summed at adaptive precision."""
    lmu = float(mp.log(abs(mu)))
    lexp = float(mp.re(1 / (4 * mu)))
    extra = _extra_digits(lexp - 0.5 * lmu, 0.0)
    with mp.extradps(extra):
        mu = mp.mpc(mu)
        e = mp.exp(1 / (4 * mu))
        s, terms, bound = _chi0_series(mu, mp.mpf(rel) / 10)
        if variant == "oracle-derived":
            value = 1 / mu - mp.sqrt(mp.pi) / 2 * _mp_power(mu, -1.5) * e + e * s / (2 * mu**2)
            scale = abs(e) / (2 * abs(mu) ** 2)
        elif variant == "printed":
            value = 1 / mu + mp.sqrt(mp.pi) / 2 * _mp_power(mu, -1.5) * e - mp.sqrt(mp.pi) / 4 * e * s / mu**2
            scale = mp.sqrt(mp.pi) * abs(e) / (4 * abs(mu) ** 2)
        elif variant == "printed-z":
            z = mu / 1j
            value = (
                1 / mu
                + mp.sqrt(mp.pi) / 2 / (mu * _mp_power(mu, 0.5)) * e
                + mp.sqrt(mp.pi) / 4 / z**2 * e * s
            )
            scale = mp.sqrt(mp.pi) * abs(e) / (4 * abs(mu) ** 2)
        else:
            raise DomainError(f"unknown variant {variant!r}")
        return +value, terms, float(bound * scale)


def chi0_continuation(z, variant: str = "oracle-derived") -> SeriesEvaluation:
    """
    Continuation of the transform of Chi(0) to the plane minus i[0, inf).

    The default variant is the one frozen by the verification protocol;
    ``variant="printed"`` evaluates the typeset constants for comparison.
    """
    pt = _point(z, 0.0)
    mu = 1j * pt.z
    value, terms, bound = _chi0_mp(mp.mpc(mu), variant)
    return SeriesEvaluation(_to_log(value), terms, bound, "printed" if variant.startswith("printed") else variant)


# --------------------------------------------------------------------------
# phi_alpha
# --------------------------------------------------------------------------


def _entire_correction(w):
    """J(w) = int_0^1 e^{-iwt} e^{-sqrt t} dt = 2 int_0^1 s e^{-iws^2 - s} ds."""
    return mp.quad(lambda s: 2 * s * mp.exp(-1j * w * s * s - s), [0, 0.5, 1])


def _phi_mp(alpha: float, z):
    """Phi_alpha(z) = e^{iw} (chi0-hat(w) - J(w)) with w = z - alpha."""
    w = mp.mpc(z) - alpha
    lift = max(0.0, -float(mp.im(w)))  # |e^{iw}| = e^{-Im w}
    with mp.extradps(_extra_digits(lift)):
        w = mp.mpc(z) - alpha
        chi, _, _ = _chi0_mp(1j * w, "oracle-derived", rel=10.0 ** (-mp.mp.dps))
        return +(mp.exp(1j * w) * (chi - _entire_correction(w)))


def phi_continuation(alpha: float, z) -> LogComplex:
    """Continuation of the transform of Phi(alpha) to the plane minus alpha + i[0, inf)."""
    pt = _point(z, float(alpha))
    with mp.workdps(30):
        return _to_log(_phi_mp(float(alpha), mp.mpc(pt.z)))


def phi_boundary_derivative(n: int) -> LogComplex:
    """
    n-th derivative of the transform of Phi(alpha) at z = alpha.

    Substituting s = sqrt(t + 1) gives
    (-i)^n 2 sum_m C(n, m) (-1)^{n-m} Gamma(2m + 2, 1),
    with Gamma(k, 1) = (k-1)! e^{-1} sum_{j<k} 1/j!. The dominant term is
    m = n, so the alternating sum loses only a few digits.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    parts = []
    for m in range(n + 1):
        k = 2 * m + 2
        partial = math.fsum(math.exp(-math.lgamma(j + 1)) for j in range(k))
        log_t = (
            log_factorial(n) - log_factorial(m) - log_factorial(n - m)
            + math.lgamma(k) - 1.0 + math.log(partial)
        )
        parts.append(LogComplex(log_t, math.pi * ((n - m) % 2)))
    total = log_sum(parts)
    return total * LogComplex(math.log(2.0), -math.pi / 2 * n)


# --------------------------------------------------------------------------
# psi_p
# --------------------------------------------------------------------------


def _psi_series(p, mu, variant: str, max_terms: int, rel: float = 1e-20):
    """
    Sum one of the two candidate series for the continuation of PsiP(p).

    oracle-derived: sum (-1)^n Gamma(np+1) / (n! mu^{np+1})
    printed:        p^2 mu^{-p^2} sum (-1)^n Gamma((n+p)p) / (n! mu^{np})

    For 0 < p < 1 the term ratio is at most x^p / ((n+1) |mu|^p) with
    x = np+1 (resp. np + p^2), by Gamma(x+p) <= x^p Gamma(x), so both
    converge everywhere off the cut and the geometric tail bound applies
    once that ratio drops below 1/2.
    """
    p = mp.mpf(p)
    amu = abs(mu)
    log_peak = 0.0
    # size of the largest term relative to the leading one, for precision
    for n in range(0, max_terms, 5):
        x = n * float(p) + 1
        log_peak = max(log_peak, float(mp.loggamma(x) - mp.loggamma(n + 1)) - n * float(p) * math.log(float(amu)))
    with mp.extradps(_extra_digits(log_peak)):
        mu = mp.mpc(mu)
        lmu = mp.log(mu)
        total = mp.mpc(0)
        for n in range(max_terms):
            if variant == "oracle-derived":
                x = n * p + 1
                lt = mp.loggamma(x) - mp.loggamma(n + 1) - (n * p + 1) * lmu
            else:
                x = (n + p) * p
                lt = mp.loggamma(x) - mp.loggamma(n + 1) - n * p * lmu
            term = mp.exp(lt) * (-1) ** n
            total += term
            q = x**p / ((n + 1) * amu**p)
            if q < 0.5 and n >= 3:
                bound = abs(term) * q / (1 - q)
                if bound <= rel * abs(total):
                    break
        else:
            raise BudgetExhausted(
                f"psi series not converged in {max_terms} terms", best=total
            )
        if variant == "printed":
            pref = p * p * mp.exp(-p * p * lmu)
            total *= pref
            bound *= abs(pref)
        return +total, n + 1, float(bound)


def _psi_reference(p: float, mu: float) -> complex:
    return integrate_halfline(lambda t: np.exp(-mu * t - t**p), 1e-13).value.to_complex()


@lru_cache(maxsize=None)
def _psi_validated(p: float) -> str:
    """Variant of the PsiP series that reproduces quadrature on the reference grid."""
    passing = []
    for variant in ("printed", "oracle-derived"):
        ok = True
        for mu in REFERENCE_MU:
            ref = _psi_reference(p, mu)
            with mp.workdps(30):
                val, _, _ = _psi_series(p, mp.mpf(mu), variant, 400)
            if abs(complex(val) - ref) > VERIFY_RTOL * abs(ref):
                ok = False
                break
        if ok:
            passing.append(variant)
    if not passing:
        raise VerificationFailure(f"no PsiP({p}) series variant matches quadrature")
    return passing[0]


def psi_p_continuation(p: float, z, max_terms: int = 400) -> SeriesEvaluation:
    """
    Continuation of the transform of PsiP(p), 0 < p < 1, to the plane minus
    i[0, inf). Both candidate series are checked against quadrature on the
    reference grid; the one that passes is evaluated at z.
    """
    p = float(p)
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    if max_terms < 10:
        raise DomainError("max_terms must be >= 10")
    pt = _point(z, 0.0)
    variant = _psi_validated(p)
    with mp.workdps(30):
        value, terms, bound = _psi_series(p, mp.mpc(1j * pt.z), variant, max_terms)
    return SeriesEvaluation(_to_log(value), terms, bound, variant)


# --------------------------------------------------------------------------
# Cauchy-integral Taylor coefficients
# --------------------------------------------------------------------------


def cauchy_derivatives(
    g: Callable,
    sigma: complex,
    r: Optional[float] = None,
    n_max: int = 30,
    *,
    cut_origin: Optional[float] = None,
    dps: int = 50,
    rel_tol: float = 1e-12,
    max_nodes: int = 4096,
) -> list:
    """
    Taylor coefficients a_n = g^{(n)}(sigma)/n!, n = 0..n_max, from the
    trapezoid rule on the circle |w - sigma| = r.

    ``g`` receives mpmath complex numbers and is evaluated at ``dps``
    digits. The node count doubles until two successive rules agree to
    ``rel_tol``. Without ``r`` the radius is half the distance from sigma
    to the ray cut_origin + i[0, inf).
    """
    sigma = complex(sigma)
    if r is None:
        if cut_origin is None:
            raise DomainError("give r or the cut origin")
        w = sigma - cut_origin
        dist = abs(w.real) if w.imag >= 0 else abs(w)
        r = dist / 2
    if not r > 0:
        raise DomainError("r must be positive")
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    N = 64
    while N < 2 * (n_max + 1):
        N *= 2
    with mp.workdps(dps):
        s, rad = mp.mpc(sigma), mp.mpf(r)

        def samples(count):
            return [g(s + rad * mp.expjpi(mp.mpf(2 * k) / count)) for k in range(count)]

        def coeffs(vals):
            count = len(vals)
            tw = [mp.expjpi(-mp.mpf(2 * k) / count) for k in range(count)]
            out = []
            for n in range(n_max + 1):
                acc = mp.fsum(vals[k] * tw[(n * k) % count] for k in range(count))
                out.append(acc / count / rad**n)
            return out

        vals = samples(N)
        prev = coeffs(vals)
        while True:
            if 2 * N > max_nodes:
                raise AnalyticitySuspect(
                    f"coefficients not stable up to {max_nodes} nodes; is g analytic on the disc?",
                    best=[_to_log(a) for a in prev],
                )
            new = samples(2 * N)
            vals = [x for pair in zip(vals, new[1::2]) for x in pair]
            N *= 2
            cur = coeffs(vals)
            vmax = max(abs(v) for v in vals)
            floor = mp.mpf(10) ** (-dps + 3) * vmax
            ok = all(
                abs(a - b) <= rel_tol * abs(b) + floor / rad**n
                for n, (a, b) in enumerate(zip(prev, cur))
            )
            prev = cur
            if ok:
                return [_to_log(a) for a in cur]


# --------------------------------------------------------------------------
# constant-verification protocol and provenance ledger
# --------------------------------------------------------------------------

# Decisions the protocol reached, kept in code so evaluation never depends on
# a data file; the test suite reruns the protocol and compares.
FROZEN_VARIANTS = {
    "chi0.ibp_sign": "oracle-derived",
    "chi0.gaussian_tail": "oracle-derived",
    "chi0.closed_form": "oracle-derived",
    "chi0.mu_to_z": "printed",
    "chi0.derivative_law": "printed",
    "psi_p.substitution": "oracle-derived",
    "psi_p.series": "oracle-derived",
    "psi_p.derivative_law": "printed",
    "x.derivative_law": "printed",
    "polyexp.constant": "oracle-derived",
    "phi.modification_identity": "printed",
    "phi.boundary_identity": "oracle-derived",
}


@dataclass(frozen=True)
class LedgerLine:
    formula_id: str
    variant: str
    grid_point: str
    status: str  # PASS or FAIL
    abs_discrepancy: float

    def format(self) -> str:
        return f"{self.formula_id} {self.variant} {self.grid_point} {self.status} {self.abs_discrepancy:.3e}"

    @classmethod
    def parse(cls, line: str) -> "LedgerLine":
        fid, variant, grid, status, disc = line.split()
        return cls(fid, variant, grid, status, float(disc))


@dataclass
class VerificationReport:
    lines: list = field(default_factory=list)
    decisions: dict = field(default_factory=dict)

    def add(self, fid, variant, grid, candidate, reference, rtol=VERIFY_RTOL):
        disc = abs(complex(candidate) - complex(reference))
        ok = disc <= rtol * abs(complex(reference))
        self.lines.append(LedgerLine(fid, variant, grid, "PASS" if ok else "FAIL", disc))

    def passed(self, fid: str, variant: str) -> bool:
        rows = [l for l in self.lines if l.formula_id.split("[")[0] == fid and l.variant == variant]
        return bool(rows) and all(l.status == "PASS" for l in rows)

    def decide(self):
        ids = []
        for l in self.lines:
            base = l.formula_id.split("[")[0]
            if base not in ids:
                ids.append(base)
        for fid in ids:
            if self.passed(fid, "printed"):
                self.decisions[fid] = "printed"
            elif self.passed(fid, "oracle-derived"):
                self.decisions[fid] = "oracle-derived"
            else:
                self.decisions[fid] = "none"

    def format(self) -> str:
        out = [
            "# provenance ledger",
            "# <formula-id> <variant> <grid-point> <status> <abs-discrepancy>",
            f"# PASS means relative discrepancy <= {VERIFY_RTOL:g} against the defining integral",
            "# derivative laws are recorded as the ratio law/quadrature compared with 1",
        ]
        out += [l.format() for l in self.lines]
        out += [f"# decision {k} {v}" for k, v in self.decisions.items()]
        return "\n".join(out) + "\n"


def _zlabel(z: complex) -> str:
    return f"z={z.real:g}{z.imag:+g}i"


def _q(fn, rel=1e-13) -> complex:
    return integrate_halfline(fn, rel).value.to_complex()


def run_verification(grid: Sequence[float] = REFERENCE_MU) -> VerificationReport:
    """
    Check every printed closed form against quadrature of its defining
    integral at z = -i mu, mu in ``grid``, alongside the re-derived form.
    """
    from .transform import hft_derivative, hft_eval

    rep = VerificationReport()
    sqpi = math.sqrt(math.pi)
    for mu in grid:
        z = complex(0, -mu)
        g = _zlabel(z)
        ref = hft_eval(Chi(0.0), z, 1e-13, prefer="quadrature").to_complex()
        tail = _q(lambda s: np.exp(-mu * s * s - s))
        rep.add("chi0.ibp_sign", "printed", g, 1 / mu + tail / mu, ref)
        rep.add("chi0.ibp_sign", "oracle-derived", g, 1 / mu - tail / mu, ref)
        x = 0.5 / math.sqrt(mu)
        pre = mu**-1.5 * math.exp(0.25 / mu)
        rep.add("chi0.gaussian_tail", "printed", g, sqpi / 2 * pre * (1 - erf_integral(x)), tail / mu)
        rep.add("chi0.gaussian_tail", "oracle-derived", g, pre * (sqpi / 2 - erf_integral(x)), tail / mu)
        for variant in ("printed", "oracle-derived"):
            val, _, _ = _chi0_mp(mp.mpf(mu), variant)
            rep.add("chi0.closed_form", variant, g, complex(val), ref)
        zf, _, _ = _chi0_mp(mp.mpc(mu), "printed-z")
        mf, _, _ = _chi0_mp(mp.mpc(mu), "printed")
        rep.add("chi0.mu_to_z", "printed", g, complex(zf), complex(mf))

        for p in (Fraction(1, 3), Fraction(1, 2)):
            pf = float(p)
            tag = f"psi_p.substitution[p={p}]"
            ref = hft_eval(PsiP(pf), z, 1e-13).to_complex()
            printed = pf * _q(lambda s: _substituted(mu, pf, pf - 1, s))
            derived = _q(lambda s: _substituted(mu, pf, 1 / pf - 1, s)) / pf
            rep.add(tag, "printed", g, printed, ref)
            rep.add(tag, "oracle-derived", g, derived, ref)
            tag = f"psi_p.series[p={p}]"
            for variant in ("printed", "oracle-derived"):
                with mp.workdps(30):
                    val, _, _ = _psi_series(pf, mp.mpf(mu), variant, 400)
                rep.add(tag, variant, g, complex(val), ref)

        for nu in (0, 1, 2):
            sigma = 1.0
            tag = f"polyexp.constant[nu={nu}]"
            ref = hft_eval(PolyExp(nu, sigma), z, 1e-13, prefer="quadrature").to_complex()
            fact = math.factorial(nu)
            rep.add(tag, "printed", g, (-1j) ** nu * fact / (z - 1j * sigma) ** (nu + 1), ref)
            rep.add(tag, "oracle-derived", g, fact / (sigma + 1j * z) ** (nu + 1), ref)

        ref = hft_eval(Phi(0.0), z, 1e-13, prefer="quadrature").to_complex()
        rep.add("phi.modification_identity", "printed", g, phi_continuation(0.0, z).to_complex(), ref)

    for n in range(6):
        g = f"n={n}"
        law = LogComplex(math.log(2) + log_factorial(2 * n + 1), -math.pi / 2 * n)
        ref = hft_derivative(Chi(0.0), n, 0.0, 1e-13, prefer="quadrature")
        rep.add("chi0.derivative_law", "printed", g, _ratio(law, ref), 1.0)
        for p in (Fraction(1, 3), Fraction(1, 2)):
            pf = float(p)
            law = LogComplex(math.lgamma((n + 1) / pf) - math.log(pf), -math.pi / 2 * n)
            ref = hft_derivative(PsiP(pf), n, 0.0, 1e-13, prefer="quadrature")
            rep.add(f"psi_p.derivative_law[p={p}]", "printed", g, _ratio(law, ref), 1.0)
        for M in (2, 3):
            m2 = M * M
            law = LogComplex(math.log(m2) + log_factorial(m2 * n + m2 - 1), -math.pi / 2 * n)
            ref = hft_derivative(XAlphaM(0.0, M), n, 0.0, 1e-13, prefer="quadrature")
            rep.add(f"x.derivative_law[M={M}]", "printed", g, _ratio(law, ref), 1.0)
        ref = hft_derivative(Phi(0.0), n, 0.0, 1e-13, prefer="quadrature")
        rep.add("phi.boundary_identity", "oracle-derived", g, _ratio(phi_boundary_derivative(n), ref), 1.0)
    rep.decide()
    return rep


def _substituted(mu, p, power, s):
    """e^{-mu s^{1/p} - s} s^power, formed in the log domain to avoid inf * 0."""
    with np.errstate(over="ignore", divide="ignore"):
        return np.exp(-mu * s ** (1 / p) - s + power * np.log(s))


def _ratio(a: LogComplex, b: LogComplex) -> complex:
    """a / b as a complex number; discrepancies of huge values are compared relatively."""
    return (a / b).to_complex()


def write_ledger(path=None, report: Optional[VerificationReport] = None) -> VerificationReport:
    report = report or run_verification()
    path = Path(path) if path is not None else PROVENANCE_PATH
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.format(), encoding="utf-8")
    return report


def read_ledger(path=None) -> VerificationReport:
    path = Path(path) if path is not None else PROVENANCE_PATH
    rep = VerificationReport()
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("# decision "):
            _, _, fid, variant = line.split()
            rep.decisions[fid] = variant
        elif line and not line.startswith("#"):
            rep.lines.append(LedgerLine.parse(line))
    return rep
