"""
Finite-budget constructions behind the density arguments: perturbations that
force divergent Taylor coefficients, membership witnesses for the sets
Omega(alpha, N) = {g : C(g, alpha, n) > N for some n} and
Theta_M(alpha, N) = {g : K_M(g, alpha, n) > N for some n}, and the
factorial-gap inequality.

Every report is a statement about n <= n_budget only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .catalog import Combination, HalfLineFunction, Phi, XAlphaM, as_function, combine
from .errors import DomainError, NumericalError
from .logdomain import log_factorial
from .transform import TaylorTable, coefficient_K, seminorm_rho, taylor_table

__all__ = [
    "WitnessReport",
    "perturb",
    "omega_witness",
    "theta_witness",
    "factorial_gap_holds",
    "chain_link_holds",
    "factorial_gap_n0",
    "dense_grid_demo",
    "remark_equivalence_check",
    "GAP_SCAN_CAP",
]

GAP_SCAN_CAP = 10**6
GAP_RECHECK = 50


@dataclass(frozen=True)
class WitnessReport:
    """
    Outcome of scanning K_M(g, alpha, n) for n = 1..budget against N
    (M = 0 scans C itself).

    status is "witness", "no-witness" (every inspected value <= N) or
    "inconclusive" (a flagged entry came before any witness).
    """

    function: HalfLineFunction
    alpha: float
    N: float
    M: int
    witness_n: Optional[int]
    budget: int
    values: tuple  # values[n - 1] is the value at n; None where unavailable
    status: str
    table: Optional[TaylorTable] = field(default=None, repr=False, compare=False)

    @property
    def statement(self) -> str:
        name = "C" if self.M == 0 else f"K_{self.M}"
        if self.status == "witness":
            return f"{name}(n={self.witness_n}) > {self.N:g} (within budget n <= {self.budget})"
        if self.status == "no-witness":
            return f"{name}(n) <= {self.N:g} for all n <= {self.budget} (within budget only)"
        return f"inconclusive: flagged entries before any witness within budget n <= {self.budget}"

    def recheck(self) -> bool:
        """
        Re-derive the witness inequality from the stored derivative:
        log|F^(n)| - log n! > n (log N + M log n).
        """
        if self.witness_n is None or self.table is None:
            return False
        n = self.witness_n
        d = self.table.entries[n].derivative
        lhs = d.log_abs - log_factorial(n)
        return lhs > n * (math.log(self.N) + self.M * math.log(n))

    def to_dict(self) -> dict:
        from .catalog import format_function

        return {
            "function": format_function(self.function),
            "alpha": self.alpha,
            "N": self.N,
            "M": self.M,
            "witness_n": self.witness_n,
            "budget": self.budget,
            "status": self.status,
            "statement": self.statement,
            "values": list(self.values),
        }


def perturb(
    f: HalfLineFunction, alpha: float, j: int, kind: str = "phi", M: Optional[int] = None
) -> Combination:
    """f + (1/j) Phi(alpha), or f + (1/j) XAlphaM(alpha, M) for kind="xM"."""
    if int(j) != j or j < 1:
        raise DomainError("j must be a positive integer")
    f = as_function(f)
    if kind == "phi":
        g = Phi(float(alpha))
    elif kind == "xM":
        if M is None or int(M) != M or M < 2:
            raise DomainError("kind xM needs an integer M >= 2")
        g = XAlphaM(float(alpha), int(M))
    else:
        raise DomainError(f"unknown perturbation kind {kind!r}")
    return combine([(1.0, f), (1.0 / j, g)])


def _scan(f, alpha, N, M, n_budget, rel_tol) -> WitnessReport:
    if n_budget < 5:
        raise DomainError("n_budget must be >= 5")
    if not N > 0:
        raise DomainError("N must be positive")
    f = as_function(f)
    table = taylor_table(f, alpha, n_budget, "auto", rel_tol)
    values, witness, status = [], None, None
    for n in range(1, n_budget + 1):
        e = table.entries[n]
        if e.flagged or e.C is None:
            values.append(None)
            if witness is None and status is None:
                status = "inconclusive"
            continue
        v = coefficient_K(table, M, n)
        values.append(v)
        if witness is None and status is None and v > N:
            witness = n
    if witness is not None:
        status = "witness"
    elif status is None:
        status = "no-witness"
    return WitnessReport(f, float(alpha), N, M, witness, n_budget, tuple(values), status, table)


def omega_witness(f, alpha: float, N: float, n_budget: int, rel_tol: float = 1e-10) -> WitnessReport:
    """First n <= n_budget with C(f, alpha, n) > N, if any."""
    return _scan(f, alpha, N, 0, n_budget, rel_tol)


def theta_witness(f, alpha: float, N: float, M: int, n_budget: int, rel_tol: float = 1e-10) -> WitnessReport:
    """First n <= n_budget with K_M(f, alpha, n) > N, if any."""
    if int(M) != M or M < 0:
        raise DomainError("M must be a nonnegative integer")
    return _scan(f, alpha, N, int(M), n_budget, rel_tol)


# --------------------------------------------------------------------------
# factorial gap
# --------------------------------------------------------------------------


def _gap_margin(M: int, N: float, j: int, n: int) -> float:
    m2 = M * M
    lhs = math.log(m2) + math.lgamma(m2 * n + m2)
    rhs = math.log(2 * j) + n * math.log(N) + M * n * math.log(n) + log_factorial(n)
    return lhs - rhs


def factorial_gap_holds(M: int, N: float, j: int, n: int) -> bool:
    """M^2 (M^2 n + M^2 - 1)! >= 2j N^n n^{Mn} n!, in log-gamma arithmetic."""
    return _gap_margin(M, N, j, n) >= 0


def chain_link_holds(M: int, n: int) -> bool:
    """(M^2 n + M^2 - 1)! >= n! n^{M^2 n + M^2 - 1 - n}."""
    m2 = M * M
    return math.lgamma(m2 * n + m2) >= log_factorial(n) + (m2 * n + m2 - 1 - n) * math.log(n)


def factorial_gap_n0(M: int, N: float, j: int) -> int:
    """
    Least n0 >= 1 from which the factorial-gap inequality holds, found by an
    ascending scan and confirmed on [n0, n0 + 50].
    """
    if int(M) != M or M < 2:
        raise DomainError("M must be an integer >= 2")
    if N < 1 or j < 1:
        raise DomainError("need N >= 1 and j >= 1")
    n = 1
    while n <= GAP_SCAN_CAP:
        if factorial_gap_holds(M, N, j, n):
            bad = next(
                (m for m in range(n + 1, n + GAP_RECHECK + 1) if not factorial_gap_holds(M, N, j, m)),
                None,
            )
            if bad is None:
                return n
            n = bad + 1
        else:
            n += 1
    raise NumericalError(f"factorial gap scan reached n = {GAP_SCAN_CAP} without settling")


# --------------------------------------------------------------------------
# several points at once
# --------------------------------------------------------------------------


def _default_schedule(k: int, alpha: float) -> float:
    return 2.0**-k / (1.0 + seminorm_rho(Phi(alpha), 0).value)


def dense_grid_demo(
    f,
    A: Sequence[float],
    N: float,
    n_budget: int,
    schedule: Optional[Callable[[int, float], float]] = None,
    rel_tol: float = 1e-10,
) -> list:
    """
    Build g = f + sum_k eps_k Phi(alpha_k) (k = 1, 2, ...) and look for an
    Omega(alpha_k, N) witness at every alpha_k.

    If some alpha_k has no witness although f + eps_k Phi(alpha_k) alone
    does, the other contributions are cancelling it; their weights are
    halved and the scan is repeated once. Whatever remains is reported.
    """
    A = [float(a) for a in A]
    if len(set(A)) != len(A):
        raise DomainError("points of A must be distinct")
    if not 1 <= len(A) <= 16:
        raise DomainError("A must hold between 1 and 16 points")
    schedule = schedule or _default_schedule
    f = as_function(f)
    eps = [schedule(k, a) for k, a in enumerate(A, start=1)]

    def build(weights):
        return combine([(1.0, f)] + [(w, Phi(a)) for w, a in zip(weights, A)])

    g = build(eps)
    reports = [omega_witness(g, a, N, n_budget, rel_tol) for a in A]
    for k, rep in enumerate(reports):
        if rep.status != "no-witness":
            continue
        alone = omega_witness(combine([(1.0, f), (eps[k], Phi(A[k]))]), A[k], N, n_budget, rel_tol)
        if alone.status == "witness":
            eps = [w if i == k else w / 2 for i, w in enumerate(eps)]
            g = build(eps)
            return [omega_witness(g, a, N, n_budget, rel_tol) for a in A]
    return reports


def remark_equivalence_check(table: TaylorTable, M: int, n_probe: int) -> float:
    """
    K_M(n) / (e n^{-(M+1)} |F^(n)|^{1/n}); tends to 1 like n / (e (n!)^{1/n}).
    """
    if not 1 <= n_probe <= table.n_max:
        raise DomainError(f"n_probe must lie in [1, {table.n_max}]")
    d = table.entries[n_probe].derivative
    if d is None or d.is_zero:
        raise DomainError(f"no usable derivative at n={n_probe}")
    k = coefficient_K(table, M, n_probe)
    log_ref = 1.0 - (M + 1) * math.log(n_probe) + d.log_abs / n_probe
    return math.exp(math.log(k) - log_ref)
