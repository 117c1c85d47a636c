"""
Command-line front end.

Usage:
    hftlab eval --function polyexp:nu=0,sigma=1 --z 0+0i
    hftlab taylor --function chi:alpha=0 --alpha 0 --nmax 40 --output csv
    hftlab radius --function polyexp:nu=0,sigma=2 --alpha 1 --nmax 60
    hftlab radius --function phi:alpha=0 --sigma 2 --r 0.5 --nmax 60
    hftlab continue --function chi:alpha=0 --z 1+1i
    hftlab perturb --function polyexp:nu=0,sigma=1 --alpha 0 --j 10 --metric
    hftlab witness --function chi:alpha=0 --alpha 0 --N 10 --budget 30
    hftlab gap --M 2 --N 3 --j 5
    hftlab verify --ledger provenance.txt
    hftlab report --function x:alpha=0,M=2 --alpha 0

Exit status: 0 on success (including inconclusive results, which carry
"status": "inconclusive"), 2 for invalid input, 3 for numerical failure.
Errors are reported as one JSON line on stderr. The default tolerance can
be set with the HFTLAB_TOL environment variable.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .catalog import (
    Chi,
    Combination,
    Phi,
    PolyExp,
    PsiP,
    XAlphaM,
    format_function,
    parse_complex,
    parse_function,
    smoothness_report,
)
from .errors import DomainError, HftError, NumericalError, ParseError
from .serialize import SCHEMA_VERSION, dumps, radius_csv, taylor_csv

__all__ = ["main", "build_parser", "run"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

_FORMULA_IDS = {
    Chi: "chi0.derivative_law",
    PsiP: "psi_p.derivative_law",
    XAlphaM: "x.derivative_law",
    PolyExp: "polyexp.constant",
    Phi: "phi.boundary_identity",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_tol() -> float:
    raw = os.environ.get("HFTLAB_TOL")
    if raw is None:
        return 1e-10
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"HFTLAB_TOL is not a number: {raw!r}")
    if not 0 < tol < 1:
        raise UsageError("HFTLAB_TOL must lie in (0, 1)")
    return tol


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hftlab", description="Half-line Fourier-Laplace transform toolkit")
    p.add_argument("--version", action="version", version=f"hftlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, function=True):
        if function:
            sp.add_argument("--function", required=True, help="function spec, e.g. chi:alpha=0")
        sp.add_argument("--output", choices=("json", "csv"), default="json")
        sp.add_argument("--out", dest="out_path", default=None, help="write payload to this file")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--no-timestamp", action="store_true")

    sp = sub.add_parser("eval", help="transform or its n-th derivative at z (Im z <= 0)")
    common(sp)
    sp.add_argument("--z", required=True)
    sp.add_argument("--n", type=int, default=0)

    sp = sub.add_parser("taylor", help="boundary Taylor table at a real point")
    common(sp)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--method", choices=("auto", "closed", "quadrature"), default="auto")

    sp = sub.add_parser("radius", help="radius-of-convergence estimate")
    common(sp)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--nmax", type=int, default=40)
    sp.add_argument("--fit-lo", type=int, default=None)
    sp.add_argument("--fit-hi", type=int, default=None)
    sp.add_argument("--sigma", default=None, help="expand the continuation at this point instead")
    sp.add_argument("--r", type=float, default=None, help="Cauchy circle radius (with --sigma)")

    sp = sub.add_parser("continue", help="analytic continuation across the real axis")
    common(sp)
    sp.add_argument("--z", required=True)

    sp = sub.add_parser("perturb", help="f + (1/j) Phi(alpha) or f + (1/j) X(alpha, M)")
    common(sp)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--kind", choices=("phi", "xM"), default="phi")
    sp.add_argument("--M", type=int, default=None)
    sp.add_argument("--metric", action="store_true", help="also report the distance to f")
    sp.add_argument("--lmax", type=int, default=20)

    sp = sub.add_parser("witness", help="search for C or K_M above N within a budget")
    common(sp)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--N", type=float, required=True)
    sp.add_argument("--M", type=int, default=0)
    sp.add_argument("--budget", type=int, default=30)

    sp = sub.add_parser("gap", help="least n0 of the factorial-gap inequality")
    common(sp, function=False)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--N", type=float, required=True)
    sp.add_argument("--j", type=int, required=True)

    sp = sub.add_parser("verify", help="run the constant-verification protocol")
    common(sp, function=False)
    sp.add_argument("--ledger", default="provenance.txt", help="where to write the ledger")

    sp = sub.add_parser("report", help="smoothness, growth law and radius summary")
    common(sp)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--nmax", type=int, default=40)
    return p


def _provenance(f=None, methods=()) -> dict:
    formulas = {}
    if f is not None:
        from .continuation import FROZEN_VARIANTS

        terms = f.terms if isinstance(f, Combination) else ((1.0, f),)
        for _, g in terms:
            fid = _FORMULA_IDS.get(type(g))
            if fid:
                formulas[fid] = FROZEN_VARIANTS[fid]
    methods = sorted(set(methods))
    return {
        "package": "hftlab",
        "version": __version__,
        "methods": methods,
        "closed_form": [m for m in methods if m in ("closed-form", "identity")],
        "quadrature": "quadrature" in methods,
        "formulas": formulas,
    }


def _require(cond: bool, message: str):
    if not cond:
        raise DomainError(message)


def _cmd_eval(a, tol):
    from .transform import hft_derivative_detail

    f = parse_function(a.function)
    z = parse_complex(a.z)
    _require(a.n >= 0, "--n must be nonnegative")
    d = hft_derivative_detail(f, a.n, z, tol)
    payload = {
        "function": format_function(f),
        "z": z,
        "n": a.n,
        "value": d.value,
        "rel_error": d.rel_error,
        "method": d.method,
    }
    try:
        payload["complex"] = d.value.to_complex()
    except OverflowError:
        pass
    return payload, _provenance(f, [d.method]), None


def _cmd_taylor(a, tol):
    from .transform import taylor_table

    f = parse_function(a.function)
    _require(a.nmax >= 1, "--nmax must be >= 1")
    table = taylor_table(f, a.alpha, a.nmax, a.method, tol)
    status = "inconclusive" if any(e.flagged for e in table.entries) else "ok"
    return {"status": status, "table": table}, _provenance(f, [e.method for e in table.entries]), taylor_csv(table)


def _continuation_function(f):
    """Analytic evaluator (mpmath in, mpmath out) for the Cauchy route, with its cut origin."""
    from . import continuation as cont

    if isinstance(f, Phi):
        return (lambda w: cont._phi_mp(f.alpha, w)), f.alpha
    if isinstance(f, Chi):
        return (lambda w: cont._chi0_mp(1j * (w - f.alpha), "oracle-derived", 10.0 ** -cont.mp.mp.dps)[0]), f.alpha
    raise DomainError("--sigma is available for phi and chi only")


def _cmd_radius(a, tol):
    from .continuation import cauchy_derivatives
    from .transform import TaylorTable, estimate_radius, taylor_table

    f = parse_function(a.function)
    _require(a.nmax >= 9, "--nmax must be >= 9")
    lo = a.fit_lo if a.fit_lo is not None else max(1, a.nmax // 3)
    hi = a.fit_hi if a.fit_hi is not None else a.nmax
    if a.sigma is not None:
        sigma = parse_complex(a.sigma)
        g, origin = _continuation_function(f)
        coeffs = cauchy_derivatives(g, sigma, a.r, a.nmax, cut_origin=origin)
        table = TaylorTable.from_coefficients(coeffs, function=f, alpha=sigma)
        methods = ["cauchy"]
    else:
        table = taylor_table(f, a.alpha, a.nmax, "auto", tol)
        methods = [e.method for e in table.entries]
    est = estimate_radius(table, (lo, hi))
    payload = {"status": "inconclusive" if est.classification == "inconclusive" else "ok", "estimate": est}
    return payload, _provenance(f, methods), radius_csv(est)


def _cmd_continue(a, tol):
    from .continuation import chi0_continuation, phi_continuation, psi_p_continuation

    f = parse_function(a.function)
    z = parse_complex(a.z)
    if isinstance(f, Chi):
        ev = chi0_continuation(z - f.alpha)
        out = {"value": ev.value, "terms_used": ev.terms_used,
               "truncation_bound": ev.truncation_bound, "variant": ev.variant}
        formula = "chi0.closed_form"
    elif isinstance(f, PsiP):
        ev = psi_p_continuation(f.p, z)
        out = {"value": ev.value, "terms_used": ev.terms_used,
               "truncation_bound": ev.truncation_bound, "variant": ev.variant}
        formula = "psi_p.series"
    elif isinstance(f, Phi):
        out = {"value": phi_continuation(f.alpha, z)}
        formula = "phi.modification_identity"
    else:
        raise DomainError("continuation is available for chi, psi (0 < p < 1) and phi")
    from .continuation import FROZEN_VARIANTS

    prov = _provenance(None, ["series"])
    prov["formulas"] = {formula: FROZEN_VARIANTS[formula]}
    try:
        out["complex"] = out["value"].to_complex()
    except OverflowError:
        pass
    return {"function": format_function(f), "z": z, **out}, prov, None


def _cmd_perturb(a, tol):
    from .baire import perturb
    from .transform import metric_rho

    f = parse_function(a.function)
    g = perturb(f, a.alpha, a.j, a.kind, a.M)
    payload = {"function": format_function(f), "perturbed": format_function(g)}
    if a.metric:
        _require(a.lmax >= 0, "--lmax must be nonnegative")
        payload["metric_rho"] = metric_rho(g, f, a.lmax)
        payload["metric_tail_bound"] = 2.0 ** -a.lmax
    return payload, _provenance(g), None


def _cmd_witness(a, tol):
    from .baire import theta_witness

    f = parse_function(a.function)
    rep = theta_witness(f, a.alpha, a.N, a.M, a.budget, tol)
    payload = rep.to_dict()
    methods = [e.method for e in rep.table.entries] if rep.table else []
    return payload, _provenance(f, methods), None


def _cmd_gap(a, tol):
    from .baire import chain_link_holds, factorial_gap_holds, factorial_gap_n0

    n0 = factorial_gap_n0(a.M, a.N, a.j)
    payload = {
        "M": a.M,
        "N": a.N,
        "j": a.j,
        "n0": n0,
        "holds_at_n0_minus_1": None if n0 == 1 else factorial_gap_holds(a.M, a.N, a.j, n0 - 1),
        "chain_link_at_n0": chain_link_holds(a.M, n0),
    }
    return payload, _provenance(), None


def _cmd_verify(a, tol):
    from .continuation import FROZEN_VARIANTS, write_ledger

    rep = write_ledger(a.ledger)
    mismatched = {k: v for k, v in rep.decisions.items() if FROZEN_VARIANTS.get(k) != v}
    payload = {
        "status": "ok" if not mismatched else "mismatch",
        "ledger": str(a.ledger),
        "decisions": rep.decisions,
        "frozen": dict(FROZEN_VARIANTS),
        "mismatched": mismatched,
        "lines": [l.format() for l in rep.lines],
    }
    if mismatched:
        raise NumericalError(f"protocol decisions differ from frozen constants: {mismatched}")
    return payload, _provenance(), None


def _cmd_report(a, tol):
    from .transform import estimate_radius, expected_growth_exponent, taylor_table

    f = parse_function(a.function)
    _require(a.nmax >= 9, "--nmax must be >= 9")
    sr = smoothness_report(f)
    table = taylor_table(f, a.alpha, a.nmax, "auto", tol)
    est = estimate_radius(table, (max(1, a.nmax // 4), a.nmax))
    payload = {
        "function": format_function(f),
        "alpha": a.alpha,
        "smoothness": sr,
        "expected_growth_exponent": expected_growth_exponent(f),
        "estimate": est,
    }
    return payload, _provenance(f, [e.method for e in table.entries]), None


_COMMANDS = {
    "eval": _cmd_eval,
    "taylor": _cmd_taylor,
    "radius": _cmd_radius,
    "continue": _cmd_continue,
    "perturb": _cmd_perturb,
    "witness": _cmd_witness,
    "gap": _cmd_gap,
    "verify": _cmd_verify,
    "report": _cmd_report,
}


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, bytes, bytes]:
    """Execute a command; returns (exit status, stdout bytes, stderr bytes)."""

    def fail(code, kind, message):
        line = json.dumps({"error": kind, "message": str(message).splitlines()[0] if str(message) else kind})
        return code, b"", (line + "\n").encode("utf-8")

    try:
        args = build_parser().parse_args(argv)
        tol = args.tol if args.tol is not None else _default_tol()
        if not 0 < tol < 1:
            raise UsageError("--tol must lie in (0, 1)")
        payload, provenance, csv_bytes = _COMMANDS[args.command](args, tol)
    except UsageError as exc:
        return fail(EXIT_INVALID, "usage", exc)
    except (ParseError, DomainError) as exc:
        return fail(EXIT_INVALID, exc.kind, exc)
    except NumericalError as exc:
        return fail(EXIT_NUMERICAL, exc.kind, exc)
    except HftError as exc:
        return fail(EXIT_NUMERICAL, exc.kind, exc)

    if args.output == "csv":
        if csv_bytes is None:
            return fail(EXIT_INVALID, "usage", f"csv output is not available for {args.command}")
        body = csv_bytes
    else:
        doc = {"schema_version": SCHEMA_VERSION, "command": args.command}
        if not args.no_timestamp:
            doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        doc["provenance"] = provenance
        doc["result"] = payload
        body = dumps(doc)
    if args.out_path:
        with open(args.out_path, "wb") as fh:
            fh.write(body)
        return EXIT_OK, b"", b""
    return EXIT_OK, body, b""


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    if err:
        sys.stderr.buffer.write(err)
        sys.stderr.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
