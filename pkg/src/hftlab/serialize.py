"""
JSON and CSV encodings of the package's result types.

JSON floats are written with 17 significant digits so that parsing restores
them bit for bit; non-finite values are the strings "inf", "-inf", "nan".
Complex numbers appear either as {"re", "im"} or, for quantities that can
overflow a double, as {"log_abs", "phase"}.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import is_dataclass
from typing import Any

from .catalog import HalfLineFunction, format_function, parse_function
from .logdomain import LogComplex
from .transform import RadiusEstimate, SeminormValue, TaylorEntry, TaylorTable

__all__ = [
    "SCHEMA_VERSION",
    "to_payload",
    "dumps",
    "loads",
    "taylor_csv",
    "radius_csv",
    "parse_csv",
    "table_from_payload",
]

SCHEMA_VERSION = "1.0"
_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _g17(x: float) -> str:
    if not math.isfinite(x):
        return _float(x)
    s = format(x, ".17g")
    return s if ("." in s or "e" in s) else s + ".0"


def _float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _log_complex(v: LogComplex) -> dict:
    return {"log_abs": _float(v.log_abs), "phase": _float(v.phase)}


def _entry(e: TaylorEntry) -> dict:
    d = e.derivative
    return {
        "n": e.n,
        "log_abs": None if d is None else _float(d.log_abs),
        "phase": None if d is None else _float(d.phase),
        "C": None if e.C is None else _float(e.C),
        "method": e.method,
        "flagged": e.flagged,
    }


def to_payload(obj: Any) -> Any:
    """Convert results into plain JSON-ready structures."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, complex):
        return {"re": _float(obj.real), "im": _float(obj.imag)}
    if isinstance(obj, LogComplex):
        return _log_complex(obj)
    if isinstance(obj, HalfLineFunction):
        return format_function(obj)
    if isinstance(obj, TaylorTable):
        return {
            "type": "taylor_table",
            "function": None if obj.function is None else format_function(obj.function),
            "alpha": to_payload(complex(obj.alpha).real),
            "n_max": obj.n_max,
            "entries": [_entry(e) for e in obj.entries],
        }
    if isinstance(obj, RadiusEstimate):
        return {"type": "radius_estimate", **to_payload(obj.to_dict())}
    if isinstance(obj, SeminormValue):
        return {"value": _float(obj.value), "attained_at": to_payload(obj.attained_at)}
    if isinstance(obj, dict):
        return {str(k): to_payload(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_payload(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_payload(obj.to_dict())
    if is_dataclass(obj):
        return to_payload(vars(obj))
    if hasattr(obj, "item"):  # numpy scalars
        return to_payload(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(x: Any, out: list) -> None:
    if x is None:
        out.append("null")
    elif x is True:
        out.append("true")
    elif x is False:
        out.append("false")
    elif isinstance(x, int):
        out.append(str(x))
    elif isinstance(x, float):
        out.append(_g17(x))
    elif isinstance(x, str):
        out.append(json.dumps(x, ensure_ascii=False))
    elif isinstance(x, dict):
        out.append("{")
        for i, (k, v) in enumerate(x.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k), ensure_ascii=False))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(x, list):
        out.append("[")
        for i, v in enumerate(x):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"not a payload value: {type(x).__name__}")


def dumps(obj: Any) -> bytes:
    """UTF-8 JSON with 17-significant-digit floats."""
    out: list = []
    _encode(to_payload(obj), out)
    return ("".join(out) + "\n").encode("utf-8")


def _restore(x: Any) -> Any:
    if isinstance(x, str) and x in _NONFINITE:
        return _NONFINITE[x]
    if isinstance(x, dict):
        return {k: _restore(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_restore(v) for v in x]
    return x


def loads(data) -> Any:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return _restore(json.loads(data))


def table_from_payload(payload: dict) -> TaylorTable:
    """Rebuild a TaylorTable from its JSON payload."""
    entries = []
    for e in payload["entries"]:
        d = None if e["log_abs"] is None else LogComplex(e["log_abs"], e["phase"])
        entries.append(TaylorEntry(e["n"], d, e["C"], e["method"], e["flagged"]))
    f = payload.get("function")
    return TaylorTable(
        parse_function(f) if f else None, complex(payload["alpha"]), tuple(entries), payload["n_max"]
    )


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_g17(v) if isinstance(v, float) else ("" if v is None else v) for v in row])
    return buf.getvalue().encode("utf-8")


def taylor_csv(table: TaylorTable) -> bytes:
    """n, log n, log|F^(n)|, phase, C_n, log C_n, method, flagged."""
    rows = []
    for e in table.entries:
        d = e.derivative
        log_c = math.log(e.C) if e.C else None
        rows.append([
            e.n,
            math.log(e.n) if e.n else None,
            None if d is None else d.log_abs,
            None if d is None else d.phase,
            e.C,
            log_c,
            e.method,
            int(e.flagged),
        ])
    return _csv_bytes(["n", "log_n", "log_abs", "phase", "C", "log_C", "method", "flagged"], rows)


def radius_csv(est: RadiusEstimate) -> bytes:
    """Plot-ready (n, log n, C_n, log C_n) over the fit window."""
    rows = [[n, math.log(n), c, math.log(c) if c else None] for n, c in est.series_C]
    return _csv_bytes(["n", "log_n", "C", "log_C"], rows)


def parse_csv(data) -> list:
    """Rows as dicts with numeric fields converted back to numbers."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    out = []
    for row in csv.DictReader(io.StringIO(data)):
        conv = {}
        for k, v in row.items():
            if v == "":
                conv[k] = None
                continue
            try:
                conv[k] = int(v)
            except ValueError:
                try:
                    conv[k] = float(v)
                except ValueError:
                    conv[k] = v
        out.append(conv)
    return out
