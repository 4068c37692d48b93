"""Byte-stable JSON and CSV writers for reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .asymptotics import AsymptoticReport, rate_and_parameter, regime_of

CSV_HEADER = "rho,j,mu,regime,rate,residual"


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    # keep floats recognisable as floats after a round trip
    if all(c not in text for c in ".eE"):
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(pad + it for it in items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        keys = sorted(obj, key=str)
        items = [f"{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}" for k in keys]
        return "{\n" + ",\n".join(pad + it for it in items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with sorted keys and every float at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(obj).encode("utf-8"))
    return path


def _g10(x) -> str:
    if x is None or not math.isfinite(x):
        return ""
    return format(float(x), ".10g")


def csv_rows(report: AsymptoticReport) -> list[str]:
    residuals = report.extra.get("residuals", {})
    rows = [CSV_HEADER]
    for rho in report.rho_schedule:
        key = repr(float(rho))
        mus = report.eigenvalues[key]
        res = residuals.get(key, [None] * len(mus))
        for j, mu in enumerate(mus, start=1):
            reg = regime_of(j, report.m)
            rate = rate_and_parameter(reg, rho, mu)[0] if reg else None
            rows.append(f"{_g10(rho)},{j},{_g10(mu)},{reg},{_g10(rate)},{_g10(res[j - 1])}")
    return rows


def export_report(report: AsymptoticReport, fmt: str, path) -> Path:
    """Write ``report`` as ``json`` (17 digits) or ``csv`` (10 digits)."""
    path = Path(path)
    if fmt == "json":
        return write_json(report.to_dict(), path)
    if fmt == "csv":
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(("\n".join(csv_rows(report)) + "\n").encode("utf-8"))
        return path
    raise ValueError("format must be 'json' or 'csv'")


def load_report(path) -> AsymptoticReport:
    return AsymptoticReport.from_dict(json.loads(Path(path).read_text()))
