"""Serialization of analysis reports: JSON, CSV sweep tables and a plain-text summary."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Dict, List

FORMATS = ("json", "csv", "text")


class ReportFormatError(ValueError):
    pass


def _normalize(obj: Any) -> Any:
    """Replace floats by 17-significant-digit tokens; non-finite floats become null."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return _FloatToken(obj) if math.isfinite(obj) else None
    if hasattr(obj, "item") and not isinstance(obj, (list, tuple, dict)):  # numpy scalars
        return _normalize(obj.item())
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    return str(obj)


class _FloatToken:
    __slots__ = ("text",)

    def __init__(self, x: float):
        self.text = format(x, ".17g")
        if "." not in self.text and "e" not in self.text:
            self.text += ".0"


def _encode(obj: Any, indent: int, level: int, out: List[str]) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, _FloatToken):
        out.append(obj.text)
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted(obj.items())
        for n, (k, v) in enumerate(items):
            out.append(pad + json.dumps(k) + ": ")
            _encode(v, indent, level + 1, out)
            out.append(",\n" if n < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad)
            _encode(v, indent, level + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(json.dumps(obj))


def to_json(data: Dict[str, Any], indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    out: List[str] = []
    _encode(_normalize(data), indent, 0, out)
    return "".join(out) + "\n"


SWEEP_COLUMNS = ("rho0", "pi_oracle", "pi_series", "residual")


def _cell(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return ""
    return format(float(v), ".17g") if isinstance(v, float) else str(v)


def sweep_columns(data: Dict[str, Any]) -> List[str]:
    cols = list(SWEEP_COLUMNS)
    for run in data.get("weights", []):
        for row in run.get("sweep", []):
            cols += [k for k in row if k not in cols]
    return cols


def to_csv(data: Dict[str, Any]) -> str:
    """One row per sampled ``rho0`` and weight; empty cells for missing values."""
    cols = sweep_columns(data)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "q"] + cols)
    for run in data.get("weights", []):
        p, q = run["weight"]
        for row in run.get("sweep", []):
            w.writerow([p, q] + [_cell(row.get(k)) for k in cols])
    return buf.getvalue()


def _num(entry) -> str:
    if not isinstance(entry, dict) or entry.get("value") is None:
        return "n/a"
    err = entry.get("error")
    return f"{entry['value']:.12g}" + ("" if err is None else f" (+/- {err:.2g})")


def to_text(data: Dict[str, Any]) -> str:
    lines = [f"problem: {data.get('name') or '(unnamed)'}"]
    if data.get("params"):
        lines.append("params: " + ", ".join(f"{k} = {v}" for k, v in sorted(data["params"].items())))
    diag = data.get("diagram")
    if diag:
        lines.append("Newton diagram vertices: " + " ".join(f"({a},{b})" for a, b in diag["vertices"]))
        lines.append("weights: " + " ".join(f"({a},{b})" for a, b in diag["weights"]))
    for err in data.get("errors", []):
        lines.append(f"error [{err['stage']}] {err['kind']}: {err['message']}")
    for run in data.get("weights", []):
        p, q = run["weight"]
        lines.append("")
        lines.append(f"weight ({p},{q})")
        for name, status in sorted(run.get("hypotheses", {}).items()):
            lines.append(f"  check {name}: {status}")
        bu = run.get("blowup")
        if bu:
            lines.append(f"  degree r = {bu['r']}, orientation {bu['orientation']:+d}")
            lines.append(f"  leading angular speed G_r = {bu['leading_angular_speed']}")
            dirs = ", ".join(f"{d['angle']:.12g} (mult {d['multiplicity']})" for d in bu["characteristic_directions"])
            lines.append(f"  characteristic directions: {dirs or 'none'}")
        th = run.get("theta")
        if th:
            lines.append(f"  zero set of Theta: {th['verdict']} [{th['status']}]")
            for d in th["directions"]:
                nf = d["normal_form"]
                lines.append(f"    angle {d['angle']:.12g}: {d['verdict']} by {d['method']}, "
                             f"normal form {nf['tag']} (k = {nf['k']})")
        if "iif" in run:
            lines.append(f"  multiplicity m = {run['iif']['m']}, index n = {run['iif']['n']}")
        if "xi_pq" in run:
            lines.append(f"  xi_pq = {_num(run['xi_pq'])} (not used for classification)")
        if "g_constant" in run:
            lines.append(f"  g = {_num(run['g_constant'])} [{run['g_constant']['hypothesis_case']}]")
        cls = run.get("classification")
        if cls:
            lines.append(f"  verdict: {cls['verdict']}, stability: {cls['stability']}")
            lines.append(f"  analytic: {cls['analytic']} ({cls['analytic_reason']})")
            if cls.get("cyclicity_statement"):
                lines.append(f"  {cls['cyclicity_statement']}")
        for name, entry in sorted(run.get("oracle", {}).items()):
            if isinstance(entry, dict):
                lines.append(f"  oracle {name}: {_num(entry)}")
        for err in run.get("errors", []):
            lines.append(f"  error [{err['stage']}] {err['kind']}: {err['message']}")
    lines.append("")
    lines.append(f"exit code: {data.get('exit_code')}")
    return "\n".join(lines) + "\n"


def emit_report(report, fmt: str = "json") -> bytes:
    """Serialize an :class:`AnalysisReport` (or its dict) as ``json``, ``csv`` or ``text``."""
    data = report.as_dict() if hasattr(report, "as_dict") else report
    if fmt == "json":
        text = to_json(data)
    elif fmt in ("csv", "csv-tables"):
        text = to_csv(data)
    elif fmt in ("text", "text-summary"):
        text = to_text(data)
    else:
        raise ReportFormatError(f"unknown format {fmt!r}; choose one of {', '.join(FORMATS)}")
    return text.encode("utf-8")
