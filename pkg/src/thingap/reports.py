"""Report containers and deterministic CSV/JSON writers."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IoFailure, NoReports


@dataclass
class Report:
    """One named result: a summary table plus optional per-point rows.

    Reports sharing a ``kind`` are written to the same file.
    """
    kind: str
    name: str
    summary: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    passed: bool | None = None  # None: informational only

    def as_dict(self):
        out = {"name": self.name}
        if self.passed is not None:
            out["pass"] = self.passed
        out.update(self.summary)
        if self.rows:
            out["rows"] = self.rows
        return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return "" if v is None else str(v)


def to_json(reports):
    return json.dumps([_plain(r.as_dict()) for r in reports], indent=2, allow_nan=True) + "\n"


def to_csv(reports):
    """Rows of every report, prefixed with the report name; summaries when a
    report has no rows."""
    records = []
    for r in reports:
        for row in (r.rows or [dict(r.summary, **({"pass": r.passed} if r.passed is not None else {}))]):
            records.append({"report": r.name, **_plain(row)})
    columns = []
    for rec in records:
        columns.extend(k for k in rec if k not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([_cell(rec.get(c)) for c in columns])
    return buf.getvalue()


def emit_report(reports, out_dir, formats=("csv", "json")):
    """Write one file per report kind and format; returns the written paths."""
    reports = list(reports)
    if not reports:
        raise NoReports("nothing to write")
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {fmt!r}")
    by_kind = {}
    for r in reports:
        by_kind.setdefault(r.kind, []).append(r)
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for kind, group in by_kind.items():
            for fmt in formats:
                path = out / f"{kind}.{fmt}"
                path.write_text(to_json(group) if fmt == "json" else to_csv(group))
                written.append(path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return written


def read_json_report(path):
    return json.loads(Path(path).read_text())
