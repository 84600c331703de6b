"""Curve records and their CSV/JSON serialization.

One CurveRecord is one (alpha, algorithm) point of an experiment curve.
The CSV header starts with the eight core columns in a fixed order; any
extras present on the records become additional columns (union over the
record list, in first-seen order).  JSON output carries the same field
names.  Floats are serialized with ``repr`` so both formats round-trip
bit-exactly and contain identical digit strings.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["CurveRecord", "CORE_FIELDS", "records_to_csv", "records_to_json", "meta_comment"]

CORE_FIELDS = ("alpha", "algorithm", "gamma", "x_a", "x_b", "theta_a", "theta_b", "utility")


@dataclass
class CurveRecord:
    alpha: float
    algorithm: str
    gamma: float
    x_a: float
    x_b: float
    theta_a: float
    theta_b: float
    utility: float
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {name: getattr(self, name) for name in CORE_FIELDS}
        d.update(self.extras)
        return d


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def _jsonable(value):
    if isinstance(value, np.floating):
        value = float(value)
    elif isinstance(value, np.integer):
        value = int(value)
    elif isinstance(value, np.bool_):
        value = bool(value)
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def meta_comment(meta: dict) -> str:
    """Single '# meta: {...}' comment line carrying run metadata."""
    return "# meta: " + json.dumps(meta, sort_keys=True)


def records_to_csv(records: list[CurveRecord], meta: dict | None = None) -> str:
    extra_cols: list[str] = []
    for rec in records:
        for key in rec.extras:
            if key not in extra_cols:
                extra_cols.append(key)
    cols = list(CORE_FIELDS) + extra_cols
    buf = io.StringIO()
    if meta is not None:
        buf.write(meta_comment(meta) + "\n")
    buf.write(",".join(cols) + "\n")
    for rec in records:
        d = rec.as_dict()
        buf.write(",".join(_fmt(_jsonable(d.get(c))) for c in cols) + "\n")
    return buf.getvalue()


def records_to_json(records: list[CurveRecord], meta: dict | None = None) -> str:
    rows = []
    for rec in records:
        rows.append({k: _jsonable(v) for k, v in rec.as_dict().items()})
    doc: dict = {}
    if meta is not None:
        doc["meta"] = meta
    doc["records"] = rows
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False)
