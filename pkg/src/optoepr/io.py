"""Tabular emission for offline plotting (CSV / JSON lines).

The column set is fixed so downstream tooling can rely on it:

    omega_rads, omega_over_gamma, n, k_x, epr_variance, S_db, eof,
    log_negativity, model, flags

The ``verify`` command appends one relative-deviation column per comparison
model after ``flags``.  Floats are serialized with 17 significant digits
(binary64 round-trip exact); identical inputs produce byte-identical files.
Missing values are ``nan`` in CSV and ``null`` in JSON lines.
"""

from __future__ import annotations

import json
import math

BASE_COLUMNS = (
    "omega_rads", "omega_over_gamma", "n", "k_x", "epr_variance",
    "S_db", "eof", "log_negativity", "model", "flags",
)


def _fmt_value(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, str):
        return value
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    if isinstance(value, (int, float)):
        return f"{float(value):.17g}"
    return str(value)


def _json_value(value):
    if value is None:
        return None
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return None
        return float(f"{value:.17g}")
    return value


def render_rows(rows, fmt: str, columns=BASE_COLUMNS) -> str:
    """Render rows (mappings) to the requested format as a single string."""
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_fmt_value(row.get(col)) for col in columns))
        return "\n".join(lines) + "\n"
    if fmt == "jsonlines":
        lines = []
        for row in rows:
            obj = {col: _json_value(row.get(col)) for col in columns}
            lines.append(json.dumps(obj, separators=(",", ":"), sort_keys=False))
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown format {fmt!r}")


def emit_rows(rows, fmt: str, path: str | None, columns=BASE_COLUMNS) -> str:
    """Write rows to ``path`` (or return only) in the requested format.

    Returns the rendered text so callers can also print it.
    """
    text = render_rows(list(rows), fmt, columns)
    if path is not None:
        with open(path, "w", newline="") as handle:
            handle.write(text)
    return text


def read_jsonlines(text: str) -> list[dict]:
    """Parse JSON-lines output back into row dictionaries."""
    return [json.loads(line) for line in text.splitlines() if line.strip()]
