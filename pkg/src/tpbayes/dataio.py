"""CSV ingestion and deterministic output serialization.

All numeric output uses the shortest round-trip decimal representation
(repr of the float), so files written from identical inputs are
byte-identical and re-reading recovers the exact binary values.  Metadata
sidecars are plain "key = value" lines with no timestamps.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

__all__ = [
    "DataError",
    "read_series_csv",
    "read_design_csv",
    "format_value",
    "write_table",
    "write_meta",
    "write_chain_csv",
    "read_chain_csv",
]


class DataError(Exception):
    """Raised for unreadable, malformed, or non-numeric input data."""


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise DataError(f"row {row}, column {col}: could not parse {text!r} as a number") from None


def _read_rows(path) -> list:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh))]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [(i, [c.strip() for c in row]) for i, row in rows]
    rows = [(i, row) for i, row in rows if any(row)]
    if not rows:
        raise DataError(f"{path} contains no data rows")
    return rows


def _looks_like_date(cell: str) -> bool:
    try:
        float(cell)
        return False
    except ValueError:
        return True


def read_series_csv(path, header: bool = False):
    """Read a one-value-per-row series CSV.

    An optional leading date-like column (any non-numeric first cell) is
    split off and returned alongside the values; dates are not parsed,
    just carried through for output alignment.  Returns (values, dates)
    with dates None when absent.
    """
    rows = _read_rows(path)
    if header:
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path} has a header but no data rows")
    first = rows[0][1]
    has_dates = len(first) >= 2 and _looks_like_date(first[0])
    values = []
    dates = [] if has_dates else None
    for i, row in rows:
        if has_dates:
            if len(row) != 2:
                raise DataError(f"row {i}: expected date,value but found {len(row)} cells")
            dates.append(row[0])
            values.append(_parse_cell(row[1], i, 2))
        else:
            if len(row) != 1:
                raise DataError(f"row {i}: expected a single value but found {len(row)} cells")
            values.append(_parse_cell(row[0], i, 1))
    return np.array(values), dates


def read_design_csv(path, header: bool = False):
    """Read a regression CSV: first column response, rest covariates.

    Returns (y, X) with an intercept column of ones prepended to the
    covariates; a single-column file yields an intercept-only design.
    """
    rows = _read_rows(path)
    if header:
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path} has a header but no data rows")
    width = len(rows[0][1])
    y = []
    covariates = []
    for i, row in rows:
        if len(row) != width:
            raise DataError(f"row {i}: expected {width} cells but found {len(row)}")
        y.append(_parse_cell(row[0], i, 1))
        covariates.append([_parse_cell(c, i, j + 2) for j, c in enumerate(row[1:])])
    n = len(y)
    X = np.ones((n, width))
    if width > 1:
        X[:, 1:] = np.array(covariates)
    return np.array(y), X


def format_value(value) -> str:
    """Shortest round-trip text for a scalar (ints stay integral)."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path, header, rows) -> None:
    """Write a CSV with deterministic formatting."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_meta(path, mapping) -> None:
    """Write a key = value sidecar (insertion order, no timestamps)."""
    lines = [f"{key} = {format_value(value)}" for key, value in mapping.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def write_chain_csv(path, chain) -> None:
    """One column per parameter, one row per retained draw."""
    names = list(chain.draws)
    columns = [chain.draws[name] for name in names]
    rows = zip(*columns)
    write_table(path, names, rows)


def read_chain_csv(path):
    """Read a chain CSV back into name -> array (exact value round trip)."""
    rows = _read_rows(path)
    names = rows[0][1]
    data = {name: [] for name in names}
    for i, row in rows[1:]:
        if len(row) != len(names):
            raise DataError(f"row {i}: expected {len(names)} cells but found {len(row)}")
        for name, cell in zip(names, row):
            data[name].append(_parse_cell(cell, i, names.index(name) + 1))
    out = {}
    for name, values in data.items():
        arr = np.array(values)
        if name == "p" and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        out[name] = arr
    return out
