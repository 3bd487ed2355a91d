"""CSV ingestion and output writers."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError

MIN_POINTS = 8


@dataclass(frozen=True, eq=False)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    mapped_grid: bool
    # original covariate values in design order (equal to x when not remapped)
    x_original: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.y.size


def _parse_cell(text: str, row: int, column: str) -> float:
    try:
        val = float(text)
    except (TypeError, ValueError):
        raise DataError(f"row {row}: column {column!r} has non-numeric value {text!r}") from None
    if not math.isfinite(val):
        raise DataError(f"row {row}: column {column!r} has non-finite value {text!r}")
    return val


def read_columns(path, columns) -> dict:
    """Read numeric columns from a headed CSV; row numbers in errors count the header as row 1."""
    if not os.path.isfile(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise DataError(f"{path}: missing column(s) {missing}; found {header}")
        out = {c: [] for c in columns}
        for rownum, rec in enumerate(reader, start=2):
            for c in columns:
                out[c].append(_parse_cell(rec[c], rownum, c))
    return {c: np.asarray(v, dtype=np.float64) for c, v in out.items()}


def ingest_csv(path, x_column: str = "x", y_column: str = "y", mapping: str = "rank") -> Dataset:
    """Load (x, y) and place the records on the design grid i/n.

    ``mapping="rank"`` sorts by x (stable, so ties keep input order) and
    assigns design points 1/n, ..., 1 in rank order. ``mapping="none"``
    requires x to already equal i/n within 1e-9, row by row.
    """
    cols = read_columns(path, [x_column, y_column])
    x, y = cols[x_column], cols[y_column]
    n = y.size
    if n < MIN_POINTS:
        raise DataError(f"need at least {MIN_POINTS} rows, got {n}")
    grid = np.arange(1, n + 1) / n
    if mapping == "rank":
        order = np.argsort(x, kind="stable")
        return Dataset(x=grid, y=y[order], mapped_grid=True, x_original=x[order])
    if mapping == "none":
        if np.unique(x).size != n:
            raise DataError("tied x values cannot be used without remapping (use mapping 'rank')")
        bad = np.flatnonzero(np.abs(x - grid) > 1e-9)
        if bad.size:
            i = int(bad[0])
            raise DataError(f"row {i + 2}: x = {x[i]!r} is not the design point {grid[i]!r}; use mapping 'rank'")
        return Dataset(x=grid, y=y, mapped_grid=False, x_original=x)
    raise DataError(f"unknown mapping {mapping!r}")


def read_grid_values(path, n: int) -> np.ndarray:
    """Null-function values on the design from a CSV with column 'f' (or the first column)."""
    if not os.path.isfile(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if not header:
        raise DataError(f"{path}: empty file")
    col = "f" if "f" in header else header[0]
    vals = read_columns(path, [col])[col]
    if vals.size != n:
        raise DataError(f"{path}: expected {n} null values, got {vals.size}")
    return vals


def fmt_float(v: float) -> str:
    """Shortest string that round-trips to the same double."""
    return repr(float(v))


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def curve_csv(x, values, column: str = "f_hat") -> str:
    lines = [f"x,{column}"]
    lines += [f"{fmt_float(a)},{fmt_float(b)}" for a, b in zip(x, values)]
    return "\n".join(lines) + "\n"


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
