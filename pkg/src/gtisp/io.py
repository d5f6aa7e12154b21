"""Delimited data files and high-precision JSON reports.

Data CSVs carry a ``x1..xp,y`` header; group files list 1-based column
indices, one group per line.  JSON output prints floats with 17
significant digits so reported numbers round-trip exactly; CSV values use
10 digits, enough to regenerate every figure.
"""

from __future__ import annotations

import csv
import dataclasses
import math

import numpy as np

from .exceptions import DataError
from .solver import GroupSpec

__all__ = [
    "load_xy",
    "save_xy",
    "load_groups",
    "save_groups",
    "to_json",
    "write_csv",
]

CSV_FLOAT = "%.10g"


def load_xy(path):
    """Read (X, y) from a delimited file with an x1..xp,y header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        p = len(header) - 1
        expected = [f"x{j}" for j in range(1, p + 1)] + ["y"]
        if p < 1 or header != expected:
            raise DataError(
                f"{path}: header must be x1..xp,y, got {','.join(header)}"
            )
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != p + 1:
                raise DataError(
                    f"{path}:{i}: expected {p + 1} fields, got {len(row)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise DataError(f"{path}:{i}: {exc}") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return data[:, :p], data[:, p]


def save_xy(path, X, y) -> None:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DataError("X must be (n, p) and y (n,)")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j}" for j in range(1, X.shape[1] + 1)] + ["y"])
        for xi, yi in zip(X, y):
            writer.writerow([CSV_FLOAT % v for v in xi] + [CSV_FLOAT % yi])


def load_groups(path, p: int) -> GroupSpec:
    """One group per line, 1-based column indices separated by whitespace."""
    blocks = []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            try:
                idx = [int(v) for v in fields]
            except ValueError as exc:
                raise DataError(f"{path}:{i}: {exc}") from None
            if any(j < 1 or j > p for j in idx):
                raise DataError(
                    f"{path}:{i}: column indices must be in 1..{p}"
                )
            blocks.append(tuple(j - 1 for j in idx))
    if not blocks:
        raise DataError(f"{path}: no groups")
    spec = GroupSpec(tuple(blocks))
    spec.validate_for(p)
    return spec


def save_groups(path, groups: GroupSpec) -> None:
    with open(path, "w") as fh:
        for block in groups.blocks:
            fh.write(" ".join(str(j + 1) for j in block) + "\n")


def _json_fragments(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no NaN/inf literal
        out.append("null" if not math.isfinite(v) else f"{v:.17g}")
    elif isinstance(obj, str):
        out.append(
            '"'
            + obj.replace("\\", "\\\\").replace('"', '\\"').replace(
                "\n", "\\n"
            )
            + '"'
        )
    elif isinstance(obj, np.ndarray):
        _json_fragments(obj.tolist(), out)
    elif dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        _json_fragments(dataclasses.asdict(obj), out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            _json_fragments(str(k), out)
            out.append(": ")
            _json_fragments(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        out.append("[")
        for i, v in enumerate(seq):
            if i:
                out.append(", ")
            _json_fragments(v, out)
        out.append("]")
    else:
        raise DataError(f"cannot serialize {type(obj).__name__} to JSON")


def to_json(obj) -> str:
    """Serialize with floats at 17 significant digits (exact round-trip)."""
    out = []
    _json_fragments(obj, out)
    return "".join(out)


def write_csv(path, header, rows) -> None:
    """Write rows of mixed values; floats are formatted with 10 digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    CSV_FLOAT % v
                    if isinstance(v, (float, np.floating))
                    else v
                    for v in row
                ]
            )
