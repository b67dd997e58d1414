"""CSV reading and writing for curve matrices and simulation labels.

Layout: one curve per row with ``d`` numeric columns. An optional first row
of ``t=<value>`` cells carries the evaluation grid, and an optional first
column headed ``id`` carries curve identifiers.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Optional, TextIO, Union

import numpy as np

from .core import FunctionalSample
from .exceptions import InvalidData

__all__ = ["CSVFormatError", "read_curves", "write_curves", "write_labels", "read_labels"]

PathOrFile = Union[str, Path, TextIO]


class CSVFormatError(InvalidData):
    """Malformed curve CSV; ``row`` and ``column`` are 1-based when known."""

    def __init__(self, message, row: Optional[int] = None, column: Optional[int] = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.row = row
        self.column = column


def _open_text(src: PathOrFile):
    if isinstance(src, (str, Path)):
        try:
            return open(src, newline="", encoding="utf-8"), True
        except OSError as exc:
            raise InvalidData(f"cannot read {src}: {exc.strerror}") from exc
    return src, False


def _parse_float(cell: str, row: int, column: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise CSVFormatError(f"not a number: {cell!r}", row, column) from None
    if not np.isfinite(value):
        raise CSVFormatError(f"non-finite value: {cell!r}", row, column)
    return value


def read_curves(src: PathOrFile) -> FunctionalSample:
    """Parse a curve CSV into a :class:`FunctionalSample`."""
    fh, owned = _open_text(src)
    try:
        rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    finally:
        if owned:
            fh.close()
    if not rows:
        raise CSVFormatError("file contains no curves")

    has_id = rows[0][0].strip().lower() == "id"
    header = None
    first = rows[0][1:] if has_id else rows[0]
    # an id column always comes with a header row; otherwise only a grid row
    if has_id or (first and first[0].strip().startswith("t=")):
        header = first
        rows = rows[1:]

    offset = 1 if has_id else 0
    grid = None
    if header is not None:
        if all(c.strip().startswith("t=") for c in header):
            grid = [
                _parse_float(c.strip()[2:], 1, j + 1 + offset) for j, c in enumerate(header)
            ]
        elif any(c.strip().startswith("t=") for c in header):
            raise CSVFormatError("grid header must use t=<value> in every column", 1)
    line0 = 1 if header is None else 2
    if not rows:
        raise CSVFormatError("file contains a header but no curves")

    width = len(rows[0]) - offset
    ids = [] if has_id else None
    values = np.empty((len(rows), width))
    for i, r in enumerate(rows):
        line = i + line0
        if len(r) - offset != width:
            raise CSVFormatError(
                f"expected {width} values, found {len(r) - offset}", line
            )
        if has_id:
            ids.append(r[0].strip())
        for j in range(width):
            values[i, j] = _parse_float(r[j + offset].strip(), line, j + 1 + offset)

    if grid is not None and len(grid) != width:
        raise CSVFormatError(f"grid header has {len(grid)} columns, data has {width}", 1)
    try:
        return FunctionalSample(values, grid=grid, ids=tuple(ids) if ids is not None else None)
    except InvalidData as exc:
        raise CSVFormatError(str(exc)) from exc


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_curves(sample: FunctionalSample, dst: PathOrFile, *, with_grid: bool = True,
                 with_ids: bool = True) -> None:
    """Write ``sample`` as CSV with full double precision."""
    owned = isinstance(dst, (str, Path))
    fh = open(dst, "w", newline="", encoding="utf-8") if owned else dst
    try:
        writer = csv.writer(fh, lineterminator="\n")
        labels = sample.labels()
        if with_grid:
            grid = sample.grid if sample.grid is not None else np.arange(sample.d, dtype=float)
            head = [f"t={_fmt(g)}" for g in grid]
            writer.writerow((["id"] if with_ids else []) + head)
        elif with_ids:
            writer.writerow(["id"] + [f"v{j + 1}" for j in range(sample.d)])
        for i in range(sample.n):
            cells = [_fmt(v) for v in sample.values[i]]
            writer.writerow(([str(labels[i])] if with_ids else []) + cells)
    finally:
        if owned:
            fh.close()


def write_labels(labeled, dst: PathOrFile) -> None:
    """Write ``id,is_outlier,submodel`` rows for a simulated sample."""
    owned = isinstance(dst, (str, Path))
    fh = open(dst, "w", newline="", encoding="utf-8") if owned else dst
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "is_outlier", "submodel"])
        sub = labeled.model_detail.get("submodel", np.zeros(labeled.sample.n, dtype=int))
        for lab, flag, s in zip(labeled.sample.labels(), labeled.is_outlier, sub):
            writer.writerow([lab, int(bool(flag)), int(s)])
    finally:
        if owned:
            fh.close()


def read_labels(src: PathOrFile) -> dict:
    """Map id string to ``is_outlier`` bool from a labels CSV."""
    fh, owned = _open_text(src)
    try:
        reader = csv.DictReader(fh)
        return {row["id"]: row["is_outlier"].strip() == "1" for row in reader}
    finally:
        if owned:
            fh.close()


def to_string(sample: FunctionalSample, **kwargs) -> str:
    buf = io.StringIO()
    write_curves(sample, buf, **kwargs)
    return buf.getvalue()
