"""Plain CSV input and output for numeric matrices and vectors."""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path

import numpy as np

from .exceptions import DataError


def _parse_cell(cell: str) -> float:
    value = float(cell.strip())
    if math.isnan(value) or math.isinf(value):
        raise ValueError(cell)
    return value


def _is_numeric_row(row) -> bool:
    try:
        for cell in row:
            float(cell.strip())
    except ValueError:
        return False
    return True


def load_csv_matrix(path) -> np.ndarray:
    """
    Read a rectangular numeric CSV file.

    A first row containing any non-numeric cell is treated as a header and
    skipped. Blank lines are ignored. Ragged rows and non-numeric or
    non-finite cells raise :class:`DataError` carrying the 1-based line.
    """
    path = Path(path)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open file ({exc.strerror})", path) from None
    rows, width = [], None
    with handle:
        reader = csv.reader(handle)
        try:
            for row in reader:
                line = reader.line_num
                if not row or all(not c.strip() for c in row):
                    continue
                if not rows and width is None and not _is_numeric_row(row):
                    width = len(row)
                    continue
                if width is None:
                    width = len(row)
                elif len(row) != width:
                    raise DataError(f"expected {width} fields, found {len(row)}", path, line)
                values = []
                for j, cell in enumerate(row):
                    try:
                        values.append(_parse_cell(cell))
                    except ValueError:
                        raise DataError(f"column {j + 1}: not a finite number: {cell.strip()!r}", path, line) from None
                rows.append(values)
        except (csv.Error, UnicodeDecodeError) as exc:
            raise DataError(str(exc), path, reader.line_num) from None
    if not rows:
        raise DataError("no numeric rows", path)
    return np.array(rows, dtype=np.float64)


def load_csv_vector(path) -> np.ndarray:
    """Read a single numeric column (or a single row) as a 1-D array."""
    M = load_csv_matrix(path)
    if M.shape[1] == 1:
        return M[:, 0].copy()
    if M.shape[0] == 1:
        return M[0].copy()
    raise DataError(f"expected a single column, found shape {M.shape}", path)


def write_csv(path, values, header=None):
    """Write a vector (one value per line) or matrix; values use 17 significant digits."""
    A = np.asarray(values, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    with atomic_writer(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        for row in A:
            writer.writerow([format(float(v), ".17g") for v in row])


class atomic_writer:
    """Context manager writing text to a temporary sibling, then renaming it into place."""

    def __init__(self, path):
        self.path = Path(path)
        self.tmp = self.path.with_name(f".{self.path.name}.{os.getpid()}.tmp")

    def __enter__(self):
        self.handle = open(self.tmp, "w", newline="", encoding="utf-8")
        return self.handle

    def __exit__(self, exc_type, exc, tb):
        self.handle.close()
        if exc_type is None:
            os.replace(self.tmp, self.path)
        else:
            self.tmp.unlink(missing_ok=True)
        return False
