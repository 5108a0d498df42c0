"""Binary observation panels: container, file formats, binarization rules.

Two interchangeable on-disk formats:

* CSV — a header row of column labels, then n rows of 0/1 values.
* compact binary — magic bytes "GBVP1", little-endian u32 n, u32 d, then
  n rows of ceil(d/8) bytes, each row bit-packed little-bit-first.
  Labels are not stored in the binary format.
"""

import csv
import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyColumn, NonNumericCell, NotBinary, UserInputError

MAGIC = b"GBVP1"


@dataclass(frozen=True)
class BinaryPanel:
    """n x d matrix of {0,1} observations, time along the first axis."""

    data: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise UserInputError("panel data must be 2-dimensional")
        if arr.size and not np.isin(arr, (0, 1)).all():
            bad = np.argwhere(~np.isin(arr, (0, 1)))[0]
            raise NotBinary(int(bad[0]) + 1, int(bad[1]) + 1)
        arr = arr.astype(np.uint8)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        if self.labels is not None:
            labels = tuple(str(c) for c in self.labels)
            if len(labels) != arr.shape[1]:
                raise UserInputError("label count does not match dimension")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def column_labels(self) -> tuple:
        if self.labels is not None:
            return self.labels
        return tuple(f"x{j + 1}" for j in range(self.d))


# -- CSV ----------------------------------------------------------------------

def write_panel_csv(panel: BinaryPanel, path_or_file) -> None:
    """Write the CSV form to a path or an open text file object."""
    if hasattr(path_or_file, "write"):
        _write_csv_body(panel, path_or_file)
        return
    with open(path_or_file, "w", newline="") as fh:
        _write_csv_body(panel, fh)


def _write_csv_body(panel: BinaryPanel, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(panel.column_labels())
    for row in panel.data:
        writer.writerow([int(v) for v in row])


def read_panel_csv(path) -> BinaryPanel:
    """Read a 0/1 CSV panel.

    Raises NotBinary(row, col) — 1-based over data rows — for any cell
    that is not exactly 0 or 1.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise UserInputError("empty panel file") from None
        rows = []
        for i, cells in enumerate(reader, start=1):
            if not cells:
                continue
            parsed = []
            for j, cell in enumerate(cells, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise NotBinary(i, j) from None
                if value not in (0.0, 1.0):
                    raise NotBinary(i, j)
                parsed.append(int(value))
            if len(parsed) != len(header):
                raise UserInputError(f"row {i} has {len(parsed)} cells, "
                                     f"expected {len(header)}")
            rows.append(parsed)
    data = np.array(rows, dtype=np.uint8).reshape(len(rows), len(header))
    return BinaryPanel(data, labels=tuple(header))


# -- compact binary -----------------------------------------------------------

def write_panel_bin(panel: BinaryPanel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", panel.n, panel.d))
        packed = np.packbits(panel.data, axis=1, bitorder="little")
        fh.write(packed.tobytes())


def read_panel_bin(path) -> BinaryPanel:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(MAGIC)] != MAGIC:
        raise UserInputError("not a panel binary file (bad magic)")
    n, d = struct.unpack_from("<II", blob, len(MAGIC))
    stride = (d + 7) // 8
    body = blob[len(MAGIC) + 8:]
    if len(body) != n * stride:
        raise UserInputError("panel binary file is truncated")
    packed = np.frombuffer(body, dtype=np.uint8).reshape(n, stride)
    data = np.unpackbits(packed, axis=1, bitorder="little")[:, :d]
    return BinaryPanel(data)


def write_panel(panel: BinaryPanel, path) -> None:
    """Dispatch on extension: .csv is text, anything else is binary."""
    if str(path).lower().endswith(".csv"):
        write_panel_csv(panel, path)
    else:
        write_panel_bin(panel, path)


def read_panel(path) -> BinaryPanel:
    """Sniff the magic bytes, fall back to CSV."""
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_panel_bin(path)
    return read_panel_csv(path)


# -- numeric ingestion --------------------------------------------------------

def read_numeric_csv(path):
    """Read a real-valued CSV with a header row.

    Returns (labels, (n, m) float array). Raises NonNumericCell with
    1-based data coordinates, EmptyColumn when there are no data rows.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise UserInputError("empty input file") from None
        rows = []
        for i, cells in enumerate(reader, start=1):
            if not cells:
                continue
            parsed = []
            for j, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise NonNumericCell(i, j) from None
            if len(parsed) != len(header):
                raise UserInputError(f"row {i} has {len(parsed)} cells, "
                                     f"expected {len(header)}")
            rows.append(parsed)
    if not rows:
        raise EmptyColumn("input has a header but no data rows")
    return tuple(header), np.array(rows, dtype=float)


def binarize_advance_decline(values: np.ndarray) -> np.ndarray:
    """1 where the series strictly increases step over step; ties are 0.

    (n, m) reals -> (n-1, m) binary.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        raise UserInputError("advance-decline needs at least 2 rows")
    return (values[1:] > values[:-1]).astype(np.uint8)


def binarize_growth_threshold(values: np.ndarray, pct: float) -> np.ndarray:
    """1 where a series begins (0 -> positive) or grows by more than pct%.

    Baselines must be nonnegative; a zero baseline uses the new-flow rule
    (any positive continuation counts), a positive baseline requires
    strict growth beyond the percentage threshold.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        raise UserInputError("growth-threshold needs at least 2 rows")
    if (values < 0).any():
        raise UserInputError("growth-threshold requires nonnegative values")
    prev, cur = values[:-1], values[1:]
    begins = (prev == 0) & (cur > 0)
    grows = (prev > 0) & (cur > prev * (1.0 + pct / 100.0))
    return (begins | grows).astype(np.uint8)
