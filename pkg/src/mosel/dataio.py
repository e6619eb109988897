"""Complex-vector dataset container and its on-disk CSV format.

The CSV layout is the interchange format between the simulation harness and
the estimation command: a header row ``re_0,im_0,...,re_{N-1},im_{N-1}``
followed by one sample per row. Values are written with full round-trip
precision so that save/load is bit-exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError


@dataclass(frozen=True)
class ComplexDataset:
    """A batch of complex sample vectors, one per row.

    `samples` has shape (n_samples, n_dim). Estimators that need second-order
    statistics require at least two samples; the container itself accepts any
    non-empty batch so that undersized files can be loaded and then rejected
    with a meaningful error.
    """

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"samples must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples contain non-finite entries")
        object.__setattr__(self, "samples", arr)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_dim(self) -> int:
        return self.samples.shape[1]


def dataset_header(n_dim: int) -> list[str]:
    """Column names for an `n_dim`-dimensional dataset CSV."""
    cols = []
    for j in range(n_dim):
        cols.extend([f"re_{j}", f"im_{j}"])
    return cols


def save_dataset_csv(dataset: ComplexDataset, path: str | Path) -> None:
    """Write a dataset to CSV with round-trip (shortest exact repr) precision."""
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(dataset_header(dataset.n_dim))
        for row in dataset.samples:
            out = []
            for z in row:
                out.append(repr(float(z.real)))
                out.append(repr(float(z.imag)))
            writer.writerow(out)


def load_dataset_csv(path: str | Path) -> ComplexDataset:
    """Read a dataset CSV.

    The dimension is inferred from the header, the sample count from the row
    count. Raises FormatError with a 1-based line number on any malformed
    header, ragged row, or unparsable/non-finite value.
    """
    path = Path(path)
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("empty file, expected a header row", line=1) from None
        header = [h.strip() for h in header]
        if len(header) == 0 or len(header) % 2 != 0:
            raise FormatError(
                f"header must hold re/im column pairs, got {len(header)} columns", line=1
            )
        n_dim = len(header) // 2
        if header != dataset_header(n_dim):
            raise FormatError(
                "header must be re_0,im_0,...,re_{n-1},im_{n-1}, got: " + ",".join(header),
                line=1,
            )

        rows = []
        for lineno, record in enumerate(reader, start=2):
            if len(record) != 2 * n_dim:
                raise FormatError(
                    f"expected {2 * n_dim} values, got {len(record)}", line=lineno
                )
            try:
                values = [float(v) for v in record]
            except ValueError as exc:
                raise FormatError(f"unparsable value: {exc}", line=lineno) from None
            if not all(np.isfinite(values)):
                raise FormatError("non-finite value", line=lineno)
            rows.append([complex(values[2 * j], values[2 * j + 1]) for j in range(n_dim)])

    if not rows:
        raise FormatError("no data rows after the header", line=2)
    return ComplexDataset(np.array(rows, dtype=complex))
