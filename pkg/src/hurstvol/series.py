"""Time-series container shared by the generators, estimators and the CLI."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ROLES = ("price", "log-price", "return", "hurst", "volatility")


@dataclass
class TimeSeries:
    """An ordered sequence of observations with a role tag.

    ``timestamps`` is optional; synthetic series carry plain integer indexes
    while ingested market data keeps its ISO dates.
    """

    values: np.ndarray
    role: str = "price"
    name: str = "series"
    timestamps: list[str] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("TimeSeries values must be one-dimensional")
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}; expected one of {ROLES}")
        if self.timestamps is not None and len(self.timestamps) != len(self.values):
            raise ValueError("timestamps and values must have the same length")

    def __len__(self) -> int:
        return len(self.values)

    def write_csv(self, path) -> None:
        """Write as two columns (index, value); index is the timestamp if present."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "value"])
            idx: Sequence = self.timestamps if self.timestamps is not None else range(len(self))
            for i, v in zip(idx, self.values):
                w.writerow([i, format_float(v)])


def format_float(x: float) -> str:
    """Stable decimal rendering used by every CSV writer (byte-reproducible)."""
    return f"{float(x):.12g}"
