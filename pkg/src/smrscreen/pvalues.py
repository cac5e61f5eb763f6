"""Ranked p-value container and plain-text p-value I/O."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

#: p-values are pulled into [EPS_CLAMP, 1 - EPS_CLAMP] before any division
#: by sqrt(t (1 - t)).
EPS_CLAMP = 1e-12


@dataclass(frozen=True)
class PValueVector:
    """Immutable p-values together with their stable ascending order.

    Parameters
    ----------
    values : array_like
        p-values in original variable order; each must lie in [0, 1].

    Attributes
    ----------
    order : ndarray of int
        ``order[r]`` is the original index of the p-value of rank ``r``
        (0-based). Ties are broken by ascending original index.
    sorted : ndarray
        ``values[order]``.
    """

    values: np.ndarray
    order: np.ndarray = field(init=False, repr=False)
    sorted: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("empty p-value vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("p-values must be finite")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("p-values must lie in [0, 1]")
        values.setflags(write=False)
        order = np.argsort(values, kind="stable")
        order.setflags(write=False)
        srt = values[order]
        srt.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "sorted", srt)

    @property
    def m(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.m

    def clamped_sorted(self) -> np.ndarray:
        return np.clip(self.sorted, EPS_CLAMP, 1.0 - EPS_CLAMP)

    @classmethod
    def from_any(cls, p) -> "PValueVector":
        return p if isinstance(p, cls) else cls(p)


def read_pvalues(path) -> PValueVector:
    """Read p-values from text (one per line) or a CSV with a ``p`` column.

    Blank lines and lines starting with ``#`` are ignored in the text form.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        first = fh.readline()
        fh.seek(0)
        header = [h.strip().lower() for h in first.split(",")]
        if "p" in header:
            reader = csv.DictReader(fh)
            key = next(k for k in reader.fieldnames if k.strip().lower() == "p")
            vals = [float(row[key]) for row in reader]
        else:
            vals = []
            for line in fh:
                line = line.strip()
                if line and not line.startswith("#"):
                    vals.append(float(line))
    return PValueVector(vals)


def write_pvalues(path, p) -> None:
    """Write p-values one decimal per line (full ``repr`` precision)."""
    p = PValueVector.from_any(p)
    with Path(path).open("w") as fh:
        for v in p.values:
            fh.write(f"{float(v)!r}\n")
