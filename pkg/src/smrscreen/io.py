"""Binary float64 matrices with a JSON sidecar header.

``path`` holds the raw little-endian float64 rows (C order);
``path + ".json"`` holds ``{"rows", "cols", "dtype": "<f8", ...}`` plus any
extra metadata passed by the writer.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

DTYPE = "<f8"


def sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_f64_matrix(path, array, **meta) -> None:
    a = np.ascontiguousarray(np.atleast_2d(np.asarray(array, dtype=DTYPE)))
    Path(path).write_bytes(a.tobytes())
    header = {"rows": a.shape[0], "cols": a.shape[1], "dtype": DTYPE, **meta}
    sidecar(path).write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")


def read_f64_matrix(path):
    """Return ``(array, header)``."""
    header = json.loads(sidecar(path).read_text())
    if header.get("dtype", DTYPE) != DTYPE:
        raise ValueError(f"unsupported dtype {header['dtype']!r}")
    raw = np.frombuffer(Path(path).read_bytes(), dtype=DTYPE)
    rows, cols = int(header["rows"]), int(header["cols"])
    if raw.size != rows * cols:
        raise ValueError("matrix file size does not match its header")
    return raw.reshape(rows, cols).astype(float), header


class MatrixWriter:
    """Append rows to a binary matrix file, writing the header on close."""

    def __init__(self, path, cols: int, **meta):
        self.path = Path(path)
        self.cols = cols
        self.meta = meta
        self.rows = 0
        self._fh = self.path.open("wb")

    def write(self, rows) -> None:
        a = np.ascontiguousarray(np.atleast_2d(np.asarray(rows, dtype=DTYPE)))
        if a.shape[1] != self.cols:
            raise ValueError("row width mismatch")
        self._fh.write(a.tobytes())
        self.rows += a.shape[0]

    def close(self) -> None:
        self._fh.close()
        header = {"rows": self.rows, "cols": self.cols, "dtype": DTYPE, **self.meta}
        sidecar(self.path).write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
