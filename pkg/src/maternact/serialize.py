"""Deterministic CSV/JSON writers: fixed float formats, sorted keys, LF
newlines, no timestamps, so identical configs reproduce identical bytes."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["write_csv_columns", "write_json", "FLOAT_FMT"]

FLOAT_FMT = "%.17g"


def write_csv_columns(path, header: list[str], columns: list, fmt: str = FLOAT_FMT) -> None:
    """Write equal-length columns as CSV with a header row."""
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError(f"{len(header)} header fields for {len(cols)} columns")
    n = cols[0].shape[0]
    if any(c.shape != (n,) for c in cols):
        raise ValueError("columns must be equal-length 1-d arrays")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            cells = [
                (fmt % c[i]) if np.issubdtype(c.dtype, np.floating) else str(c[i])
                for c in cols
            ]
            fh.write(",".join(cells) + "\n")


def write_json(path, obj) -> None:
    Path(path).write_text(
        json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
