"""Synthetic datasets for the toy experiments, schema-driven CSV ingestion
with one-hot encoding and standard scaling, and k-fold splitting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

__all__ = [
    "Dataset",
    "CsvLoadError",
    "TabularEncoder",
    "regression_target",
    "gen_regression_1d",
    "gen_banana_like",
    "read_table",
    "load_csv",
    "kfold",
]

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"
LABEL = "label"
_ROLES = (CONTINUOUS, CATEGORICAL, LABEL)

_MISSING_TOKENS = {"", "na", "nan", "n/a", "?", "null"}


class CsvLoadError(ValueError):
    """CSV parsing/shape problem, carrying 1-based row/column positions."""


@dataclass
class Dataset:
    """Feature matrix, targets, and the fitted preprocessing metadata."""

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] = field(default_factory=list)
    n_dropped_rows: int = 0
    encoder: "TabularEncoder | None" = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y)
        if self.X.shape[0] < 1 or self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y must be nonempty with matching lengths")


def regression_target(x):
    """Cubic-plus-quadratic test function for the 1-d regression task."""
    x = np.asarray(x, dtype=float)
    return 0.25 * (x - 0.5) ** 3 + 0.5 * x**2 - x + 0.2


def gen_regression_1d(seed: int = 0) -> Dataset:
    """Two tight input clusters at -1 and +1 (100 points each, sd 0.07) with
    the cubic target plus observation noise of sd 0.02."""
    rng = np.random.default_rng(seed)
    x_left = rng.normal(-1.0, 0.07, size=100)
    x_right = rng.normal(1.0, 0.07, size=100)
    x = np.concatenate([x_left, x_right])
    y = regression_target(x) + rng.normal(0.0, 0.02, size=x.shape[0])
    return Dataset(x[:, None], y)


def gen_banana_like(seed: int = 0, n_class0: int = 183, n_class1: int = 217) -> Dataset:
    """Two interleaved crescents with Gaussian jitter, clipped to [-4, 4]^2.

    A self-contained stand-in for the two-class 2-d benchmark file; the
    default class sizes mirror the 183/217 split of that benchmark.
    """
    if n_class0 < 10 or n_class1 < 10:
        raise ValueError("need at least 10 points per class")
    rng = np.random.default_rng(seed)
    t0 = rng.uniform(0.0, math.pi, size=n_class0)
    t1 = rng.uniform(0.0, math.pi, size=n_class1)
    x0 = np.stack([2.2 * np.cos(t0) - 0.6, 1.8 * np.sin(t0) - 0.8], axis=1)
    x1 = np.stack([2.2 * np.cos(t1) + 0.6, -1.8 * np.sin(t1) + 0.8], axis=1)
    pts = np.concatenate([x0, x1]) + rng.normal(0.0, 0.22, size=(n_class0 + n_class1, 2))
    pts = np.clip(pts, -4.0, 4.0)
    labels = np.concatenate([np.zeros(n_class0, dtype=int), np.ones(n_class1, dtype=int)])
    return Dataset(pts, labels)


def read_table(path) -> tuple[list[str], list[list[str]], int]:
    """Parse a headed CSV file; drops rows with missing cells.

    Returns (header, kept rows, number of dropped rows). Cells matching
    '', 'na', 'nan', 'n/a', '?', 'null' (case-insensitive) count as missing.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvLoadError(f"{path}: empty file") from None
        rows = []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvLoadError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}"
                )
            if any(cell.strip().lower() in _MISSING_TOKENS for cell in row):
                dropped += 1
                continue
            rows.append(row)
    if not rows:
        raise CsvLoadError(f"{path}: no complete rows after dropping missing values")
    return header, rows, dropped


class TabularEncoder(BaseEstimator, TransformerMixin):
    """One-hot encoding for categorical columns plus standard scaling
    (population std) for continuous ones; statistics come from the fit
    split only. Unknown categorical levels at transform time map to the
    all-zeros block and are counted, not raised.
    """

    def __init__(self, schema: dict):
        self.schema = schema

    def _columns(self, header):
        roles = dict(self.schema)
        unknown = set(roles) - set(header)
        if unknown:
            raise CsvLoadError(f"schema columns not in header: {sorted(unknown)}")
        bad = {c: r for c, r in roles.items() if r not in _ROLES}
        if bad:
            raise CsvLoadError(f"invalid schema roles: {bad}; use {_ROLES}")
        labels = [c for c, r in roles.items() if r == LABEL]
        if len(labels) != 1:
            raise CsvLoadError(f"schema must mark exactly one label column, got {labels}")
        feats = [c for c in header if roles.get(c) in (CONTINUOUS, CATEGORICAL)]
        if not feats:
            raise CsvLoadError("schema must mark at least one feature column")
        return roles, feats, labels[0]

    @staticmethod
    def _parse_float(cell: str, lineno: int, col: str) -> float:
        try:
            return float(cell)
        except ValueError:
            raise CsvLoadError(
                f"row {lineno}, column {col!r}: cannot parse {cell!r} as a number"
            ) from None

    def fit(self, header_rows, y=None):
        header, rows = header_rows
        roles, feats, label_col = self._columns(header)
        col_idx = {c: header.index(c) for c in header}
        self.means_ = {}
        self.stds_ = {}
        self.levels_ = {}
        for col in feats:
            cells = [row[col_idx[col]] for row in rows]
            if roles[col] == CONTINUOUS:
                vals = np.array(
                    [self._parse_float(c, i + 2, col) for i, c in enumerate(cells)]
                )
                self.means_[col] = float(vals.mean())
                std = float(vals.std())
                self.stds_[col] = std if std > 0.0 else 1.0
            else:
                self.levels_[col] = sorted(set(cells))
        self.label_classes_ = sorted({row[col_idx[label_col]] for row in rows})
        self.feature_names_ = []
        for col in feats:
            if roles[col] == CONTINUOUS:
                self.feature_names_.append(col)
            else:
                self.feature_names_.extend(f"{col}={lv}" for lv in self.levels_[col])
        self.unknown_level_count_ = 0
        self._roles = roles
        self._feats = feats
        self._label_col = label_col
        return self

    def transform(self, header_rows) -> tuple[np.ndarray, np.ndarray]:
        header, rows = header_rows
        col_idx = {c: header.index(c) for c in header}
        blocks = []
        for col in self._feats:
            cells = [row[col_idx[col]] for row in rows]
            if self._roles[col] == CONTINUOUS:
                vals = np.array(
                    [self._parse_float(c, i + 2, col) for i, c in enumerate(cells)]
                )
                blocks.append(((vals - self.means_[col]) / self.stds_[col])[:, None])
            else:
                levels = self.levels_[col]
                onehot = np.zeros((len(rows), len(levels)))
                index = {lv: k for k, lv in enumerate(levels)}
                for i, c in enumerate(cells):
                    k = index.get(c)
                    if k is None:
                        self.unknown_level_count_ += 1  # all-zeros row for this block
                    else:
                        onehot[i, k] = 1.0
                blocks.append(onehot)
        X = np.hstack(blocks)
        label_index = {lv: k for k, lv in enumerate(self.label_classes_)}
        y = np.empty(len(rows), dtype=int)
        for i, row in enumerate(rows):
            cell = row[col_idx[self._label_col]]
            if cell not in label_index:
                raise CsvLoadError(f"unknown label value {cell!r} at row {i + 2}")
            y[i] = label_index[cell]
        return X, y

    def inverse_scale(self, col: str, values) -> np.ndarray:
        """Undo the standard scaling of one continuous column."""
        return np.asarray(values, dtype=float) * self.stds_[col] + self.means_[col]


def load_csv(path, schema: dict) -> Dataset:
    """Read a headed CSV and encode it per the schema (fit on this file)."""
    header, rows, dropped = read_table(path)
    encoder = TabularEncoder(schema).fit((header, rows))
    X, y = encoder.transform((header, rows))
    return Dataset(X, y, list(encoder.feature_names_), dropped, encoder)


def kfold(n: int, k: int, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint, exhaustive test folds with sizes differing by at most one,
    from a seeded shuffle."""
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    order = np.random.default_rng(seed).permutation(n)
    folds = np.array_split(order, k)
    out = []
    for i, test in enumerate(folds):
        train = np.concatenate([f for j, f in enumerate(folds) if j != i])
        out.append((np.sort(train), np.sort(test)))
    return out
