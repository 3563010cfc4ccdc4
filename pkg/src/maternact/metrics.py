"""Uncertainty-quality metrics: NLPD (classification, Gaussian, and the
modified unknown-class variant), accuracy, one-vs-rest macro AUC,
predictive entropy, Bernoulli uncertainty, and fixed-bin histograms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MetricReport",
    "HistogramResult",
    "NLPD_FLOOR",
    "nlpd_class",
    "nlpd_mod",
    "nlpd_gaussian",
    "auc_binary",
    "auc_macro",
    "predictive_entropy",
    "bernoulli_std",
    "histogram",
    "accuracy",
    "classification_report",
]

# probabilities are clamped here before taking logs; clamp events are
# counted in reports rather than silently absorbed
NLPD_FLOOR = 1e-12


def _check_probs(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("probs must be a 1-d probability vector")
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities must be >= 0 and sum to 1, got sum {p.sum()!r}")
    return p


def nlpd_class(probs, true_class: int) -> float:
    """-log p(true class), clamped at the 1e-12 floor."""
    p = _check_probs(probs)
    if true_class != int(true_class) or not 0 <= int(true_class) < p.size:
        raise ValueError(f"true_class must index into probs, got {true_class!r}")
    return -math.log(max(p[int(true_class)], NLPD_FLOOR))


def nlpd_mod(probs, n_classes: int) -> float:
    """Unknown-class score -log(c/(c-1) (1 - max prob)); 0 at the uniform
    prediction, clamped when the max prob saturates at 1."""
    if n_classes < 2:
        raise ValueError(f"n_classes must be >= 2, got {n_classes!r}")
    p = _check_probs(probs)
    top = min(float(p.max()), 1.0 - NLPD_FLOOR)
    # c*(1-top) before the division: rounds to exactly 1 (hence score 0)
    # at the uniform prediction for every c in [2, 100]
    return -math.log(n_classes * (1.0 - top) / (n_classes - 1.0))


def nlpd_gaussian(mean: float, std: float, y: float) -> float:
    """Negative log density of y under N(mean, std^2)."""
    if not (math.isfinite(std) and std > 0.0):
        raise ValueError(f"std must be positive, got {std!r}")
    return 0.5 * math.log(2.0 * math.pi * std * std) + (y - mean) ** 2 / (2.0 * std * std)


def auc_binary(scores, labels) -> float:
    """Mann-Whitney AUC with ties counted 1/2; labels must contain both classes."""
    s = np.asarray(scores, dtype=float)
    t = np.asarray(labels)
    if s.shape != t.shape or s.ndim != 1:
        raise ValueError("scores and labels must be equal-length 1-d arrays")
    pos = s[t == 1]
    neg = s[t == 0]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("both classes must be present for AUC")
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float(wins + 0.5 * ties) / (pos.size * neg.size)


def auc_macro(prob_matrix, labels, n_classes: int) -> float:
    """Unweighted mean of one-vs-rest binary AUCs over all classes."""
    P = np.atleast_2d(np.asarray(prob_matrix, dtype=float))
    y = np.asarray(labels, dtype=int)
    if P.shape != (y.size, n_classes):
        raise ValueError(f"prob_matrix must be (n, {n_classes}), got {P.shape}")
    present = np.unique(y)
    if present.size != n_classes:
        raise ValueError(f"all {n_classes} classes must be present, found {present}")
    aucs = [auc_binary(P[:, c], (y == c).astype(int)) for c in range(n_classes)]
    return float(np.mean(aucs))


def predictive_entropy(probs) -> float:
    """Shannon entropy -sum p log p with 0 log 0 := 0 (natural log)."""
    p = _check_probs(probs)
    nz = p > 0.0
    return float(-np.sum(p[nz] * np.log(p[nz])))


def bernoulli_std(p: float) -> float:
    """sqrt(p (1-p)) for a probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    return math.sqrt(p * (1.0 - p))


@dataclass(frozen=True)
class HistogramResult:
    """Left-closed right-open bins (last bin closed) plus overflow counts."""

    bin_edges: np.ndarray
    counts: np.ndarray
    n_below: int
    n_above: int

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("bin_left,bin_right,count\n")
            for left, right, count in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
                fh.write("%.17g,%.17g,%d\n" % (left, right, count))


def histogram(values, n_bins: int, value_range: tuple[float, float]) -> HistogramResult:
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins!r}")
    lo, hi = map(float, value_range)
    if not lo < hi:
        raise ValueError(f"range must satisfy lo < hi, got ({lo}, {hi})")
    v = np.asarray(values, dtype=float).ravel()
    edges = np.linspace(lo, hi, n_bins + 1)
    below = int(np.sum(v < lo))
    above = int(np.sum(v > hi))
    inside = v[(v >= lo) & (v <= hi)]
    idx = np.minimum(np.searchsorted(edges, inside, side="right") - 1, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    return HistogramResult(edges, counts, below, above)


def accuracy(predicted, labels) -> float:
    p = np.asarray(predicted)
    t = np.asarray(labels)
    if p.shape != t.shape:
        raise ValueError("predicted and labels must have the same shape")
    return float(np.mean(p == t))


@dataclass
class MetricReport:
    """Aggregate classification metrics with clamp bookkeeping."""

    accuracy: float
    mean_nlpd: float
    mean_nlpd_mod: float
    macro_auc: float
    n_samples: int
    class_counts: list[int] = field(default_factory=list)
    nlpd_clamped: int = 0
    nlpd_mod_clamped: int = 0

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "mean_nlpd": self.mean_nlpd,
            "mean_nlpd_mod": self.mean_nlpd_mod,
            "macro_auc": self.macro_auc,
            "n_samples": self.n_samples,
            "class_counts": list(self.class_counts),
            "nlpd_clamped": self.nlpd_clamped,
            "nlpd_mod_clamped": self.nlpd_mod_clamped,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        return text


def classification_report(prob_matrix, labels) -> MetricReport:
    """Accuracy, mean NLPD (with clamp counts), mean modified NLPD, and
    macro AUC for a matrix of predicted class probabilities."""
    P = np.atleast_2d(np.asarray(prob_matrix, dtype=float))
    y = np.asarray(labels, dtype=int)
    n, c = P.shape
    if y.shape != (n,):
        raise ValueError("labels must match prob_matrix rows")
    nlpds = []
    clamped = 0
    mods = []
    mod_clamped = 0
    for i in range(n):
        p_true = P[i, y[i]]
        if p_true < NLPD_FLOOR:
            clamped += 1
        nlpds.append(nlpd_class(P[i], y[i]))
        if P[i].max() > 1.0 - NLPD_FLOOR:
            mod_clamped += 1
        mods.append(nlpd_mod(P[i], c))
    counts = np.bincount(y, minlength=c)
    return MetricReport(
        accuracy=accuracy(P.argmax(axis=1), y),
        mean_nlpd=float(np.mean(nlpds)),
        mean_nlpd_mod=float(np.mean(mods)),
        macro_auc=auc_macro(P, y, c),
        n_samples=n,
        class_counts=[int(v) for v in counts],
        nlpd_clamped=clamped,
        nlpd_mod_clamped=mod_clamped,
    )
