"""Classifier metrics: rank-based AUC-ROC, average-precision AUC-PRC, Brier."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AucUndefinedError


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the average of their rank run."""
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    boundaries = np.nonzero(np.r_[True, sx[1:] != sx[:-1], True])[0]
    ranks_sorted = np.empty(len(x), dtype=np.float64)
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        ranks_sorted[lo:hi] = 0.5 * (lo + 1 + hi)
    ranks = np.empty(len(x), dtype=np.float64)
    ranks[order] = ranks_sorted
    return ranks


def auc_roc(scores, labels) -> float:
    """Mann-Whitney statistic: P(score_pos > score_neg), ties counted 0.5."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    n_pos = int(np.sum(labels > 0.5))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise AucUndefinedError("AUC-ROC needs both classes in the labels")
    ranks = _average_ranks(scores)
    rank_sum = float(np.sum(ranks[labels > 0.5]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_prc(scores, labels) -> float:
    """Average precision: precision summed at each recall step, descending
    score order, tied scores grouped at one threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    n_pos = int(np.sum(labels > 0.5))
    if n_pos == 0 or n_pos == len(labels):
        raise AucUndefinedError("AUC-PRC needs both classes in the labels")

    order = np.argsort(-scores, kind="mergesort")
    y = labels[order]
    s = scores[order]
    tp = np.cumsum(y > 0.5)
    predicted = np.arange(1, len(y) + 1)
    group_end = np.r_[s[1:] != s[:-1], True]

    ap = 0.0
    prev_recall = 0.0
    for i in np.nonzero(group_end)[0]:
        precision = tp[i] / predicted[i]
        recall = tp[i] / n_pos
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return float(ap)


def brier(scores, labels) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    return float(np.mean((scores - labels) ** 2))


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    auc_roc: float
    auc_prc: float
    brier: float
    threshold: float
    no_positive_predictions: bool = False

    def __post_init__(self):
        for name in ("precision", "recall", "auc_roc", "auc_prc", "brier"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} = {value} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "auc_roc": self.auc_roc,
            "auc_prc": self.auc_prc,
            "brier": self.brier,
            "threshold": self.threshold,
            "no_positive_predictions": self.no_positive_predictions,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(**d)


def evaluate_scores(scores, labels, threshold: float = 0.5) -> MetricsReport:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if len(scores) == 0:
        raise AucUndefinedError("cannot evaluate an empty test set")

    predicted_pos = scores >= threshold
    tp = int(np.sum(predicted_pos & (labels > 0.5)))
    fp = int(np.sum(predicted_pos & (labels <= 0.5)))
    fn = int(np.sum(~predicted_pos & (labels > 0.5)))

    no_positive_predictions = (tp + fp) == 0
    precision = 1.0 if no_positive_predictions else tp / (tp + fp)
    recall = 0.0 if (tp + fn) == 0 else tp / (tp + fn)

    return MetricsReport(
        precision=precision,
        recall=recall,
        auc_roc=auc_roc(scores, labels),
        auc_prc=auc_prc(scores, labels),
        brier=brier(scores, labels),
        threshold=threshold,
        no_positive_predictions=no_positive_predictions,
    )


def evaluate(model, x_test, y_test, threshold: float = 0.5) -> MetricsReport:
    return evaluate_scores(model.predict_proba(x_test), y_test, threshold)
