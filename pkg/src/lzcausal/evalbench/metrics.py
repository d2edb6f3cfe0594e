from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

__all__ = ["MetricsReport", "compute_metrics", "imbalance_ratio"]


@dataclass
class MetricsReport:
    """Accuracy plus macro precision/recall/F1.

    Macro averages run over the classes present in ``y_true``; a per-class
    score with a zero denominator counts as 0. ``confusion[i][j]`` counts
    rows of true class ``labels[i]`` predicted as ``labels[j]``.
    """

    accuracy: float
    macro_f1: float
    macro_precision: float
    macro_recall: float
    labels: list
    confusion: list[list[int]]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "labels": list(self.labels),
            "confusion": [list(r) for r in self.confusion],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            accuracy=float(d["accuracy"]),
            macro_f1=float(d["macro_f1"]),
            macro_precision=float(d["macro_precision"]),
            macro_recall=float(d["macro_recall"]),
            labels=list(d["labels"]),
            confusion=[[int(v) for v in row] for row in d["confusion"]],
        )


def _sort_key(v):
    return (type(v).__name__, v)


def compute_metrics(y_true: Sequence[Hashable], y_pred: Sequence[Hashable]) -> MetricsReport:
    y_true = list(y_true.tolist() if isinstance(y_true, np.ndarray) else y_true)
    y_pred = list(y_pred.tolist() if isinstance(y_pred, np.ndarray) else y_pred)
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if not y_true:
        raise ValueError("cannot score empty predictions")
    labels = sorted(set(y_true) | set(y_pred), key=_sort_key)
    index = {lab: i for i, lab in enumerate(labels)}
    confusion = np.zeros((len(labels), len(labels)), dtype=int)
    for t, p in zip(y_true, y_pred):
        confusion[index[t], index[p]] += 1

    precisions, recalls, f1s = [], [], []
    for lab in sorted(set(y_true), key=_sort_key):
        i = index[lab]
        tp = confusion[i, i]
        predicted = confusion[:, i].sum()
        actual = confusion[i, :].sum()
        prec = tp / predicted if predicted else 0.0
        rec = tp / actual if actual else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        precisions.append(prec)
        recalls.append(rec)
        f1s.append(f1)

    return MetricsReport(
        accuracy=float(np.trace(confusion) / len(y_true)),
        macro_f1=float(np.mean(f1s)),
        macro_precision=float(np.mean(precisions)),
        macro_recall=float(np.mean(recalls)),
        labels=labels,
        confusion=confusion.tolist(),
    )


def imbalance_ratio(train_targets: Sequence[Hashable]) -> float:
    """Largest class count over smallest, among classes that occur."""
    counts = Counter(train_targets.tolist() if isinstance(train_targets, np.ndarray) else train_targets)
    if not counts:
        raise ValueError("no targets given")
    return max(counts.values()) / min(counts.values())
