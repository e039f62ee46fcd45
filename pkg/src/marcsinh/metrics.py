"""Accuracy and support-weighted precision/recall/F1 from confusion matrices."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ClassStats:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    """Evaluation summary for one trained classifier on one test set.

    weighted_recall equals accuracy for single-label classification; both are
    kept because the benchmark tables report both columns.
    """

    accuracy: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    per_class: tuple = field(default_factory=tuple)
    train_time_s: float = 0.0
    converged: bool = True


def confusion_matrix(y_true, y_pred, n_classes):
    """Count matrix with entry (i, j) = samples of true class i predicted as j."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError(
            f"label arrays must be 1-D and equal length, got {y_true.shape} and {y_pred.shape}"
        )
    if y_true.size and (
        y_true.min() < 0
        or y_pred.min() < 0
        or y_true.max() >= n_classes
        or y_pred.max() >= n_classes
    ):
        raise ValueError(f"labels must lie in [0, {n_classes})")
    flat = np.bincount(y_true * n_classes + y_pred, minlength=n_classes * n_classes)
    return flat.reshape(n_classes, n_classes)


def weighted_report(cm, train_time_s=0.0, converged=True):
    """Per-class and support-weighted metrics from a confusion matrix.

    Precision/recall with an empty column/row (0/0) are reported as 0, the
    usual zero-division convention, so degenerate all-one-class predictions
    still yield a report.
    """
    cm = np.asarray(cm, dtype=float)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1] or cm.shape[0] == 0:
        raise ValueError("confusion matrix must be square and non-empty")
    if (cm < 0).any():
        raise ValueError("confusion matrix entries must be non-negative")
    total = cm.sum()
    if total <= 0:
        raise ValueError("confusion matrix has no samples")

    diag = np.diag(cm)
    row = cm.sum(axis=1)  # support per true class
    col = cm.sum(axis=0)  # predictions per class
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(col > 0, diag / col, 0.0)
        recall = np.where(row > 0, diag / row, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / pr, 0.0)

    weight = row / total
    per_class = tuple(
        ClassStats(float(precision[c]), float(recall[c]), float(f1[c]), int(row[c]))
        for c in range(cm.shape[0])
    )
    return EvalReport(
        accuracy=float(diag.sum() / total),
        weighted_precision=float((weight * precision).sum()),
        weighted_recall=float((weight * recall).sum()),
        weighted_f1=float((weight * f1).sum()),
        per_class=per_class,
        train_time_s=train_time_s,
        converged=converged,
    )
