"""Distance-weighted k-nearest-neighbor classifier and evaluation metrics.

Neighbor search is exhaustive Euclidean (the reference semantics; any
acceleration must predict identically). Neighbor selection orders training
points by (distance, label id), which makes predictions invariant to
training-row permutations. Votes weigh 1/distance, except that zero-distance
neighbors, when present among the k selected, decide alone by unweighted
majority. All voting ties break toward the smallest label id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError


@dataclass
class KnnModel:
    points: np.ndarray
    labels: np.ndarray
    k: int


def knn_fit(rows, labels, k: int = 4) -> KnnModel:
    points = np.asarray(rows, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ShapeError("training rows must form a non-empty 2-d matrix")
    y = np.asarray(labels, dtype=np.int64)
    if y.shape != (points.shape[0],):
        raise ShapeError("one label per training row is required")
    if k < 1:
        raise ConfigError("k must be >= 1")
    if k > points.shape[0]:
        raise ConfigError(f"k={k} exceeds the {points.shape[0]} training rows")
    return KnnModel(points=points, labels=y, k=k)


def _vote(dists: np.ndarray, labels: np.ndarray) -> int:
    zero = dists == 0.0
    weights: dict[int, float] = {}
    if zero.any():
        for label in labels[zero]:
            weights[int(label)] = weights.get(int(label), 0.0) + 1.0
    else:
        for d, label in zip(dists, labels):
            weights[int(label)] = weights.get(int(label), 0.0) + 1.0 / d
    best_label, best_weight = -1, -1.0
    for label in sorted(weights):
        if weights[label] > best_weight:
            best_label, best_weight = label, weights[label]
    return best_label


def knn_predict(model: KnnModel, queries) -> list[int]:
    q = np.asarray(queries, dtype=np.float64)
    if q.ndim == 1:
        q = q.reshape(1, -1)
    if q.ndim != 2 or q.shape[1] != model.points.shape[1]:
        raise ShapeError(
            f"query width {q.shape[1] if q.ndim == 2 else '?'} != "
            f"training width {model.points.shape[1]}"
        )
    out = []
    for row in q:
        diff = model.points - row
        dists = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        chosen = np.lexsort((model.labels, dists))[: model.k]
        out.append(_vote(dists[chosen], model.labels[chosen]))
    return out


@dataclass
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: dict[int, dict[str, float]] = field(default_factory=dict)
    confusion: dict[tuple[int, int], int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_class": {str(c): m for c, m in self.per_class.items()},
            "confusion": [
                {"true": t, "predicted": p, "count": n}
                for (t, p), n in sorted(self.confusion.items())
            ],
        }


def evaluate(predicted, truth) -> EvalReport:
    """Accuracy plus support-weighted precision/recall/F1 (0/0 -> 0)."""
    predicted = list(predicted)
    truth = list(truth)
    if len(predicted) != len(truth):
        raise ShapeError("predicted and truth lengths differ")
    if not truth:
        raise ShapeError("cannot evaluate an empty prediction set")
    confusion: dict[tuple[int, int], int] = {}
    for t, p in zip(truth, predicted):
        confusion[(t, p)] = confusion.get((t, p), 0) + 1
    classes = sorted(set(truth) | set(predicted))
    n = len(truth)
    correct = sum(confusion.get((c, c), 0) for c in classes)
    per_class: dict[int, dict[str, float]] = {}
    w_precision = w_recall = w_f1 = 0.0
    for c in classes:
        tp = confusion.get((c, c), 0)
        fp = sum(confusion.get((t, c), 0) for t in classes if t != c)
        fn = sum(confusion.get((c, p), 0) for p in classes if p != c)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[c] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": float(support),
        }
        w_precision += support * precision
        w_recall += support * recall
        w_f1 += support * f1
    return EvalReport(
        accuracy=correct / n,
        precision=w_precision / n,
        recall=w_recall / n,
        f1=w_f1 / n,
        per_class=per_class,
        confusion=confusion,
    )
