"""Binary-classification metrics over probability scores.

Conventions, fixed here and relied on by tests:
- predictions are `score >= threshold`;
- precision and recall are 0 when their denominator is 0, F1 is 0 when
  precision + recall is 0;
- kappa uses marginal expected agreement and is 0 when that equals 1;
- AUC is the probability a random positive outscores a random negative,
  ties counted half, via midranks; a test set with a single class gets 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    kappa: float
    precision: float
    recall: float
    f1: float
    auc: float

    def to_doc(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "kappa": self.kappa,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
        }

    @staticmethod
    def from_doc(doc: dict) -> "EvalMetrics":
        return EvalMetrics(
            accuracy=doc["accuracy"],
            kappa=doc["kappa"],
            precision=doc["precision"],
            recall=doc["recall"],
            f1=doc["f1"],
            auc=doc["auc"],
        )


def rank_auc(y: np.ndarray, scores: np.ndarray) -> float:
    """Midrank AUC; exact for dyadic tie weights."""
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        return 0.5
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    ranks = np.empty(len(scores), dtype=float)
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # midrank of the tie group [i, j], 1-based ranks
        midrank = (i + j) / 2.0 + 1.0
        ranks[order[i : j + 1]] = midrank
        i = j + 1
    rank_sum_pos = float(np.sum(ranks[y == 1]))
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def evaluate_scores(y_true, scores, threshold: float = 0.5) -> EvalMetrics:
    y = np.asarray(y_true, dtype=int)
    s = np.asarray(scores, dtype=float)
    if y.size == 0:
        raise SchemaError("cannot evaluate an empty test set")
    if y.shape != s.shape:
        raise SchemaError("labels and scores must align")
    pred = (s >= threshold).astype(int)

    tp = int(np.sum((y == 1) & (pred == 1)))
    tn = int(np.sum((y == 0) & (pred == 0)))
    fp = int(np.sum((y == 0) & (pred == 1)))
    fn = int(np.sum((y == 1) & (pred == 0)))
    n = tp + tn + fp + fn

    accuracy = (tp + tn) / n
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0

    p_o = accuracy
    p_e = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n)
    kappa = (p_o - p_e) / (1 - p_e) if p_e != 1.0 else 0.0

    return EvalMetrics(
        accuracy=accuracy,
        kappa=kappa,
        precision=precision,
        recall=recall,
        f1=f1,
        auc=rank_auc(y, s),
    )


def evaluate(model, test, threshold: float = 0.5) -> EvalMetrics:
    """Family-agnostic evaluation of a trained model on labeled examples."""
    from .dataset import to_matrix

    X, y = to_matrix(test)
    if len(y) == 0:
        raise SchemaError("cannot evaluate an empty test set")
    scores = model.predict_proba(X)
    return evaluate_scores(y, scores, threshold)
