"""Metric arithmetic against brute-force confusion and pairwise-AUC oracles."""

from __future__ import annotations

import random

import numpy as np
import pytest

from esmkit.errors import SchemaError
from esmkit.ml import EvalMetrics, evaluate_scores
from esmkit.ml.labels import encode_label
from esmkit.errors import VocabularyError


def oracle_metrics(y, scores, threshold=0.5):
    """Straight-line confusion arithmetic plus pairwise AUC."""
    tp = fp = tn = fn = 0
    for yi, si in zip(y, scores):
        pred = 1 if si >= threshold else 0
        if yi == 1 and pred == 1:
            tp += 1
        elif yi == 0 and pred == 1:
            fp += 1
        elif yi == 0 and pred == 0:
            tn += 1
        else:
            fn += 1
    n = len(y)
    accuracy = (tp + tn) / n
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    p_e = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n)
    kappa = (accuracy - p_e) / (1 - p_e) if p_e != 1.0 else 0.0

    pos = [s for yi, s in zip(y, scores) if yi == 1]
    neg = [s for yi, s in zip(y, scores) if yi == 0]
    if not pos or not neg:
        auc = 0.5
    else:
        wins = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in pos for q in neg)
        auc = wins / (len(pos) * len(neg))
    return EvalMetrics(accuracy, kappa, precision, recall, f1, auc)


def test_closed_form_confusion_fixture():
    # TP=3, FP=1, FN=2, TN=4 laid out explicitly
    y = [1, 1, 1, 0, 1, 1, 0, 0, 0, 0]
    s = [0.9, 0.8, 0.7, 0.6, 0.2, 0.1, 0.3, 0.2, 0.1, 0.0]
    m = evaluate_scores(y, s)
    assert m.accuracy == pytest.approx(0.7, abs=1e-12)
    assert m.precision == pytest.approx(0.75, abs=1e-12)
    assert m.recall == pytest.approx(0.6, abs=1e-12)
    assert m.f1 == pytest.approx(2 * 0.75 * 0.6 / (0.75 + 0.6), abs=1e-12)
    # marginals: actual 5/5, predicted 4/6 -> p_e = 0.5
    assert m.kappa == pytest.approx((0.7 - 0.5) / (1 - 0.5), abs=1e-12)


def test_perfect_predictions():
    y = [0, 1, 0, 1, 1]
    s = [0.1, 0.9, 0.2, 0.8, 0.7]
    m = evaluate_scores(y, s)
    assert (m.accuracy, m.kappa, m.auc) == (1.0, 1.0, 1.0)
    assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)


def test_all_tied_scores_auc_half():
    m = evaluate_scores([0, 1, 0, 1], [0.4, 0.4, 0.4, 0.4])
    assert m.auc == 0.5


def test_constant_predictions_give_zero_kappa():
    m = evaluate_scores([0, 1, 0, 1], [0.9, 0.9, 0.9, 0.9])
    assert m.kappa == 0.0
    m = evaluate_scores([1, 1, 1, 1], [0.9, 0.9, 0.9, 0.9])  # p_e == 1 edge
    assert m.kappa == 0.0


def test_empty_test_set_rejected():
    with pytest.raises(SchemaError):
        evaluate_scores([], [])


def test_matches_oracle_on_random_instances():
    rng = random.Random(42)
    for _ in range(300):
        n = rng.randint(1, 30)
        y = [rng.randint(0, 1) for _ in range(n)]
        # coarse grid scores force plenty of ties
        s = [rng.choice([0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0]) for _ in range(n)]
        got = evaluate_scores(y, s)
        want = oracle_metrics(y, s)
        assert got == want  # exact, including AUC


def test_auc_negation_symmetry():
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randint(2, 25)
        y = [rng.randint(0, 1) for _ in range(n)]
        s = [rng.choice([0.1, 0.3, 0.5, 0.7]) for _ in range(n)]
        if len(set(y)) < 2:
            continue
        a = evaluate_scores(y, s).auc
        b = evaluate_scores(y, [-x for x in s]).auc
        assert a + b == 1.0


def test_label_encoding():
    assert encode_label("lecture") == 1
    assert encode_label("study_alone") == 1
    assert encode_label("study_group") == 1
    assert encode_label("sleep") == 0
    assert encode_label("meal") == 0
    with pytest.raises(VocabularyError):
        encode_label("juggling")
