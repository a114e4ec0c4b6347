"""Versioned model documents and the family dispatch table."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import SchemaError
from .bayes import GaussianNBModel, train_gaussian_nb
from .forest import RandomForestModel, train_random_forest
from .linear import LogisticRegressionModel, train_logistic_regression
from .net import NeuralNetModel, train_neural_net
from .tree import DecisionTreeModel, train_decision_tree

FORMAT_VERSION = 1

FAMILIES = {
    "decision_tree": (train_decision_tree, DecisionTreeModel),
    "random_forest": (train_random_forest, RandomForestModel),
    "logistic_regression": (train_logistic_regression, LogisticRegressionModel),
    "gaussian_nb": (train_gaussian_nb, GaussianNBModel),
    "neural_net": (train_neural_net, NeuralNetModel),
}


def train_family(family: str, data, *, seed: int = 0, feature_schema: dict | None = None, **params):
    if family not in FAMILIES:
        raise SchemaError(f"unknown classifier family: {family}")
    train_fn, _ = FAMILIES[family]
    return train_fn(data, seed=seed, feature_schema=feature_schema, **params)


def model_to_doc(model) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "family": model.family,
        "seed": model.seed,
        "feature_schema": model.feature_schema,
        "params": model.params_doc(),
    }


def model_from_doc(doc: dict):
    if doc.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported model format: {doc.get('format_version')}")
    family = doc.get("family")
    if family not in FAMILIES:
        raise SchemaError(f"unknown classifier family: {family}")
    _, model_cls = FAMILIES[family]
    return model_cls.from_params(doc["params"], doc.get("seed", 0), doc.get("feature_schema"))


def save_model(model, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_doc(model), sort_keys=True, indent=1))
    return path


def load_model(path: str | Path):
    return model_from_doc(json.loads(Path(path).read_text()))
