"""Busy-period learning: labels, features, five classifier families, metrics.

Each family trains from scratch on labeled feature vectors and exposes the
same `predict_proba` contract, so evaluation and avoid-window derivation
are family-agnostic.
"""

from .metrics import EvalMetrics, evaluate, evaluate_scores
from .labels import encode_label
from .features import ClusterSpec, FeatureExtractor, FeatureSchema, extract_features
from .tree import DecisionTreeModel, train_decision_tree
from .forest import RandomForestModel, train_random_forest
from .linear import LogisticRegressionModel, train_logistic_regression
from .bayes import GaussianNBModel, train_gaussian_nb
from .net import NeuralNetModel, train_neural_net
from .dataset import LabeledExample, collect_training_data, split_chronological, to_matrix
from .windows import derive_avoid_windows
from .model_io import load_model, model_from_doc, model_to_doc, save_model, train_family

__all__ = [
    "EvalMetrics",
    "evaluate",
    "evaluate_scores",
    "encode_label",
    "ClusterSpec",
    "FeatureExtractor",
    "FeatureSchema",
    "extract_features",
    "DecisionTreeModel",
    "train_decision_tree",
    "RandomForestModel",
    "train_random_forest",
    "LogisticRegressionModel",
    "train_logistic_regression",
    "GaussianNBModel",
    "train_gaussian_nb",
    "NeuralNetModel",
    "train_neural_net",
    "LabeledExample",
    "collect_training_data",
    "split_chronological",
    "to_matrix",
    "derive_avoid_windows",
    "load_model",
    "model_from_doc",
    "model_to_doc",
    "save_model",
    "train_family",
]
