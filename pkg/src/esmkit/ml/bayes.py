"""Gaussian naive Bayes with maximum-likelihood moments.

Per-class feature means and (population) variances with a 1e-9 floor,
class priors from counts, posteriors normalized through log-sum-exp so the
two class probabilities always sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError

VARIANCE_FLOOR = 1e-9


@dataclass
class GaussianNBModel:
    family = "gaussian_nb"

    means: np.ndarray  # (2, d); row per class
    variances: np.ndarray  # (2, d)
    priors: np.ndarray  # (2,)
    seed: int = 0
    feature_schema: dict | None = None

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        log_post = np.empty((len(X), 2))
        for c in (0, 1):
            if self.priors[c] == 0.0:
                log_post[:, c] = -np.inf
                continue
            var = self.variances[c]
            log_density = -0.5 * (np.log(2 * math.pi * var) + (X - self.means[c]) ** 2 / var)
            log_post[:, c] = math.log(self.priors[c]) + log_density.sum(axis=1)
        top = np.max(log_post, axis=1, keepdims=True)
        shifted = np.exp(log_post - top)
        return shifted[:, 1] / shifted.sum(axis=1)

    def params_doc(self) -> dict:
        return {
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "priors": self.priors.tolist(),
        }

    @staticmethod
    def from_params(params: dict, seed: int, feature_schema: dict | None) -> "GaussianNBModel":
        return GaussianNBModel(
            means=np.array(params["means"], dtype=float),
            variances=np.array(params["variances"], dtype=float),
            priors=np.array(params["priors"], dtype=float),
            seed=seed,
            feature_schema=feature_schema,
        )


def train_gaussian_nb(data, *, seed: int = 0, feature_schema: dict | None = None) -> GaussianNBModel:
    from .dataset import to_matrix

    X, y = to_matrix(data)
    if len(y) == 0:
        raise SchemaError("cannot train on empty data")
    d = X.shape[1]
    means = np.zeros((2, d))
    variances = np.ones((2, d))
    priors = np.zeros(2)
    for c in (0, 1):
        rows = X[y == c]
        priors[c] = len(rows) / len(y)
        if len(rows):
            means[c] = rows.mean(axis=0)
            variances[c] = np.maximum(rows.var(axis=0), VARIANCE_FLOOR)
    return GaussianNBModel(
        means=means, variances=variances, priors=priors, seed=seed, feature_schema=feature_schema
    )
