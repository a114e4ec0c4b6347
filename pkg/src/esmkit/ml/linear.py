"""Logistic regression: full-batch gradient descent on cross-entropy.

Features are standardized (means and deviations live in the model); the
L2 penalty stays off the bias. Weights start at zero, so an untrained
model scores 0.5 everywhere. `lr_loss_and_grad` is the single source of
the objective, shared by training and the finite-difference checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SchemaError

_CLIP = 1e-12


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def standardize_fit(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return mean, std


def lr_loss_and_grad(
    w: np.ndarray, b: float, Z: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, float]:
    n = len(y)
    p = sigmoid(Z @ w + b)
    pc = np.clip(p, _CLIP, 1.0 - _CLIP)
    loss = -float(np.mean(y * np.log(pc) + (1 - y) * np.log(1 - pc)))
    loss += l2 / (2 * n) * float(w @ w)
    grad_w = Z.T @ (p - y) / n + (l2 / n) * w
    grad_b = float(np.mean(p - y))
    return loss, grad_w, grad_b


@dataclass
class LogisticRegressionModel:
    family = "logistic_regression"

    weights: np.ndarray
    bias: float
    mean: np.ndarray
    std: np.ndarray
    learning_rate: float
    epochs: int
    l2: float
    seed: int
    feature_schema: dict | None = None
    loss_trace: list[float] = field(default_factory=list, repr=False)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = (X - self.mean) / self.std
        return sigmoid(Z @ self.weights + self.bias)

    def params_doc(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "l2": self.l2,
        }

    @staticmethod
    def from_params(params: dict, seed: int, feature_schema: dict | None) -> "LogisticRegressionModel":
        return LogisticRegressionModel(
            weights=np.array(params["weights"], dtype=float),
            bias=params["bias"],
            mean=np.array(params["mean"], dtype=float),
            std=np.array(params["std"], dtype=float),
            learning_rate=params["learning_rate"],
            epochs=params["epochs"],
            l2=params["l2"],
            seed=seed,
            feature_schema=feature_schema,
        )


def train_logistic_regression(
    data,
    *,
    learning_rate: float = 0.5,
    epochs: int = 300,
    l2: float = 0.0,
    seed: int = 0,
    feature_schema: dict | None = None,
) -> LogisticRegressionModel:
    from .dataset import to_matrix

    X, y = to_matrix(data)
    if len(y) == 0:
        raise SchemaError("cannot train on empty data")
    mean, std = standardize_fit(X)
    Z = (X - mean) / std

    w = np.zeros(X.shape[1])
    b = 0.0
    trace: list[float] = []
    for _ in range(epochs):
        loss, grad_w, grad_b = lr_loss_and_grad(w, b, Z, y, l2)
        trace.append(loss)
        w = w - learning_rate * grad_w
        b = b - learning_rate * grad_b
    trace.append(lr_loss_and_grad(w, b, Z, y, l2)[0])

    return LogisticRegressionModel(
        weights=w,
        bias=b,
        mean=mean,
        std=std,
        learning_rate=learning_rate,
        epochs=epochs,
        l2=l2,
        seed=seed,
        feature_schema=feature_schema,
        loss_trace=trace,
    )
