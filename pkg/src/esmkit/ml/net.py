"""One-hidden-layer network: logistic activations, sigmoid output,
cross-entropy loss, seeded uniform init, full-batch gradient descent.

`nn_loss_and_grad` works over a flat parameter vector so the analytic
backprop gradient can be checked directly against central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError
from .linear import sigmoid, standardize_fit

_CLIP = 1e-12


def pack(W1: np.ndarray, b1: np.ndarray, w2: np.ndarray, b2: float) -> np.ndarray:
    return np.concatenate([W1.ravel(), b1, w2, [b2]])


def unpack(theta: np.ndarray, d: int, h: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    offset = d * h
    W1 = theta[:offset].reshape(d, h)
    b1 = theta[offset : offset + h]
    w2 = theta[offset + h : offset + 2 * h]
    b2 = float(theta[-1])
    return W1, b1, w2, b2


def nn_loss_and_grad(theta: np.ndarray, Z: np.ndarray, y: np.ndarray, h: int) -> tuple[float, np.ndarray]:
    n, d = Z.shape
    W1, b1, w2, b2 = unpack(theta, d, h)

    hidden = sigmoid(Z @ W1 + b1)
    p = sigmoid(hidden @ w2 + b2)
    pc = np.clip(p, _CLIP, 1.0 - _CLIP)
    loss = -float(np.mean(y * np.log(pc) + (1 - y) * np.log(1 - pc)))

    delta_out = (p - y) / n
    grad_w2 = hidden.T @ delta_out
    grad_b2 = float(delta_out.sum())
    delta_hidden = np.outer(delta_out, w2) * hidden * (1 - hidden)
    grad_W1 = Z.T @ delta_hidden
    grad_b1 = delta_hidden.sum(axis=0)
    return loss, pack(grad_W1, grad_b1, grad_w2, grad_b2)


@dataclass
class NeuralNetModel:
    family = "neural_net"

    W1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    mean: np.ndarray
    std: np.ndarray
    hidden_units: int
    learning_rate: float
    epochs: int
    seed: int
    feature_schema: dict | None = None

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = (X - self.mean) / self.std
        hidden = sigmoid(Z @ self.W1 + self.b1)
        return sigmoid(hidden @ self.w2 + self.b2)

    def params_doc(self) -> dict:
        return {
            "W1": self.W1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "hidden_units": self.hidden_units,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
        }

    @staticmethod
    def from_params(params: dict, seed: int, feature_schema: dict | None) -> "NeuralNetModel":
        return NeuralNetModel(
            W1=np.array(params["W1"], dtype=float),
            b1=np.array(params["b1"], dtype=float),
            w2=np.array(params["w2"], dtype=float),
            b2=params["b2"],
            mean=np.array(params["mean"], dtype=float),
            std=np.array(params["std"], dtype=float),
            hidden_units=params["hidden_units"],
            learning_rate=params["learning_rate"],
            epochs=params["epochs"],
            seed=seed,
            feature_schema=feature_schema,
        )


def init_params(rng: np.random.Generator, d: int, h: int) -> np.ndarray:
    scale_in = 1.0 / math.sqrt(d)
    scale_hidden = 1.0 / math.sqrt(h)
    W1 = rng.uniform(-scale_in, scale_in, size=(d, h))
    b1 = np.zeros(h)
    w2 = rng.uniform(-scale_hidden, scale_hidden, size=h)
    return pack(W1, b1, w2, 0.0)


def train_neural_net(
    data,
    *,
    hidden_units: int = 16,
    learning_rate: float = 0.5,
    epochs: int = 300,
    seed: int = 0,
    feature_schema: dict | None = None,
) -> NeuralNetModel:
    from .dataset import to_matrix

    if hidden_units < 1:
        raise SchemaError("at least one hidden unit required")
    X, y = to_matrix(data)
    if len(y) == 0:
        raise SchemaError("cannot train on empty data")
    mean, std = standardize_fit(X)
    Z = (X - mean) / std
    d = X.shape[1]

    theta = init_params(np.random.default_rng(seed), d, hidden_units)
    for _ in range(epochs):
        _, grad = nn_loss_and_grad(theta, Z, y, hidden_units)
        theta = theta - learning_rate * grad

    W1, b1, w2, b2 = unpack(theta, d, hidden_units)
    return NeuralNetModel(
        W1=W1,
        b1=b1,
        w2=w2,
        b2=b2,
        mean=mean,
        std=std,
        hidden_units=hidden_units,
        learning_rate=learning_rate,
        epochs=epochs,
        seed=seed,
        feature_schema=feature_schema,
    )
