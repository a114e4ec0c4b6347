"""Binary classification tree: greedy splits minimizing weighted Gini.

Candidate thresholds are midpoints between consecutive distinct sorted
feature values. A split is taken only when it strictly reduces weighted
impurity; ties break toward the lowest feature index, then the lowest
threshold, which makes training fully deterministic. Leaf probability is
the positive fraction at the leaf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError

_EPS = 1e-12


def gini(y: np.ndarray) -> float:
    """Impurity 1 - p0^2 - p1^2 of a label vector."""
    if len(y) == 0:
        return 0.0
    p1 = float(np.mean(y))
    return 1.0 - (1.0 - p1) ** 2 - p1**2


def _best_split_for_feature(
    x: np.ndarray, y: np.ndarray, min_samples_leaf: int
) -> tuple[float, float] | None:
    """Best (weighted impurity, threshold) along one feature, or None."""
    n = len(y)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    boundaries = np.nonzero(xs[1:] != xs[:-1])[0] + 1  # split before index i
    if len(boundaries) == 0:
        return None
    n_left = boundaries.astype(float)
    n_right = n - n_left
    ok = (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    if not np.any(ok):
        return None
    prefix_pos = np.cumsum(ys)
    pos_left = prefix_pos[boundaries - 1].astype(float)
    pos_right = float(prefix_pos[-1]) - pos_left

    p1l = pos_left / n_left
    p1r = pos_right / n_right
    gini_left = 1.0 - (1.0 - p1l) ** 2 - p1l**2
    gini_right = 1.0 - (1.0 - p1r) ** 2 - p1r**2
    weighted = (n_left * gini_left + n_right * gini_right) / n
    weighted = np.where(ok, weighted, np.inf)

    best = int(np.argmin(weighted))  # first minimum -> lowest threshold
    i = boundaries[best]
    threshold = (xs[i - 1] + xs[i]) / 2.0
    return float(weighted[best]), float(threshold)


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    proba: float = 0.0

    def to_doc(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "proba": self.proba,
        }

    @staticmethod
    def from_doc(doc: dict) -> "_Node":
        return _Node(**doc)


@dataclass
class DecisionTreeModel:
    family = "decision_tree"

    nodes: list[_Node]
    max_depth: int | None
    min_samples_leaf: int
    seed: int
    feature_schema: dict | None = None

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        idx = np.zeros(len(X), dtype=int)
        features = np.array([n.feature for n in self.nodes])
        thresholds = np.array([n.threshold for n in self.nodes])
        lefts = np.array([n.left for n in self.nodes])
        rights = np.array([n.right for n in self.nodes])
        probas = np.array([n.proba for n in self.nodes])
        active = features[idx] >= 0
        while np.any(active):
            rows = np.nonzero(active)[0]
            node = idx[rows]
            go_left = X[rows, features[node]] < thresholds[node]
            idx[rows] = np.where(go_left, lefts[node], rights[node])
            active = features[idx] >= 0
        return probas[idx]

    def params_doc(self) -> dict:
        return {
            "nodes": [n.to_doc() for n in self.nodes],
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
        }

    @staticmethod
    def from_params(params: dict, seed: int, feature_schema: dict | None) -> "DecisionTreeModel":
        return DecisionTreeModel(
            nodes=[_Node.from_doc(d) for d in params["nodes"]],
            max_depth=params["max_depth"],
            min_samples_leaf=params["min_samples_leaf"],
            seed=seed,
            feature_schema=feature_schema,
        )


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    nodes: list[_Node],
    depth: int,
    max_depth: int | None,
    min_samples_leaf: int,
    feature_pick=None,
) -> int:
    """Append the subtree for (X, y); returns its root node index."""
    node_id = len(nodes)
    proba = float(np.mean(y)) if len(y) else 0.0
    nodes.append(_Node(proba=proba))

    node_impurity = gini(y)
    if node_impurity <= _EPS or (max_depth is not None and depth >= max_depth):
        return node_id
    if len(y) < 2 * min_samples_leaf:
        return node_id

    d = X.shape[1]
    candidates = feature_pick(d) if feature_pick is not None else range(d)

    best: tuple[float, int, float] | None = None  # (weighted, feature, threshold)
    for f in candidates:
        found = _best_split_for_feature(X[:, f], y, min_samples_leaf)
        if found is None:
            continue
        weighted, threshold = found
        if best is None or weighted < best[0]:
            best = (weighted, f, threshold)
    if best is None or best[0] >= node_impurity - _EPS:
        return node_id

    _, feature, threshold = best
    feature = int(feature)
    mask = X[:, feature] < threshold
    left = _grow(X[mask], y[mask], nodes, depth + 1, max_depth, min_samples_leaf, feature_pick)
    right = _grow(X[~mask], y[~mask], nodes, depth + 1, max_depth, min_samples_leaf, feature_pick)
    node = nodes[node_id]
    node.feature = feature
    node.threshold = threshold
    node.left = left
    node.right = right
    return node_id


def train_decision_tree(
    data,
    *,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    seed: int = 0,
    feature_schema: dict | None = None,
    _feature_pick=None,
) -> DecisionTreeModel:
    from .dataset import to_matrix

    X, y = to_matrix(data)
    if len(y) == 0:
        raise SchemaError("cannot train on empty data")
    if min_samples_leaf < 1:
        raise SchemaError("min_samples_leaf must be >= 1")
    nodes: list[_Node] = []
    _grow(X, y, nodes, 0, max_depth, min_samples_leaf, _feature_pick)
    return DecisionTreeModel(
        nodes=nodes,
        max_depth=max_depth,
        min_samples_leaf=min_samples_leaf,
        seed=seed,
        feature_schema=feature_schema,
    )
