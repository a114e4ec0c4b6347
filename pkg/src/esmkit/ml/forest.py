"""Bootstrap forest of Gini trees with per-split feature subsampling.

Tree i resamples with a generator seeded `seed + i` and, unless disabled,
considers ceil(sqrt(d)) features per split. Forest probability is the
arithmetic mean of tree probabilities, accumulated with exact summation so
tree order never changes predictions. With one tree, bootstrap off and
subsampling off, the forest reproduces the plain decision tree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError
from .tree import DecisionTreeModel, _grow, _Node


@dataclass
class RandomForestModel:
    family = "random_forest"

    trees: list[DecisionTreeModel]
    n_trees: int
    max_depth: int | None
    min_samples_leaf: int
    seed: int
    bootstrap: bool
    feature_subsample: str  # "sqrt" | "all"
    feature_schema: dict | None = None

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        per_tree = [tree.predict_proba(X) for tree in self.trees]
        n = len(self.trees)
        # exact, order-independent mean
        return np.array([math.fsum(col) / n for col in zip(*per_tree)])

    def params_doc(self) -> dict:
        return {
            "trees": [t.params_doc() for t in self.trees],
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "bootstrap": self.bootstrap,
            "feature_subsample": self.feature_subsample,
        }

    @staticmethod
    def from_params(params: dict, seed: int, feature_schema: dict | None) -> "RandomForestModel":
        trees = [
            DecisionTreeModel.from_params(tp, seed + i, feature_schema)
            for i, tp in enumerate(params["trees"])
        ]
        return RandomForestModel(
            trees=trees,
            n_trees=params["n_trees"],
            max_depth=params["max_depth"],
            min_samples_leaf=params["min_samples_leaf"],
            seed=seed,
            bootstrap=params["bootstrap"],
            feature_subsample=params["feature_subsample"],
            feature_schema=feature_schema,
        )


def train_random_forest(
    data,
    *,
    n_trees: int = 20,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    seed: int = 0,
    bootstrap: bool = True,
    feature_subsample: str = "sqrt",
    feature_schema: dict | None = None,
) -> RandomForestModel:
    from .dataset import to_matrix

    if n_trees < 1:
        raise SchemaError("a forest needs at least one tree")
    if feature_subsample not in ("sqrt", "all"):
        raise SchemaError(f"unknown feature subsample mode: {feature_subsample}")
    X, y = to_matrix(data)
    if len(y) == 0:
        raise SchemaError("cannot train on empty data")

    n, d = X.shape
    m = max(1, math.ceil(math.sqrt(d)))
    trees: list[DecisionTreeModel] = []
    for i in range(n_trees):
        rng = np.random.default_rng(seed + i)
        if bootstrap:
            indices = rng.integers(0, n, size=n)
            Xi, yi = X[indices], y[indices]
        else:
            Xi, yi = X, y
        if feature_subsample == "sqrt" and m < d:
            def pick(dim: int, rng=rng, m=m):
                return np.sort(rng.choice(dim, size=m, replace=False))
        else:
            pick = None
        nodes: list[_Node] = []
        _grow(Xi, yi, nodes, 0, max_depth, min_samples_leaf, pick)
        trees.append(
            DecisionTreeModel(
                nodes=nodes,
                max_depth=max_depth,
                min_samples_leaf=min_samples_leaf,
                seed=seed + i,
                feature_schema=feature_schema,
            )
        )
    return RandomForestModel(
        trees=trees,
        n_trees=n_trees,
        max_depth=max_depth,
        min_samples_leaf=min_samples_leaf,
        seed=seed,
        bootstrap=bootstrap,
        feature_subsample=feature_subsample,
        feature_schema=feature_schema,
    )
