"""Gradient-boosted regression trees with squared loss: start from the mean,
fit each round's tree to the current residuals, add it scaled by the learning
rate. Per-round training MSE is recorded (it is provably non-increasing for
learning rates in (0, 1])."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError, ParameterError
from .tree import FEATURES_ALL, RegressionTree


@dataclass(frozen=True)
class BoostParams:
    n_rounds: int = 200
    max_depth: int | None = 4
    learning_rate: float = 0.1
    min_samples_leaf: int = 1

    def validate(self) -> None:
        if self.n_rounds < 0:
            raise ParameterError(f"n_rounds must be >= 0, got {self.n_rounds}")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ParameterError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ParameterError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise ParameterError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")


class GradientBoosting:
    def __init__(self, params: BoostParams, base_score: float,
                 trees: list[RegressionTree], train_mse: list[float]):
        self.params = params
        self.base_score = base_score
        self.trees = trees
        self.train_mse = train_mse  # after each round

    @classmethod
    def fit(cls, X, y, params: BoostParams, seed: int = 0) -> "GradientBoosting":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or len(X) != len(y) or len(y) < 2:
            raise InputError("boosting needs a 2-D X and >= 2 rows")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise InputError("non-finite values in training data")
        params.validate()

        base = float(y.mean())
        pred = np.full(len(y), base)
        trees: list[RegressionTree] = []
        losses: list[float] = []
        rng = np.random.default_rng((seed, 0))
        for _ in range(params.n_rounds):
            residual = y - pred
            tree = RegressionTree.fit(X, residual, rng=rng, max_depth=params.max_depth,
                                      min_samples_leaf=params.min_samples_leaf,
                                      max_features=FEATURES_ALL)
            pred = pred + params.learning_rate * tree.predict(X)
            trees.append(tree)
            losses.append(float(((y - pred) ** 2).mean()))
        return cls(params, base, trees, losses)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        acc = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            acc += self.params.learning_rate * tree.predict(X)
        return acc
