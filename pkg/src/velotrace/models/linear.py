"""Ordinary least squares with intercept, solved by SVD-based least squares.

The minimum-norm solution tolerates the collinearity that full one-hot
encoding introduces: predictions are well-defined even when coefficients
are not unique."""

from __future__ import annotations

import numpy as np

from ..errors import InputError


class LinearModel:
    def __init__(self, coef: np.ndarray):
        self.coef = coef  # intercept first

    @classmethod
    def fit(cls, X, y) -> "LinearModel":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or len(X) != len(y) or len(y) < 2:
            raise InputError("linear fit needs a 2-D X and >= 2 rows")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise InputError("non-finite values in training data")
        A = np.hstack([np.ones((len(y), 1)), X])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return cls(coef)

    @property
    def intercept(self) -> float:
        return float(self.coef[0])

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return self.coef[0] + X @ self.coef[1:]
