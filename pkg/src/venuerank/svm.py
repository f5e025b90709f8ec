"""Linear SVM trained by Pegasos-style subgradient descent on the hinge loss.

Each epoch takes one full-batch subgradient step with step size
``1 / (lambda_reg * t)`` followed by projection onto the ball of radius
``1 / sqrt(lambda_reg)``.  The violator sum is accumulated in an order drawn
from the seeded generator.  Because the loss is an average over documents,
duplicating the training set leaves the trajectory unchanged up to rounding.

The bias is trained as the weight of a constant feature and is therefore
regularized along with the other weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import TrainingDiverged
from .text import SparseVector


@dataclass(frozen=True)
class LabeledDocument:
    vector: SparseVector
    label: int

    def __post_init__(self):
        if self.label not in (1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")


@dataclass(frozen=True, eq=False)
class SvmModel:
    weights: np.ndarray
    bias: float
    training_meta: dict = field(default_factory=dict)

    def decision(self, vector: SparseVector) -> float:
        """w . x + bias for a sparse vector."""
        if not len(vector):
            return float(self.bias)
        idx = np.fromiter(vector.indices, dtype=np.int64, count=len(vector))
        vals = np.fromiter(vector.weights, dtype=np.float64, count=len(vector))
        return float(np.dot(self.weights[idx], vals) + self.bias)

    def decision_dense(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.weights + self.bias

    def predict(self, vector: SparseVector) -> int:
        return 1 if self.decision(vector) > 0 else -1


def _design_matrix(data: Sequence[LabeledDocument], n_features: int) -> np.ndarray:
    # Last column is the constant bias feature.
    X = np.zeros((len(data), n_features + 1))
    for row, doc in enumerate(data):
        for idx, weight in doc.vector.items():
            X[row, idx] = weight
    X[:, -1] = 1.0
    return X


def hinge_objective(w: np.ndarray, X: np.ndarray, y: np.ndarray, lambda_reg: float) -> float:
    """lambda/2 * ||w||^2 + mean hinge loss, with the bias as last entry of w."""
    margins = y * (X @ w)
    return 0.5 * lambda_reg * float(w @ w) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def train_linear_svm(
    data: Sequence[LabeledDocument],
    lambda_reg: float = 1e-4,
    epochs: int = 50,
    seed: int = 0,
    n_features: Optional[int] = None,
) -> SvmModel:
    """Fit a linear SVM and return the lowest-objective epoch iterate.

    The zero model is the starting point and is itself a candidate, so the
    returned objective never exceeds the initial one.  No class weighting is
    applied.

    Raises:
        ValueError: empty data or non-positive ``lambda_reg``.
        TrainingDiverged: the objective became NaN or infinite.
    """
    if not data:
        raise ValueError("no training documents")
    if lambda_reg <= 0:
        raise ValueError("lambda_reg must be positive")
    if n_features is None:
        n_features = 1 + max((max(d.vector.indices, default=-1) for d in data), default=-1)

    X = _design_matrix(data, n_features)
    y = np.array([d.label for d in data], dtype=np.float64)
    n = len(data)
    rng = np.random.default_rng(seed)
    radius = 1.0 / math.sqrt(lambda_reg)

    w = np.zeros(n_features + 1)
    best_w = w.copy()
    initial = best_obj = hinge_objective(w, X, y, lambda_reg)
    best_epoch = 0

    for t in range(1, epochs + 1):
        order = rng.permutation(n)
        Xo, yo = X[order], y[order]
        violators = yo * (Xo @ w) < 1.0
        pull = (yo[violators, None] * Xo[violators]).sum(axis=0) / n
        w = w - (lambda_reg * w - pull) / (lambda_reg * t)
        norm = math.sqrt(float(w @ w))
        if norm > radius:
            w *= radius / norm
        obj = hinge_objective(w, X, y, lambda_reg)
        if not math.isfinite(obj):
            raise TrainingDiverged(f"objective became {obj} at epoch {t}")
        if obj < best_obj:
            best_obj, best_w, best_epoch = obj, w.copy(), t

    meta = {
        "epochs": epochs,
        "lambda_reg": lambda_reg,
        "seed": seed,
        "n_pos": int(np.sum(y > 0)),
        "n_neg": int(np.sum(y < 0)),
        "best_epoch": best_epoch,
        "initial_objective": initial,
        "objective": best_obj,
    }
    return SvmModel(best_w[:-1].copy(), float(best_w[-1]), meta)
