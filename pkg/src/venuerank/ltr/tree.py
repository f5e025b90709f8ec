"""Best-first least-squares regression trees with Newton leaf values."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

import numpy as np

LEAF = -1
NEWTON_EPS = 1e-9
# A split must remove at least this fraction of the node's squared error.
MIN_RELATIVE_GAIN = 1e-10


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """Array-encoded binary tree; node 0 is the root.

    ``feature[i] == LEAF`` marks a leaf.  Internal nodes send ``x`` left when
    ``x[feature] <= threshold``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    @property
    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] == LEAF:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))

        return walk(0)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Index of the leaf each row of ``X`` lands in."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            feat = self.feature[node]
            active = feat != LEAF
            if not active.any():
                return node
            go_left = X[rows[active], feat[active]] <= self.threshold[node[active]]
            node[active] = np.where(go_left, self.left[node[active]], self.right[node[active]])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def partitions(self, X: np.ndarray) -> list[frozenset[int]]:
        """Row sets reaching each node, in node order."""
        X = np.asarray(X, dtype=np.float64)
        out: list[frozenset[int]] = [frozenset()] * len(self.feature)

        def walk(node: int, rows: np.ndarray) -> None:
            out[node] = frozenset(rows.tolist())
            if self.feature[node] != LEAF:
                mask = X[rows, self.feature[node]] <= self.threshold[node]
                walk(self.left[node], rows[mask])
                walk(self.right[node], rows[~mask])

        walk(0, np.arange(len(X)))
        return out

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        return cls(
            np.asarray(d["feature"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=np.float64),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["value"], dtype=np.float64),
        )


@dataclass
class _Split:
    gain: float
    feature: int
    threshold: float
    left_rows: np.ndarray
    right_rows: np.ndarray


def _best_split(X: np.ndarray, targets: np.ndarray, rows: np.ndarray, min_leaf: int) -> Optional[_Split]:
    n = len(rows)
    if n < 2 * min_leaf:
        return None
    t = targets[rows]
    total = t.sum()
    sse = float(np.sum((t - total / n) ** 2))
    if sse <= 0.0:
        return None
    base = total * total / n
    sizes = np.arange(min_leaf, n - min_leaf + 1)

    best: Optional[tuple[float, int, int, np.ndarray]] = None
    for f in range(X.shape[1]):
        order = np.argsort(X[rows, f], kind="stable")
        vals = X[rows[order], f]
        csum = np.cumsum(t[order])
        # A split after position p-1 is only valid between distinct values.
        valid = vals[sizes - 1] < vals[sizes]
        if not valid.any():
            continue
        left_sum = csum[sizes - 1]
        gains = left_sum**2 / sizes + (total - left_sum) ** 2 / (n - sizes) - base
        gains = np.where(valid, gains, -np.inf)
        pos = int(np.argmax(gains))  # first maximum -> lowest threshold
        if best is None or gains[pos] > best[0]:
            best = (float(gains[pos]), f, int(sizes[pos]), order)

    if best is None or best[0] <= MIN_RELATIVE_GAIN * sse:
        return None
    gain, f, size, order = best
    vals = X[rows[order], f]
    lo, hi = vals[size - 1], vals[size]
    threshold = (lo + hi) / 2.0
    if not lo <= threshold < hi:
        threshold = lo
    return _Split(gain, f, float(threshold), rows[order[:size]], rows[order[size:]])


def fit_regression_tree(
    X: np.ndarray,
    targets: np.ndarray,
    hessians: np.ndarray,
    max_leaves: int = 8,
    min_instances_per_leaf: int = 5,
    max_depth: Optional[int] = None,
) -> RegressionTree:
    """Grow a tree best-first, always expanding the leaf with the largest gain.

    Splits maximize squared-error reduction of ``targets``; leaves hold the
    Newton step ``sum(targets) / (sum(hessians) + 1e-9)``.  Equal gains are
    resolved toward the lower feature index, then the lower threshold, then
    the earlier-created leaf.
    """
    X = np.asarray(X, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    hessians = np.asarray(hessians, dtype=np.float64)
    if max_leaves < 1:
        raise ValueError("max_leaves must be >= 1")

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    depth: list[int] = []

    def new_node(rows: np.ndarray, d: int) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(targets[rows].sum() / (hessians[rows].sum() + NEWTON_EPS)))
        depth.append(d)
        return len(feature) - 1

    frontier: list[tuple[float, int, _Split]] = []

    def consider(node: int, rows: np.ndarray) -> None:
        if max_depth is not None and depth[node] >= max_depth:
            return
        split = _best_split(X, targets, rows, min_instances_per_leaf)
        if split is not None:
            heapq.heappush(frontier, (-split.gain, node, split))

    root = new_node(np.arange(len(X)), 0)
    consider(root, np.arange(len(X)))
    n_leaves = 1
    while frontier and n_leaves < max_leaves:
        _, node, split = heapq.heappop(frontier)
        feature[node] = split.feature
        threshold[node] = split.threshold
        left[node] = new_node(split.left_rows, depth[node] + 1)
        right[node] = new_node(split.right_rows, depth[node] + 1)
        n_leaves += 1
        consider(left[node], split.left_rows)
        consider(right[node], split.right_rows)

    return RegressionTree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=np.float64),
    )
