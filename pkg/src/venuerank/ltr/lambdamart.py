"""LambdaMART: gradient-boosted regression trees driven by NDCG@k lambdas."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import UntrainableDataset
from ..evaluation import ndcg_from_grades
from .features import RankingInstance
from .tree import RegressionTree, fit_regression_tree

logger = logging.getLogger(__name__)

NDCG_CUTOFF = 5
SIGMA = 1.0


def current_order(venue_ids: Sequence[str], scores: np.ndarray) -> np.ndarray:
    """Indices in rank order: descending score, ties by ascending venue id."""
    return np.asarray(
        sorted(range(len(venue_ids)), key=lambda i: (-scores[i], venue_ids[i])), dtype=np.int64
    )


def _gains_and_ideal(labels: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    gains = 2.0**labels - 1.0
    ideal = np.sort(gains)[::-1][:k]
    idcg = float(np.sum(ideal / np.log2(np.arange(2, len(ideal) + 2))))
    return gains, idcg


def lambda_gradients(
    instances: Sequence[RankingInstance],
    current_scores: Sequence[float],
    k: int = NDCG_CUTOFF,
    sigma: float = SIGMA,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-instance lambdas and second-order weights for one query.

    For each pair with ``label_i > label_j`` the pair contributes
    ``rho * |dNDCG@k|`` to ``lambda_i`` and subtracts it from ``lambda_j``,
    where ``rho = 1 / (1 + exp(sigma * (s_i - s_j)))`` and ``|dNDCG@k|`` is
    the change from swapping the two in the current ranking.  Positive
    lambdas push an instance up.
    """
    n = len(instances)
    scores = np.asarray(current_scores, dtype=np.float64)
    labels = np.array([inst.relevance_label for inst in instances], dtype=np.float64)
    lambdas = np.zeros(n)
    hessians = np.zeros(n)
    if n < 2:
        return lambdas, hessians

    gains, idcg = _gains_and_ideal(labels, k)
    if idcg == 0.0:
        return lambdas, hessians

    order = current_order([inst.venue_id for inst in instances], scores)
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(1, n + 1)
    discount = np.where(position <= k, 1.0 / np.log2(position + 1.0), 0.0)

    pairs = labels[:, None] > labels[None, :]
    delta = np.abs((gains[:, None] - gains[None, :]) * (discount[:, None] - discount[None, :])) / idcg
    diff = scores[:, None] - scores[None, :]
    with np.errstate(over="ignore"):
        rho = 1.0 / (1.0 + np.exp(sigma * diff))
    lam = np.where(pairs, sigma * rho * delta, 0.0)
    hess = np.where(pairs, sigma * sigma * rho * (1.0 - rho) * delta, 0.0)

    lambdas = lam.sum(axis=1) - lam.sum(axis=0)
    hessians = hess.sum(axis=1) + hess.sum(axis=0)
    return lambdas, hessians


@dataclass(frozen=True, eq=False)
class LambdaMartModel:
    trees: tuple[RegressionTree, ...]
    learning_rate: float
    config: dict = field(default_factory=dict)
    seed: int = 0
    training_ndcg: tuple[float, ...] = ()

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64).reshape(-1, 7)
        scores = np.zeros(len(X))
        for tree in self.trees:
            scores += self.learning_rate * tree.predict(X)
        return scores


@dataclass
class _Query:
    query_id: str
    instances: list[RankingInstance]
    rows: np.ndarray


def group_queries(instances: Sequence[RankingInstance]) -> list[_Query]:
    """Group by query id (sorted), each group ordered by venue id."""
    by_query: dict[str, list[RankingInstance]] = {}
    for inst in instances:
        by_query.setdefault(inst.query_id, []).append(inst)
    groups = []
    start = 0
    for qid in sorted(by_query):
        members = sorted(by_query[qid], key=lambda inst: inst.venue_id)
        groups.append(_Query(qid, members, np.arange(start, start + len(members))))
        start += len(members)
    return groups


def mean_ndcg(queries: Sequence[_Query], scores: np.ndarray, k: int = NDCG_CUTOFF) -> float:
    """Mean NDCG@k over queries that have at least one non-zero label."""
    values = []
    for q in queries:
        labels = [inst.relevance_label for inst in q.instances]
        if not any(labels):
            continue
        order = current_order([inst.venue_id for inst in q.instances], scores[q.rows])
        values.append(ndcg_from_grades([labels[i] for i in order], k))
    return float(np.mean(values)) if values else 0.0


def train_lambdamart(
    train: Sequence[RankingInstance],
    n_trees: int = 100,
    learning_rate: float = 0.1,
    max_leaves: int = 8,
    min_instances_per_leaf: int = 5,
    k: int = NDCG_CUTOFF,
    seed: int = 0,
    max_depth: Optional[int] = None,
) -> LambdaMartModel:
    """Boost ``n_trees`` trees on pooled per-query lambdas.

    Stops early only when every lambda is zero.  Training NDCG@k is recorded
    before the first tree and after each one.  The procedure is fully
    deterministic; ``seed`` is echoed into the model for provenance.

    Raises:
        UntrainableDataset: no query has two distinct labels.
    """
    if any(inst.relevance_label is None for inst in train):
        raise ValueError("every training instance needs a relevance label")
    queries = group_queries(train)
    if not any(len({inst.relevance_label for inst in q.instances}) > 1 for q in queries):
        raise UntrainableDataset("no query has two distinct relevance labels")

    X = np.vstack([np.asarray(inst.features.values) for q in queries for inst in q.instances])
    scores = np.zeros(len(X))
    trees: list[RegressionTree] = []
    history = [mean_ndcg(queries, scores, k)]
    lambdas = np.zeros(len(X))
    hessians = np.zeros(len(X))

    for round_no in range(n_trees):
        for q in queries:
            lambdas[q.rows], hessians[q.rows] = lambda_gradients(q.instances, scores[q.rows], k)
        if not lambdas.any():
            logger.info("all lambdas zero after %d trees; stopping", round_no)
            break
        tree = fit_regression_tree(
            X, lambdas, hessians, max_leaves, min_instances_per_leaf, max_depth
        )
        trees.append(tree)
        scores += learning_rate * tree.predict(X)
        history.append(mean_ndcg(queries, scores, k))

    config = {
        "n_trees": n_trees,
        "learning_rate": learning_rate,
        "max_leaves": max_leaves,
        "min_instances_per_leaf": min_instances_per_leaf,
        "max_depth": max_depth,
        "ndcg_cutoff": k,
    }
    return LambdaMartModel(tuple(trees), learning_rate, config, seed, tuple(history))


def rank_candidates(
    model: LambdaMartModel, instances: Sequence[RankingInstance]
) -> list[tuple[str, float]]:
    """(venue_id, score) pairs by descending score, ties by ascending venue id."""
    if not instances:
        return []
    X = np.vstack([np.asarray(inst.features.values) for inst in instances])
    scores = model.predict(X)
    ranked = sorted(zip((inst.venue_id for inst in instances), scores.tolist()),
                    key=lambda pair: (-pair[1], pair[0]))
    return ranked
