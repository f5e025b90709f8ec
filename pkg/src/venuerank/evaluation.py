"""Ranking metrics: precision at k, mean reciprocal rank and NDCG at k."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

RELEVANT_MIN_GRADE = 3


@dataclass(frozen=True)
class QrelSet:
    """Graded judgments keyed by ``(query_id, venue_id)``; unjudged means 0."""

    grades: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        by_query: dict[str, dict[str, int]] = {}
        for (q, v), g in self.grades.items():
            by_query.setdefault(q, {})[v] = g
        object.__setattr__(self, "_by_query", by_query)

    def grade(self, query_id: str, venue_id: str) -> int:
        return self.grades.get((query_id, venue_id), 0)

    def is_relevant(self, query_id: str, venue_id: str) -> bool:
        return self.grade(query_id, venue_id) >= RELEVANT_MIN_GRADE

    def queries(self) -> list[str]:
        return sorted(self._by_query)

    def for_query(self, query_id: str) -> dict[str, int]:
        return dict(self._by_query.get(query_id, {}))


def precision_at_k(ranking: Sequence[str], qrels: QrelSet, query_id: str, k: int = 5) -> float:
    """Relevant items in the top ``k`` over ``k``; short rankings are not rescaled."""
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = sum(qrels.is_relevant(query_id, v) for v in ranking[:k])
    return hits / k


def reciprocal_rank(ranking: Sequence[str], qrels: QrelSet, query_id: str) -> float:
    for rank, venue_id in enumerate(ranking, start=1):
        if qrels.is_relevant(query_id, venue_id):
            return 1.0 / rank
    return 0.0


def mrr(rankings: Mapping[str, Sequence[str]], qrels: QrelSet) -> float:
    """Mean over queries of 1/rank of the first relevant item."""
    if not rankings:
        raise ValueError("mrr needs at least one query")
    return math.fsum(reciprocal_rank(r, qrels, q) for q, r in rankings.items()) / len(rankings)


def dcg(grades: Iterable[int], k: int) -> float:
    total = 0.0
    for pos, grade in enumerate(grades, start=1):
        if pos > k:
            break
        total += (2.0**grade - 1.0) / math.log2(pos + 1)
    return total


def ndcg_from_grades(grades_in_rank_order: Sequence[int], k: int) -> float:
    """NDCG@k of a ranking given the grade at each position; 0 if all grades are 0."""
    ideal = dcg(sorted(grades_in_rank_order, reverse=True), k)
    if ideal == 0.0:
        return 0.0
    return dcg(grades_in_rank_order, k) / ideal


def ndcg_at_k(ranking: Sequence[str], qrels: QrelSet, query_id: str, k: int = 5) -> float:
    """NDCG@k with gain 2^grade - 1 and discount 1/log2(pos + 1).

    The ideal ordering is taken over every judged item of the query, so a
    ranking that omits relevant items is penalized.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    judged = qrels.for_query(query_id)
    pool = dict(judged)
    for v in ranking:
        pool.setdefault(v, 0)
    ideal = dcg(sorted(pool.values(), reverse=True), k)
    if ideal == 0.0:
        return 0.0
    return dcg((qrels.grade(query_id, v) for v in ranking), k) / ideal


def mean_metrics(
    rankings: Mapping[str, Sequence[str]], qrels: QrelSet, k: int = 5
) -> dict[str, float]:
    """Macro-averaged P@k and MRR over the given queries."""
    p = [precision_at_k(r, qrels, q, k) for q, r in rankings.items()]
    return {f"P@{k}": math.fsum(p) / len(p), "MRR": mrr(rankings, qrels)}
