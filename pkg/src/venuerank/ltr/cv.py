"""Query-level k-fold cross-validation of the LambdaMART ranker."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import InsufficientQueries
from ..evaluation import QrelSet, mean_metrics
from .features import RankingInstance
from .lambdamart import rank_candidates, train_lambdamart

logger = logging.getLogger(__name__)


def assign_folds(query_ids: Sequence[str], k: int, seed: int) -> dict[str, int]:
    """Seeded shuffle of the sorted distinct query ids, dealt round-robin."""
    qids = sorted(set(query_ids))
    if len(qids) < k:
        raise InsufficientQueries(f"{len(qids)} queries for {k} folds")
    perm = np.random.default_rng(seed).permutation(len(qids))
    return {qids[p]: pos % k for pos, p in enumerate(perm)}


def labels_as_qrels(instances: Sequence[RankingInstance]) -> QrelSet:
    return QrelSet({(i.query_id, i.venue_id): i.relevance_label for i in instances})


def random_rankings(
    instances: Sequence[RankingInstance], seed: int
) -> dict[str, list[str]]:
    """A seeded uniformly random permutation of every query's candidates."""
    rng = np.random.default_rng(seed)
    by_query: dict[str, list[str]] = {}
    for inst in instances:
        by_query.setdefault(inst.query_id, []).append(inst.venue_id)
    out = {}
    for qid in sorted(by_query):
        venues = sorted(by_query[qid])
        out[qid] = [venues[i] for i in rng.permutation(len(venues))]
    return out


@dataclass
class CVReport:
    folds: list[dict] = field(default_factory=list)
    mean: dict = field(default_factory=dict)
    random_baseline: dict = field(default_factory=dict)

    def records(self) -> list[dict]:
        """Line-delimited report records: one per fold, then the mean."""
        rows = [dict(f, record="fold") for f in self.folds]
        rows.append(dict(self.mean, record="mean"))
        rows.append(dict(self.random_baseline, record="random_baseline"))
        return rows


def cross_validate(
    dataset: Sequence[RankingInstance],
    k: int = 5,
    seed: int = 42,
    cutoff: int = 5,
    **train_config,
) -> CVReport:
    """Train on k-1 folds, rank the held-out queries, report P@5 and MRR.

    Folds partition queries, never instances.  ``train_config`` is passed to
    :func:`train_lambdamart`.  The random-permutation baseline is scored on
    the same held-out queries.
    """
    folds = assign_folds([inst.query_id for inst in dataset], k, seed)
    qrels = labels_as_qrels(dataset)
    baseline_rankings = random_rankings(dataset, seed)
    report = CVReport()
    all_rankings: dict[str, list[str]] = {}

    for fold in range(k):
        train = [inst for inst in dataset if folds[inst.query_id] != fold]
        held_out = [inst for inst in dataset if folds[inst.query_id] == fold]
        model = train_lambdamart(train, seed=seed, **train_config)
        by_query: dict[str, list[RankingInstance]] = {}
        for inst in held_out:
            by_query.setdefault(inst.query_id, []).append(inst)
        rankings = {
            qid: [vid for vid, _ in rank_candidates(model, by_query[qid])]
            for qid in sorted(by_query)
        }
        all_rankings.update(rankings)
        metrics = mean_metrics(rankings, qrels, cutoff)
        report.folds.append({"fold": fold, "n_queries": len(rankings), **metrics})
        logger.info("fold %d: %s", fold, metrics)

    names = [name for name in report.folds[0] if name not in ("fold", "n_queries")]
    report.mean = {
        "n_queries": len(all_rankings),
        **{name: float(np.mean([f[name] for f in report.folds])) for name in names},
    }
    report.random_baseline = {
        "n_queries": len(all_rankings),
        **mean_metrics({q: baseline_rankings[q] for q in sorted(all_rankings)}, qrels, cutoff),
    }
    return report
