"""End-to-end training, ranking and evaluation over a dataset bundle."""

from __future__ import annotations

import csv
import logging
import os
from typing import Mapping, Sequence

from .config import TrainConfig
from .core import Source
from .dataset import DatasetBundle
from .errors import DataError
from .evaluation import QrelSet, mean_metrics
from .frequency import build_profiles
from .ltr.cv import CVReport, cross_validate
from .ltr.features import RankingInstance, UserModels, build_instances, build_user_models
from .ltr.lambdamart import LambdaMartModel, rank_candidates, train_lambdamart
from .reviews import ReviewModel

logger = logging.getLogger(__name__)


def fit_user_models(bundle: DatasetBundle, config: TrainConfig, seed: int) -> dict[str, UserModels]:
    catalog = bundle.catalog
    return {
        h.user_id: build_user_models(h, catalog, config.lambda_reg, config.epochs, seed)
        for h in bundle.histories
    }


def user_models_from_saved(
    bundle: DatasetBundle, review_models: Mapping[str, Mapping[Source, ReviewModel]]
) -> dict[str, UserModels]:
    """Rebuild scoring state from persisted classifiers plus recomputed profiles."""
    catalog = bundle.catalog
    out = {}
    for h in bundle.histories:
        saved = review_models.get(h.user_id, {})
        out[h.user_id] = UserModels(
            h,
            build_profiles(h, catalog),
            {s: saved.get(s) for s in (Source.YELP, Source.TRIPADVISOR)},
        )
    return out


def labeled_instances(
    bundle: DatasetBundle, user_models: Mapping[str, UserModels]
) -> list[RankingInstance]:
    return build_instances(bundle.requests, bundle.catalog, user_models, bundle.qrels.grades)


def train(
    bundle: DatasetBundle, config: TrainConfig, seed: int
) -> tuple[dict[str, UserModels], LambdaMartModel]:
    if not bundle.qrels.grades:
        raise DataError("training needs relevance judgments (qrels.jsonl)")
    user_models = fit_user_models(bundle, config, seed)
    instances = labeled_instances(bundle, user_models)
    ranker = train_lambdamart(instances, seed=seed, **config.ranker_kwargs())
    logger.info("trained %d trees on %d instances", len(ranker.trees), len(instances))
    return user_models, ranker


def rank(
    bundle: DatasetBundle, user_models: Mapping[str, UserModels], ranker: LambdaMartModel
) -> dict[str, list[tuple[str, float]]]:
    """Ranked (venue_id, score) lists per request id, in request-id order."""
    instances = build_instances(bundle.requests, bundle.catalog, user_models)
    by_request: dict[str, list[RankingInstance]] = {}
    for inst in instances:
        by_request.setdefault(inst.query_id, []).append(inst)
    return {rid: rank_candidates(ranker, by_request[rid]) for rid in sorted(by_request)}


def write_run(
    path: os.PathLike | str, ranked: Mapping[str, Sequence[tuple[str, float]]], run_tag: str
) -> None:
    """TREC-style run file: request_id, rank, venue_id, score, run_tag."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for rid in sorted(ranked):
            for pos, (vid, score) in enumerate(ranked[rid], start=1):
                writer.writerow([rid, pos, vid, repr(float(score)), run_tag])


def read_run(path: os.PathLike | str) -> dict[str, list[str]]:
    """Per-request venue lists ordered by the rank column."""
    rows: dict[str, list[tuple[int, str]]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row:
                continue
            if len(row) != 5:
                raise DataError(f"{path}:{lineno}: expected 5 tab-separated fields")
            try:
                pos = int(row[1])
                float(row[3])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            rows.setdefault(row[0], []).append((pos, row[2]))
    return {rid: [vid for _, vid in sorted(entries)] for rid, entries in sorted(rows.items())}


def evaluate_run(
    rankings: Mapping[str, Sequence[str]], qrels: QrelSet, cutoff: int = 5
) -> list[dict]:
    """Per-query metric records followed by the macro mean."""
    records = []
    for rid in sorted(rankings):
        m = mean_metrics({rid: rankings[rid]}, qrels, cutoff)
        records.append({"record": "query", "request_id": rid, **m})
    records.append({"record": "mean", "n_queries": len(rankings),
                    **mean_metrics(rankings, qrels, cutoff)})
    return records


def cross_validate_bundle(bundle: DatasetBundle, config: TrainConfig, seed: int) -> CVReport:
    """The full protocol: features from histories, then query-level k-fold CV.

    Per-user profiles and classifiers depend only on histories and the venue
    catalog, never on judgments, so they are fit once and shared by all folds.
    """
    if not bundle.qrels.grades:
        raise DataError("cross-validation needs relevance judgments (qrels.jsonl)")
    user_models = fit_user_models(bundle, config, seed)
    instances = labeled_instances(bundle, user_models)
    return cross_validate(
        instances, k=config.folds, seed=seed, cutoff=config.cutoff, **config.ranker_kwargs()
    )
