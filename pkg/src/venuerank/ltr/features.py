"""Seven-score feature vectors for (user, request, venue) triples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..context import season_distribution, season_score, traveler_distribution, travel_score
from ..core import Source, SuggestionRequest, UserHistory, VenueRecord
from ..frequency import FrequencyProfile, ItemKind, build_profiles, score_triple
from ..reviews import ReviewModel, decision_score, train_user_models

FEATURE_NAMES = (
    "s_cat_f",
    "s_cat_y",
    "s_tag",
    "s_rev_y",
    "s_rev_t",
    "s_cxt_season",
    "s_cxt_travel",
)
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    missing: tuple[bool, ...] = (False,) * N_FEATURES

    def __post_init__(self):
        if len(self.values) != N_FEATURES or len(self.missing) != N_FEATURES:
            raise ValueError(f"feature vectors have exactly {N_FEATURES} entries")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError(f"non-finite feature value in {self.values}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.values))


@dataclass(frozen=True)
class RankingInstance:
    query_id: str
    venue_id: str
    features: FeatureVector
    relevance_label: Optional[int] = None


@dataclass(frozen=True)
class UserModels:
    """Everything about one user needed at scoring time."""

    history: UserHistory
    profiles: Mapping[ItemKind, Optional[FrequencyProfile]]
    review_models: Mapping[Source, Optional[ReviewModel]]


def build_user_models(
    history: UserHistory,
    catalog: Mapping[str, VenueRecord],
    lambda_reg: float = 1e-4,
    epochs: int = 50,
    seed: int = 0,
) -> UserModels:
    return UserModels(
        history,
        build_profiles(history, catalog),
        train_user_models(history, catalog, lambda_reg, epochs, seed),
    )


def assemble_features(
    user: UserHistory,
    request: SuggestionRequest,
    venue: VenueRecord,
    models: UserModels,
    catalog: Mapping[str, VenueRecord],
) -> FeatureVector:
    """Pack the frequency, review and context scores in fixed order.

    Any score that fell back to 0 because its input was absent has its mask
    bit set.
    """
    freq = score_triple(user, catalog, venue, models.profiles)
    values = [freq.s_cat_f, freq.s_cat_y, freq.s_tag]
    missing = list(freq.missing)

    for source in (Source.YELP, Source.TRIPADVISOR):
        model = models.review_models.get(source)
        if model is None:
            values.append(0.0)
            missing.append(True)
        else:
            score, absent = decision_score(model.svm, model.vocabulary, venue, source)
            values.append(score)
            missing.append(absent)

    season_dist = season_distribution(venue)
    values.append(season_score(request.context.season, season_dist))
    missing.append(season_dist.missing)

    travel_dist = traveler_distribution(venue)
    values.append(travel_score(request.context, travel_dist))
    missing.append(travel_dist.missing)

    return FeatureVector(tuple(values), tuple(missing))


def build_instances(
    requests: Sequence[SuggestionRequest],
    catalog: Mapping[str, VenueRecord],
    user_models: Mapping[str, UserModels],
    labels: Optional[Mapping[tuple[str, str], int]] = None,
) -> list[RankingInstance]:
    """Ranking instances for every candidate of every request.

    The query id is the request id.  With ``labels`` given, unjudged
    candidates get label 0.
    """
    out = []
    for request in requests:
        models = user_models[request.user_id]
        for venue_id in request.candidates:
            fv = assemble_features(models.history, request, catalog[venue_id], models, catalog)
            label = None if labels is None else labels.get((request.request_id, venue_id), 0)
            out.append(RankingInstance(request.request_id, venue_id, fv, label))
    return out
