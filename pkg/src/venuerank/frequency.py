"""Category and taste-tag preference profiles with normalized frequencies.

A profile keeps raw integer counts next to the shared denominator, so every
score is formed by one integer subtraction followed by a single division.
That makes scores independent of summation order and exactly equal to the
correctly rounded rational value.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .core import Polarity, Source, UserHistory, VenueRecord, normalize_item
from .errors import EmptyProfile, ProfileUnderflow


@dataclass(frozen=True)
class ItemKind:
    """Which item list of a venue a profile is built from."""

    name: str
    source: Optional[Source] = None

    def __post_init__(self):
        if self.name == "category":
            if self.source not in (Source.FOURSQUARE, Source.YELP):
                raise ValueError(f"no category lists for source {self.source}")
        elif self.name == "tag":
            if self.source is not None:
                raise ValueError("taste tags take no source")
        else:
            raise ValueError(f"unknown item kind {self.name!r}")

    def items(self, venue: VenueRecord) -> list[str]:
        raw = venue.categories(self.source) if self.name == "category" else venue.taste_tags
        return unique_items(raw)

    def __str__(self) -> str:
        return f"category:{self.source.value}" if self.source else "tag"


CATEGORY_FOURSQUARE = ItemKind("category", Source.FOURSQUARE)
CATEGORY_YELP = ItemKind("category", Source.YELP)
TAG = ItemKind("tag")


def unique_items(items: Iterable[str]) -> list[str]:
    """Normalize and deduplicate, keeping first-seen order."""
    seen: dict[str, None] = {}
    for item in items:
        key = normalize_item(item)
        if key:
            seen.setdefault(key, None)
    return list(seen)


@dataclass(frozen=True)
class FrequencyProfile:
    positive_counts: Mapping[str, int]
    negative_counts: Mapping[str, int]
    denominator: int
    kind: ItemKind = field(default=CATEGORY_FOURSQUARE, compare=False)

    @property
    def positive(self) -> dict[str, float]:
        return {k: n / self.denominator for k, n in self.positive_counts.items()}

    @property
    def negative(self) -> dict[str, float]:
        return {k: n / self.denominator for k, n in self.negative_counts.items()}


def build_profile(
    history: UserHistory, catalog: Mapping[str, VenueRecord], kind: ItemKind
) -> FrequencyProfile:
    """Build the positive/negative profile of ``history`` for one item kind.

    Counts come from positively (resp. negatively) rated venues; the
    denominator is the total number of item slots over both.  Neutral
    venues are left out entirely.

    Raises:
        ProfileUnderflow: the history has no positively rated venue.
        EmptyProfile: no positive or negative venue carries any item.
    """
    positives = history.with_polarity(Polarity.POSITIVE)
    if not positives:
        raise ProfileUnderflow(f"user {history.user_id} has no positive venue")
    negatives = history.with_polarity(Polarity.NEGATIVE)

    pos_counts: Counter[str] = Counter()
    neg_counts: Counter[str] = Counter()
    for rated_group, counts in ((positives, pos_counts), (negatives, neg_counts)):
        for rated in rated_group:
            counts.update(kind.items(catalog[rated.venue_id]))

    denominator = sum(pos_counts.values()) + sum(neg_counts.values())
    if denominator == 0:
        raise EmptyProfile(f"user {history.user_id} has no {kind} items")
    return FrequencyProfile(
        dict(sorted(pos_counts.items())), dict(sorted(neg_counts.items())), denominator, kind
    )


def similarity_score(profile: FrequencyProfile, venue_items: Iterable[str]) -> float:
    """Sum of cf+ minus cf- over the distinct items of a candidate venue."""
    net = 0
    for item in unique_items(venue_items):
        net += profile.positive_counts.get(item, 0) - profile.negative_counts.get(item, 0)
    return net / profile.denominator


@dataclass(frozen=True)
class FrequencyScores:
    s_cat_f: float
    s_cat_y: float
    s_tag: float
    missing: tuple[bool, bool, bool]


def build_profiles(
    history: UserHistory, catalog: Mapping[str, VenueRecord]
) -> dict[ItemKind, Optional[FrequencyProfile]]:
    """Profiles for all three kinds; ``None`` marks an empty kind.

    ProfileUnderflow is raised directly since it fails every kind at once.
    """
    profiles: dict[ItemKind, Optional[FrequencyProfile]] = {}
    for kind in (CATEGORY_FOURSQUARE, CATEGORY_YELP, TAG):
        try:
            profiles[kind] = build_profile(history, catalog, kind)
        except EmptyProfile:
            profiles[kind] = None
    return profiles


def score_triple(
    history: UserHistory,
    catalog: Mapping[str, VenueRecord],
    venue: VenueRecord,
    profiles: Optional[Mapping[ItemKind, Optional[FrequencyProfile]]] = None,
) -> FrequencyScores:
    """Foursquare category, Yelp category and taste-tag scores for one venue.

    A slot is flagged missing when the user's profile for that kind could
    not be built or the venue itself has no items of that kind.  Pass
    precomputed ``profiles`` to avoid rebuilding them per candidate.
    """
    if profiles is None:
        profiles = build_profiles(history, catalog)
    values = []
    missing = []
    for kind in (CATEGORY_FOURSQUARE, CATEGORY_YELP, TAG):
        profile = profiles[kind]
        items = kind.items(venue)
        if profile is None or not items:
            values.append(0.0)
            missing.append(True)
        else:
            values.append(similarity_score(profile, items))
            missing.append(False)
    return FrequencyScores(values[0], values[1], values[2], tuple(missing))
