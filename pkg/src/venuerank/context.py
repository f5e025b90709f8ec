"""Season and traveler-type appropriateness scores from check-in counts.

Both scores compare the count for the user's own context value with the
mean count over every other value of the same axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Mapping, Sequence, TypeVar

from .core import GROUP_TYPES, TRIP_TYPES, ContextSignals, Season, TravelerType, VenueRecord

K = TypeVar("K")

SEASONS = tuple(Season)

# Northern-hemisphere meteorological seasons.
_MONTH_TO_SEASON = {
    12: Season.WINTER, 1: Season.WINTER, 2: Season.WINTER,
    3: Season.SPRING, 4: Season.SPRING, 5: Season.SPRING,
    6: Season.SUMMER, 7: Season.SUMMER, 8: Season.SUMMER,
    9: Season.FALL, 10: Season.FALL, 11: Season.FALL,
}
_FLIP = {
    Season.WINTER: Season.SUMMER, Season.SUMMER: Season.WINTER,
    Season.SPRING: Season.FALL, Season.FALL: Season.SPRING,
}


def infer_season(timestamp: datetime, southern_hemisphere: bool = False) -> Season:
    season = _MONTH_TO_SEASON[timestamp.month]
    return _FLIP[season] if southern_hemisphere else season


@dataclass(frozen=True)
class SeasonDistribution:
    counts: Mapping[Season, float]
    missing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "counts", {s: float(self.counts.get(s, 0)) for s in SEASONS})

    def __getitem__(self, season: Season) -> float:
        return self.counts[season]


@dataclass(frozen=True)
class TravelerDistribution:
    trip: Mapping[TravelerType, float] = field(default_factory=dict)
    group: Mapping[TravelerType, float] = field(default_factory=dict)
    missing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "trip", {t: float(self.trip.get(t, 0)) for t in TRIP_TYPES})
        object.__setattr__(self, "group", {g: float(self.group.get(g, 0)) for g in GROUP_TYPES})


def season_distribution(venue: VenueRecord, southern_hemisphere: bool = False) -> SeasonDistribution:
    """Explicit season check-ins, else counts of review timestamps by season."""
    if venue.season_checkins is not None:
        return SeasonDistribution(dict(venue.season_checkins))
    if venue.reviews:
        counts = {s: 0 for s in SEASONS}
        for review in venue.reviews:
            counts[infer_season(review.timestamp, southern_hemisphere)] += 1
        return SeasonDistribution(counts)
    return SeasonDistribution({}, missing=True)


def traveler_distribution(venue: VenueRecord) -> TravelerDistribution:
    if venue.traveler_checkins is None:
        return TravelerDistribution(missing=True)
    checkins = venue.traveler_checkins
    return TravelerDistribution(
        {t: checkins.get(t, 0) for t in TRIP_TYPES},
        {g: checkins.get(g, 0) for g in GROUP_TYPES},
    )


def contrast_score(current: K, counts: Mapping[K, float], axis: Sequence[K]) -> float:
    """Count at ``current`` minus the mean count over the rest of ``axis``."""
    # Averaging the differences keeps uniform counts at exactly 0.
    here = counts[current]
    diffs = [here - counts[v] for v in axis if v != current]
    return math.fsum(diffs) / len(diffs)


def season_score(user_season: Season, dist: SeasonDistribution) -> float:
    if dist.missing:
        return 0.0
    return contrast_score(user_season, dist.counts, SEASONS)


def travel_score(context: ContextSignals, dist: TravelerDistribution) -> float:
    """Average of the trip-type and group-type contrast scores."""
    if dist.missing:
        return 0.0
    trip = contrast_score(context.trip_type, dist.trip, TRIP_TYPES)
    group = contrast_score(context.group_type, dist.group, GROUP_TYPES)
    return (trip + group) / 2
