"""Domain vocabulary: venues, reviews, rated histories, context and requests.

All record types are frozen dataclasses.  Constructors do not range-check
their fields; :func:`validate_dataset` is the single place where dataset
invariants are enforced, so that a bad record becomes a report entry rather
than an exception halfway through ingestion.
"""

from __future__ import annotations

import enum
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Mapping, Optional, Sequence


class Source(str, enum.Enum):
    FOURSQUARE = "foursquare"
    YELP = "yelp"
    TRIPADVISOR = "tripadvisor"


CATEGORY_SOURCES = (Source.FOURSQUARE, Source.YELP)
REVIEW_SOURCES = (Source.YELP, Source.TRIPADVISOR)


class Season(str, enum.Enum):
    SPRING = "spring"
    SUMMER = "summer"
    FALL = "fall"
    WINTER = "winter"


class TravelerType(str, enum.Enum):
    BUSINESS = "business"
    LEISURE = "leisure"
    FAMILY = "family"
    COUPLES = "couples"
    FRIENDS = "friends"
    SOLO = "solo"


TRIP_TYPES = (TravelerType.BUSINESS, TravelerType.LEISURE)
GROUP_TYPES = (
    TravelerType.FAMILY,
    TravelerType.COUPLES,
    TravelerType.FRIENDS,
    TravelerType.SOLO,
)


class Polarity(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


MIN_RATING, MAX_RATING = 0, 4
MIN_STARS, MAX_STARS = 1, 5


def normalize_item(item: str) -> str:
    """Canonical form used whenever category or tag strings are compared."""
    return unicodedata.normalize("NFC", item).strip().casefold()


def polarity(rating: int) -> Polarity:
    """Map a 0-4 rating onto POSITIVE (3, 4), NEGATIVE (0, 1) or NEUTRAL (2)."""
    if isinstance(rating, bool) or not isinstance(rating, int):
        raise TypeError(f"rating must be an integer, got {rating!r}")
    if not MIN_RATING <= rating <= MAX_RATING:
        raise ValueError(f"rating {rating} outside [{MIN_RATING}, {MAX_RATING}]")
    if rating >= 3:
        return Polarity.POSITIVE
    if rating <= 1:
        return Polarity.NEGATIVE
    return Polarity.NEUTRAL


@dataclass(frozen=True)
class Review:
    venue_id: str
    source: Source
    stars: int
    text: str
    timestamp: datetime


@dataclass(frozen=True)
class VenueRecord:
    """A candidate or previously visited venue.

    ``season_checkins`` and ``traveler_checkins`` are ``None`` when the
    source data carried no distribution at all; an explicit mapping of zeros
    is a real (if uninformative) observation.
    """

    venue_id: str
    categories_by_source: Mapping[Source, tuple[str, ...]] = field(default_factory=dict)
    taste_tags: tuple[str, ...] = ()
    reviews: tuple[Review, ...] = ()
    season_checkins: Optional[Mapping[Season, int]] = None
    traveler_checkins: Optional[Mapping[TravelerType, int]] = None

    def categories(self, source: Source) -> tuple[str, ...]:
        return tuple(self.categories_by_source.get(source, ()))

    def reviews_from(self, source: Source) -> tuple[Review, ...]:
        return tuple(r for r in self.reviews if r.source is source)


@dataclass(frozen=True)
class RatedVenue:
    venue_id: str
    rating: int

    @property
    def polarity(self) -> Polarity:
        return polarity(self.rating)


@dataclass(frozen=True)
class UserHistory:
    user_id: str
    rated: tuple[RatedVenue, ...]

    def with_polarity(self, wanted: Polarity) -> list[RatedVenue]:
        return [r for r in self.rated if r.polarity is wanted]


@dataclass(frozen=True)
class ContextSignals:
    season: Season
    trip_type: TravelerType
    group_type: TravelerType


@dataclass(frozen=True)
class SuggestionRequest:
    request_id: str
    user_id: str
    context: ContextSignals
    candidates: tuple[str, ...]


class IssueKind(str, enum.Enum):
    EMPTY_VENUE_ID = "EMPTY_VENUE_ID"
    DUPLICATE_VENUE = "DUPLICATE_VENUE"
    DUPLICATE_CATEGORY = "DUPLICATE_CATEGORY"
    NEGATIVE_COUNT = "NEGATIVE_COUNT"
    DANGLING_REVIEW = "DANGLING_REVIEW"
    STARS_OUT_OF_RANGE = "STARS_OUT_OF_RANGE"
    BAD_REVIEW_SOURCE = "BAD_REVIEW_SOURCE"
    DUPLICATE_USER = "DUPLICATE_USER"
    RATING_OUT_OF_RANGE = "RATING_OUT_OF_RANGE"
    DUPLICATE_RATED_VENUE = "DUPLICATE_RATED_VENUE"
    DANGLING_HISTORY_VENUE = "DANGLING_HISTORY_VENUE"
    NO_POSITIVE_RATING = "NO_POSITIVE_RATING"
    DUPLICATE_REQUEST = "DUPLICATE_REQUEST"
    UNKNOWN_USER = "UNKNOWN_USER"
    EMPTY_CANDIDATES = "EMPTY_CANDIDATES"
    DUPLICATE_CANDIDATE = "DUPLICATE_CANDIDATE"
    DANGLING_CANDIDATE = "DANGLING_CANDIDATE"
    BAD_CONTEXT = "BAD_CONTEXT"
    DANGLING_QREL = "DANGLING_QREL"
    GRADE_OUT_OF_RANGE = "GRADE_OUT_OF_RANGE"


@dataclass(frozen=True)
class Issue:
    kind: IssueKind
    id: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.kind.value}: {self.id}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.issues)

    def __len__(self) -> int:
        return len(self.issues)

    def __iter__(self):
        return iter(self.issues)

    def kinds(self) -> set[IssueKind]:
        return {issue.kind for issue in self.issues}

    def format(self) -> str:
        return "\n".join(str(issue) for issue in self.issues)


def _duplicates(values: Iterable[str]) -> list[str]:
    counts = Counter(values)
    return sorted(v for v, n in counts.items() if n > 1)


def _check_venue(venue: VenueRecord, issues: list[Issue]) -> None:
    vid = venue.venue_id
    for source, cats in venue.categories_by_source.items():
        for dup in _duplicates(normalize_item(c) for c in cats):
            issues.append(Issue(IssueKind.DUPLICATE_CATEGORY, vid, f"{source.value}:{dup}"))
    for name, dist in (("season", venue.season_checkins), ("traveler", venue.traveler_checkins)):
        for key, count in (dist or {}).items():
            if count < 0:
                issues.append(Issue(IssueKind.NEGATIVE_COUNT, vid, f"{name}:{key.value}={count}"))
    for review in venue.reviews:
        if review.venue_id != vid:
            issues.append(Issue(IssueKind.DANGLING_REVIEW, review.venue_id, f"attached to {vid}"))
        if not MIN_STARS <= review.stars <= MAX_STARS:
            issues.append(Issue(IssueKind.STARS_OUT_OF_RANGE, vid, str(review.stars)))
        if review.source not in REVIEW_SOURCES:
            issues.append(Issue(IssueKind.BAD_REVIEW_SOURCE, vid, review.source.value))


def validate_dataset(
    venues: Sequence[VenueRecord],
    histories: Sequence[UserHistory],
    requests: Sequence[SuggestionRequest],
    reviews: Sequence[Review] = (),
    qrels: Optional[Mapping[tuple[str, str], int]] = None,
) -> ValidationReport:
    """Collect every invariant violation in a dataset.

    Never raises on bad data: violations are returned as report entries and
    the report is empty iff the dataset is usable.  ``reviews`` are loose
    reviews not yet attached to a venue; ``qrels`` maps
    ``(request_id, venue_id)`` to a grade.
    """
    issues: list[Issue] = []

    venue_ids = [v.venue_id for v in venues]
    for venue in venues:
        if not venue.venue_id:
            issues.append(Issue(IssueKind.EMPTY_VENUE_ID, "", "venue with empty id"))
        _check_venue(venue, issues)
    for dup in _duplicates(venue_ids):
        issues.append(Issue(IssueKind.DUPLICATE_VENUE, dup))
    known_venues = set(venue_ids)

    for review in reviews:
        if review.venue_id not in known_venues:
            issues.append(Issue(IssueKind.DANGLING_REVIEW, review.venue_id))
        if not MIN_STARS <= review.stars <= MAX_STARS:
            issues.append(Issue(IssueKind.STARS_OUT_OF_RANGE, review.venue_id, str(review.stars)))
        if review.source not in REVIEW_SOURCES:
            issues.append(Issue(IssueKind.BAD_REVIEW_SOURCE, review.venue_id, review.source.value))

    for dup in _duplicates(h.user_id for h in histories):
        issues.append(Issue(IssueKind.DUPLICATE_USER, dup))
    for history in histories:
        uid = history.user_id
        for dup in _duplicates(r.venue_id for r in history.rated):
            issues.append(Issue(IssueKind.DUPLICATE_RATED_VENUE, uid, dup))
        has_positive = False
        for rated in history.rated:
            if rated.venue_id not in known_venues:
                issues.append(Issue(IssueKind.DANGLING_HISTORY_VENUE, rated.venue_id, f"user {uid}"))
            if isinstance(rated.rating, bool) or not isinstance(rated.rating, int) or not (
                MIN_RATING <= rated.rating <= MAX_RATING
            ):
                issues.append(
                    Issue(IssueKind.RATING_OUT_OF_RANGE, uid, f"{rated.venue_id}={rated.rating}")
                )
            elif rated.polarity is Polarity.POSITIVE:
                has_positive = True
        if not has_positive:
            issues.append(Issue(IssueKind.NO_POSITIVE_RATING, uid))

    known_users = {h.user_id for h in histories}
    for dup in _duplicates(r.request_id for r in requests):
        issues.append(Issue(IssueKind.DUPLICATE_REQUEST, dup))
    for request in requests:
        rid = request.request_id
        if request.user_id not in known_users:
            issues.append(Issue(IssueKind.UNKNOWN_USER, request.user_id, f"request {rid}"))
        ctx = request.context
        if ctx.trip_type not in TRIP_TYPES or ctx.group_type not in GROUP_TYPES:
            issues.append(Issue(IssueKind.BAD_CONTEXT, rid))
        if not request.candidates:
            issues.append(Issue(IssueKind.EMPTY_CANDIDATES, rid))
        for dup in _duplicates(request.candidates):
            issues.append(Issue(IssueKind.DUPLICATE_CANDIDATE, dup, f"request {rid}"))
        for vid in request.candidates:
            if vid not in known_venues:
                issues.append(Issue(IssueKind.DANGLING_CANDIDATE, vid, f"request {rid}"))

    if qrels is not None:
        known_requests = {r.request_id for r in requests}
        for (rid, vid), grade in qrels.items():
            if rid not in known_requests or vid not in known_venues:
                issues.append(Issue(IssueKind.DANGLING_QREL, f"{rid}/{vid}"))
            if not MIN_RATING <= grade <= MAX_RATING:
                issues.append(Issue(IssueKind.GRADE_OUT_OF_RANGE, f"{rid}/{vid}", str(grade)))

    return ValidationReport(tuple(issues))
