"""JSONL ingestion and writing of venue datasets.

Files in a dataset directory::

    venues.jsonl    one venue per line, without reviews
    reviews.jsonl   one review per line, attached to venues on load
    profiles.jsonl  one user history per line
    requests.jsonl  one suggestion request per line
    qrels.jsonl     one graded (request, venue) judgment per line (optional)
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterator, Mapping, Sequence

from .core import (
    GROUP_TYPES,
    MAX_STARS,
    MIN_STARS,
    TRIP_TYPES,
    CATEGORY_SOURCES,
    ContextSignals,
    RatedVenue,
    Review,
    Season,
    Source,
    SuggestionRequest,
    TravelerType,
    UserHistory,
    VenueRecord,
    validate_dataset,
)
from .errors import DataError
from .evaluation import QrelSet

FILE_NAMES = {
    "venues": "venues.jsonl",
    "reviews": "reviews.jsonl",
    "profiles": "profiles.jsonl",
    "requests": "requests.jsonl",
    "qrels": "qrels.jsonl",
}


class ValidationFailed(DataError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"dataset failed validation:\n{report.format()}")


@dataclass(frozen=True)
class DatasetBundle:
    venues: tuple[VenueRecord, ...]
    histories: tuple[UserHistory, ...]
    requests: tuple[SuggestionRequest, ...]
    qrels: QrelSet = field(default_factory=QrelSet)

    @property
    def catalog(self) -> dict[str, VenueRecord]:
        return {v.venue_id: v for v in self.venues}

    @property
    def users(self) -> dict[str, UserHistory]:
        return {h.user_id: h for h in self.histories}

    @property
    def reviews(self) -> list[Review]:
        return [r for v in self.venues for r in v.reviews]

    def validate(self):
        return validate_dataset(self.venues, self.histories, self.requests, qrels=self.qrels.grades)


def dataset_paths(directory: os.PathLike | str) -> dict[str, Path]:
    return {key: Path(directory) / name for key, name in FILE_NAMES.items()}


# --- parsing -------------------------------------------------------------


def _require(obj: Mapping, key: str, kind: type | tuple[type, ...]) -> Any:
    if key not in obj:
        raise ValueError(f"missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) and kind is not bool or not isinstance(value, kind):
        raise ValueError(f"field {key!r} has wrong type {type(value).__name__}")
    return value


def _str_list(value: Any, what: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValueError(f"{what} must be a list of strings")
    return tuple(value)


def _count_map(value: Any, enum_cls, what: str) -> dict:
    if not isinstance(value, dict):
        raise ValueError(f"{what} must be an object")
    out = {}
    for key, count in value.items():
        if isinstance(count, bool) or not isinstance(count, int):
            raise ValueError(f"{what}.{key} must be an integer")
        out[enum_cls(key)] = count
    return out


def parse_timestamp(text: str) -> datetime:
    """RFC 3339 timestamp to an aware UTC datetime."""
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_venue(obj: Mapping) -> VenueRecord:
    venue_id = _require(obj, "venue_id", str)
    cats = {}
    for key, items in obj.get("categories_by_source", {}).items():
        source = Source(key)
        if source not in CATEGORY_SOURCES:
            raise ValueError(f"no categories allowed for source {key!r}")
        cats[source] = _str_list(items, f"categories_by_source.{key}")
    season = obj.get("season_checkins")
    traveler = obj.get("traveler_checkins")
    traveler_counts = None
    if traveler is not None:
        if not isinstance(traveler, dict) or set(traveler) - {"trip", "group"}:
            raise ValueError("traveler_checkins must hold 'trip' and 'group'")
        traveler_counts = {}
        for axis, allowed in (("trip", TRIP_TYPES), ("group", GROUP_TYPES)):
            counts = _count_map(traveler.get(axis, {}), TravelerType, f"traveler_checkins.{axis}")
            if set(counts) - set(allowed):
                raise ValueError(f"traveler_checkins.{axis} has keys outside its axis")
            traveler_counts.update(counts)
    return VenueRecord(
        venue_id=venue_id,
        categories_by_source=cats,
        taste_tags=_str_list(obj.get("taste_tags", []), "taste_tags"),
        season_checkins=None if season is None else _count_map(season, Season, "season_checkins"),
        traveler_checkins=traveler_counts,
    )


def parse_review(obj: Mapping) -> Review:
    source = Source(_require(obj, "source", str))
    if source not in (Source.YELP, Source.TRIPADVISOR):
        raise ValueError(f"reviews cannot come from {source.value}")
    stars = _require(obj, "stars", int)
    if not MIN_STARS <= stars <= MAX_STARS:
        raise ValueError(f"stars={stars} outside [{MIN_STARS}, {MAX_STARS}]")
    return Review(
        venue_id=_require(obj, "venue_id", str),
        source=source,
        stars=stars,
        text=_require(obj, "text", str),
        timestamp=parse_timestamp(_require(obj, "timestamp", str)),
    )


def parse_profile(obj: Mapping) -> UserHistory:
    ratings = _require(obj, "ratings", list)
    rated = []
    for entry in ratings:
        if not isinstance(entry, dict):
            raise ValueError("ratings entries must be objects")
        rated.append(RatedVenue(_require(entry, "venue_id", str), _require(entry, "rating", int)))
    return UserHistory(_require(obj, "user_id", str), tuple(rated))


def parse_request(obj: Mapping) -> SuggestionRequest:
    ctx = _require(obj, "context", dict)
    trip = TravelerType(_require(ctx, "trip_type", str))
    group = TravelerType(_require(ctx, "group_type", str))
    if trip not in TRIP_TYPES or group not in GROUP_TYPES:
        raise ValueError(f"context axes mixed up: trip={trip.value}, group={group.value}")
    return SuggestionRequest(
        request_id=_require(obj, "request_id", str),
        user_id=_require(obj, "user_id", str),
        context=ContextSignals(Season(_require(ctx, "season", str)), trip, group),
        candidates=_str_list(_require(obj, "candidates", list), "candidates"),
    )


def parse_qrel(obj: Mapping) -> tuple[tuple[str, str], int]:
    key = (_require(obj, "request_id", str), _require(obj, "venue_id", str))
    return key, _require(obj, "grade", int)


def read_jsonl(path: os.PathLike | str, parse: Callable[[Mapping], Any]) -> Iterator[Any]:
    """Parse each non-blank line; errors name the file and line number."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("line is not a JSON object")
                yield parse(obj)
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc


def load_bundle(paths: Mapping[str, os.PathLike | str], validate: bool = True) -> DatasetBundle:
    """Load and cross-check a dataset.

    ``paths`` maps ``venues``, ``reviews``, ``profiles``, ``requests`` and
    optionally ``qrels`` to files.  A missing qrels file is treated as no
    judgments.

    Raises:
        OSError: a required file cannot be read.
        DataError: a malformed line.
        ValidationFailed: the dataset violates an invariant.
    """
    venues = list(read_jsonl(paths["venues"], parse_venue))
    reviews = list(read_jsonl(paths["reviews"], parse_review))
    histories = tuple(read_jsonl(paths["profiles"], parse_profile))
    requests = tuple(read_jsonl(paths["requests"], parse_request))
    qrels: dict[tuple[str, str], int] = {}
    qrel_path = paths.get("qrels")
    if qrel_path is not None and Path(qrel_path).exists():
        for key, grade in read_jsonl(qrel_path, parse_qrel):
            if key in qrels:
                raise DataError(f"{qrel_path}: duplicate judgment for {key}")
            qrels[key] = grade

    by_venue: dict[str, list[Review]] = {}
    for review in reviews:
        by_venue.setdefault(review.venue_id, []).append(review)
    known = {v.venue_id for v in venues}
    loose = [r for r in reviews if r.venue_id not in known]
    venues = [replace(v, reviews=tuple(by_venue.get(v.venue_id, ()))) for v in venues]

    if validate:
        report = validate_dataset(venues, histories, requests, reviews=loose, qrels=qrels)
        if report:
            raise ValidationFailed(report)
    return DatasetBundle(tuple(venues), histories, requests, QrelSet(qrels))


def load_bundle_dir(directory: os.PathLike | str, validate: bool = True) -> DatasetBundle:
    return load_bundle(dataset_paths(directory), validate=validate)


# --- writing -------------------------------------------------------------


def venue_record(venue: VenueRecord) -> dict:
    rec: dict[str, Any] = {
        "venue_id": venue.venue_id,
        "categories_by_source": {s.value: list(c) for s, c in venue.categories_by_source.items()},
        "taste_tags": list(venue.taste_tags),
    }
    if venue.season_checkins is not None:
        rec["season_checkins"] = {s.value: int(venue.season_checkins.get(s, 0)) for s in Season}
    if venue.traveler_checkins is not None:
        tc = venue.traveler_checkins
        rec["traveler_checkins"] = {
            "trip": {t.value: int(tc.get(t, 0)) for t in TRIP_TYPES},
            "group": {g.value: int(tc.get(g, 0)) for g in GROUP_TYPES},
        }
    return rec


def review_record(review: Review) -> dict:
    return {
        "venue_id": review.venue_id,
        "source": review.source.value,
        "stars": review.stars,
        "text": review.text,
        "timestamp": format_timestamp(review.timestamp),
    }


def profile_record(history: UserHistory) -> dict:
    return {
        "user_id": history.user_id,
        "ratings": [{"venue_id": r.venue_id, "rating": r.rating} for r in history.rated],
    }


def request_record(request: SuggestionRequest) -> dict:
    ctx = request.context
    return {
        "request_id": request.request_id,
        "user_id": request.user_id,
        "context": {
            "season": ctx.season.value,
            "trip_type": ctx.trip_type.value,
            "group_type": ctx.group_type.value,
        },
        "candidates": list(request.candidates),
    }


def write_jsonl(path: os.PathLike | str, records: Sequence[Mapping]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False))
            fh.write("\n")


def write_bundle(bundle: DatasetBundle, directory: os.PathLike | str) -> dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = dataset_paths(directory)
    write_jsonl(paths["venues"], [venue_record(v) for v in bundle.venues])
    write_jsonl(paths["reviews"], [review_record(r) for r in bundle.reviews])
    write_jsonl(paths["profiles"], [profile_record(h) for h in bundle.histories])
    write_jsonl(paths["requests"], [request_record(r) for r in bundle.requests])
    write_jsonl(
        paths["qrels"],
        [{"request_id": q, "venue_id": v, "grade": g} for (q, v), g in bundle.qrels.grades.items()],
    )
    return paths


def example_dir() -> Path:
    """Directory of the small example dataset shipped with the package."""
    return Path(__file__).parent / "data" / "example"
