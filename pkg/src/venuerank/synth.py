"""Seeded synthetic venue datasets with a known preference function.

Categories are grouped into themes of related categories.  A venue draws its
categories from one theme, occasionally adding one from another theme.
Every user likes a few themes, dislikes a few others and has a fixed context
(season, trip type, group type).  Every venue has a peak season, peak trip
type and peak group type that shape its check-in counts and review dates.
Review text is drawn from per-category term clusters plus shared filler
words, and taste tags from per-category tag clusters, so all seven ranking
features carry signal about the hidden truth.

The noise-free grade of (user, venue, context) is::

    quantize(2 + 3 * overlap + 1.5 * (match - 1/3))

where ``overlap`` is the mean user affinity (+1 liked, -1 disliked, 0
otherwise) over the venue's categories and ``match`` is the fraction of the
three context axes on which the venue peaks at the user's value.  History
ratings use ``quantize(2 + 3 * overlap)`` only.  With probability
``noise_level`` a grade or rating is replaced by a uniform draw from 0..4.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from datetime import datetime, timezone

import numpy as np

from .core import (
    GROUP_TYPES,
    TRIP_TYPES,
    ContextSignals,
    RatedVenue,
    Review,
    Season,
    Source,
    SuggestionRequest,
    UserHistory,
    VenueRecord,
    polarity,
    Polarity,
)
from .dataset import DatasetBundle
from .evaluation import QrelSet
from .text import STOPWORDS

SEASONS = tuple(Season)
SEASON_MONTHS = {
    Season.SPRING: (3, 4, 5),
    Season.SUMMER: (6, 7, 8),
    Season.FALL: (9, 10, 11),
    Season.WINTER: (12, 1, 2),
}
# Consecutive triples form themes.
BASE_CATEGORIES = (
    "Italian Restaurant", "Pizza Place", "Gelato Shop",
    "Sushi Bar", "Ramen Shop", "Thai Restaurant",
    "Coffee Shop", "Bakery", "Tea Room",
    "Wine Bar", "Cocktail Bar", "Brewery",
    "Art Museum", "History Museum", "Science Museum",
    "Theater", "Concert Hall", "Jazz Club",
    "Nightclub", "Karaoke Bar", "Lounge",
    "Park", "Botanical Garden", "Hiking Trail",
    "Beach", "Zoo", "Aquarium",
    "Shopping Mall", "Bookstore", "Farmers Market",
)
POSITIVE_OVERLAP = 1.0 / 6.0
MAX_ATTEMPTS = 1000
CROSS_THEME_RATE = 0.2


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 100
    n_venues: int = 500
    n_candidates_per_request: int = 30
    category_vocab_size: int = 30
    tag_vocab_size: int = 60
    review_term_vocab_size: int = 300
    noise_level: float = 0.1
    seed: int = 42
    history_size: int = 30
    reviews_per_source: int = 6
    categories_per_theme: int = 3
    liked_themes_per_user: int = 2
    disliked_themes_per_user: int = 2

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("noise_level", "seed"):
                continue
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{f.name} must be an integer >= 1, got {value!r}")
        if not 0.0 <= self.noise_level <= 1.0:
            raise ValueError(f"noise_level must lie in [0, 1], got {self.noise_level}")
        if self.history_size + self.n_candidates_per_request > self.n_venues:
            raise ValueError(
                "infeasible config: history_size + n_candidates_per_request exceeds n_venues"
            )
        if self.liked_themes_per_user + self.disliked_themes_per_user > self.n_themes:
            raise ValueError("infeasible config: more liked+disliked themes than exist")
        if self.review_term_vocab_size < 2 * self.category_vocab_size:
            raise ValueError("review_term_vocab_size must be at least 2 * category_vocab_size")


    @property
    def n_themes(self) -> int:
        return -(-self.category_vocab_size // self.categories_per_theme)


def quantize(x: float) -> int:
    return int(min(4, max(0, np.floor(x + 0.5))))


@dataclass(frozen=True)
class GroundTruth:
    """The hidden preference function behind a synthetic dataset."""

    affinity: dict[str, dict[str, int]]
    venue_categories: dict[str, tuple[str, ...]]
    venue_peaks: dict[str, ContextSignals]
    user_context: dict[str, ContextSignals]
    positive_threshold: float = POSITIVE_OVERLAP

    def overlap(self, user_id: str, venue_id: str) -> float:
        aff = self.affinity[user_id]
        cats = self.venue_categories[venue_id]
        return sum(aff.get(c, 0) for c in cats) / len(cats)

    def context_match(self, venue_id: str, context: ContextSignals) -> float:
        peak = self.venue_peaks[venue_id]
        hits = (
            (peak.season is context.season)
            + (peak.trip_type is context.trip_type)
            + (peak.group_type is context.group_type)
        )
        return hits / 3

    def rating(self, user_id: str, venue_id: str) -> int:
        return quantize(2 + 3 * self.overlap(user_id, venue_id))

    def grade(self, user_id: str, venue_id: str, context: ContextSignals) -> int:
        match = self.context_match(venue_id, context)
        return quantize(2 + 3 * self.overlap(user_id, venue_id) + 1.5 * (match - 1 / 3))


def _pseudo_words(rng: np.random.Generator, n: int, taken: set[str]) -> list[str]:
    consonants = "bdfgklmnprstvz"
    vowels = "aeiou"
    syllables = [c + v for c in consonants for v in vowels]
    words: list[str] = []
    while len(words) < n:
        k = int(rng.integers(2, 4))
        word = "".join(syllables[i] for i in rng.integers(0, len(syllables), size=k))
        if word not in taken and word not in STOPWORDS:
            taken.add(word)
            words.append(word)
    return words


def _category_names(n: int) -> list[str]:
    names = []
    for round_no in itertools.count(1):
        for base in BASE_CATEGORIES:
            if len(names) == n:
                return names
            names.append(base if round_no == 1 else f"{base} {round_no}")
    return names


def _clusters(items: list[str], n_clusters: int, size: int) -> tuple[list[list[str]], list[str]]:
    clusters = [items[i * size:(i + 1) * size] for i in range(n_clusters)]
    return clusters, items[n_clusters * size:]


def _noisy(rng: np.random.Generator, value: int, noise: float) -> int:
    if rng.random() < noise:
        return int(rng.integers(0, 5))
    return value


def generate_synthetic(config: SynthConfig) -> tuple[DatasetBundle, GroundTruth]:
    """Build a reproducible dataset and the truth it was sampled from."""
    rng = np.random.default_rng(config.seed)
    n_cat = config.category_vocab_size

    categories = _category_names(n_cat)
    taken: set[str] = set()
    terms = _pseudo_words(rng, config.review_term_vocab_size, taken)
    tags = _pseudo_words(rng, config.tag_vocab_size, taken)
    term_size = max(1, config.review_term_vocab_size // (2 * n_cat))
    term_clusters, filler = _clusters(terms, n_cat, term_size)
    tag_size = max(1, config.tag_vocab_size // n_cat)
    tag_clusters = [
        [tags[(c * tag_size + j) % len(tags)] for j in range(tag_size)] for c in range(n_cat)
    ]

    themes = [
        list(range(t * config.categories_per_theme,
                   min(n_cat, (t + 1) * config.categories_per_theme)))
        for t in range(config.n_themes)
    ]

    venues: list[VenueRecord] = []
    venue_cat_idx: dict[str, np.ndarray] = {}
    venue_peaks: dict[str, ContextSignals] = {}
    for i in range(config.n_venues):
        vid = f"v{i:04d}"
        theme = int(rng.integers(0, config.n_themes))
        members = themes[theme]
        n_here = int(rng.integers(1, min(3, len(members)) + 1))
        chosen_cats = set(rng.choice(members, size=n_here, replace=False).tolist())
        if rng.random() < CROSS_THEME_RATE and len(members) < n_cat:
            outside = [c for c in range(n_cat) if c not in members]
            chosen_cats.add(outside[int(rng.integers(0, len(outside)))])
        cat_idx = np.array(sorted(chosen_cats))
        n_here = len(cat_idx)
        venue_cat_idx[vid] = cat_idx
        fsq = [categories[c] for c in cat_idx]
        cats = {Source.FOURSQUARE: tuple(fsq)}
        has_yelp = rng.random() < 0.9
        has_tripadvisor = rng.random() < 0.85
        if has_yelp:
            yelp = [c.lower() for c in fsq]
            if len(yelp) > 2 and rng.random() < 0.3:
                yelp.pop(int(rng.integers(0, len(yelp))))
            cats[Source.YELP] = tuple(yelp)

        venue_tags = [tag_clusters[c][int(rng.integers(0, tag_size))] for c in cat_idx]
        if rng.random() < 0.5:
            venue_tags.append(tags[int(rng.integers(0, len(tags)))])
        venue_tags = list(dict.fromkeys(venue_tags))

        peak = ContextSignals(
            SEASONS[int(rng.integers(0, 4))],
            TRIP_TYPES[int(rng.integers(0, 2))],
            GROUP_TYPES[int(rng.integers(0, 4))],
        )
        venue_peaks[vid] = peak
        season_p = np.array([3.0 if s is peak.season else 1.0 for s in SEASONS])
        season_p /= season_p.sum()
        season_counts = rng.multinomial(int(rng.integers(20, 400)), season_p)
        explicit_season = rng.random() < 0.8

        traveler = None
        if has_tripadvisor:
            n_trav = int(rng.integers(10, 200))
            trip_p = np.array([3.0 if t is peak.trip_type else 1.0 for t in TRIP_TYPES])
            group_p = np.array([4.0 if g is peak.group_type else 1.0 for g in GROUP_TYPES])
            trip_counts = rng.multinomial(n_trav, trip_p / trip_p.sum())
            group_counts = rng.multinomial(n_trav, group_p / group_p.sum())
            traveler = {t: int(n) for t, n in zip(TRIP_TYPES, trip_counts)}
            traveler.update({g: int(n) for g, n in zip(GROUP_TYPES, group_counts)})

        reviews = []
        for source, present in ((Source.YELP, has_yelp), (Source.TRIPADVISOR, has_tripadvisor)):
            if not present:
                continue
            for _ in range(config.reviews_per_source):
                length = int(rng.integers(8, 20))
                words = []
                for _ in range(length):
                    if rng.random() < 0.6:
                        cluster = term_clusters[cat_idx[int(rng.integers(0, n_here))]]
                        words.append(cluster[int(rng.integers(0, len(cluster)))])
                    else:
                        words.append(filler[int(rng.integers(0, len(filler)))])
                season = SEASONS[int(rng.choice(4, p=season_p))]
                month = SEASON_MONTHS[season][int(rng.integers(0, 3))]
                ts = datetime(
                    int(rng.integers(2013, 2016)), month, int(rng.integers(1, 29)),
                    int(rng.integers(0, 24)), int(rng.integers(0, 60)), tzinfo=timezone.utc,
                )
                reviews.append(Review(vid, source, int(rng.integers(1, 6)), " ".join(words), ts))

        venues.append(VenueRecord(
            venue_id=vid,
            categories_by_source=cats,
            taste_tags=tuple(venue_tags),
            reviews=tuple(reviews),
            season_checkins=(
                {s: int(n) for s, n in zip(SEASONS, season_counts)} if explicit_season else None
            ),
            traveler_checkins=traveler,
        ))

    venue_ids = [v.venue_id for v in venues]
    affinity: dict[str, dict[str, int]] = {}
    user_context: dict[str, ContextSignals] = {}
    truth = GroundTruth(
        affinity,
        {vid: tuple(categories[c] for c in idx) for vid, idx in venue_cat_idx.items()},
        venue_peaks,
        user_context,
    )

    histories: list[UserHistory] = []
    requests: list[SuggestionRequest] = []
    qrels: dict[tuple[str, str], int] = {}
    for u in range(config.n_users):
        uid = f"u{u:03d}"
        n_liked_themes = config.liked_themes_per_user
        picked = rng.choice(
            config.n_themes, size=n_liked_themes + config.disliked_themes_per_user, replace=False
        )
        aff = {categories[c]: 1 for t in picked[:n_liked_themes] for c in themes[t]}
        aff.update({categories[c]: -1 for t in picked[n_liked_themes:] for c in themes[t]})
        affinity[uid] = aff
        ctx = ContextSignals(
            SEASONS[int(rng.integers(0, 4))],
            TRIP_TYPES[int(rng.integers(0, 2))],
            GROUP_TYPES[int(rng.integers(0, 4))],
        )
        user_context[uid] = ctx

        liked_pool = [v for v in venue_ids if truth.overlap(uid, v) >= POSITIVE_OVERLAP]
        if not liked_pool:
            raise ValueError(f"infeasible config: user {uid} likes no venue")
        n_liked = min(len(liked_pool), max(1, round(0.4 * config.history_size)))
        liked_idx = rng.choice(len(liked_pool), size=n_liked, replace=False)
        chosen = {liked_pool[i] for i in liked_idx}
        rest = [v for v in venue_ids if v not in chosen]
        extra = rng.choice(len(rest), size=config.history_size - n_liked, replace=False)
        history_ids = sorted(chosen | {rest[i] for i in extra})

        for _ in range(MAX_ATTEMPTS):
            ratings = [_noisy(rng, truth.rating(uid, v), config.noise_level) for v in history_ids]
            if any(polarity(r) is Polarity.POSITIVE for r in ratings):
                break
        else:
            raise ValueError(f"could not draw a positive rating for user {uid}")
        histories.append(UserHistory(
            uid, tuple(RatedVenue(v, r) for v, r in zip(history_ids, ratings))
        ))

        pool = [v for v in venue_ids if v not in set(history_ids)]
        cand_idx = rng.choice(len(pool), size=config.n_candidates_per_request, replace=False)
        candidates = tuple(pool[i] for i in cand_idx)
        rid = f"r{u:03d}"
        requests.append(SuggestionRequest(rid, uid, ctx, candidates))
        for vid in candidates:
            qrels[(rid, vid)] = _noisy(rng, truth.grade(uid, vid, ctx), config.noise_level)

    bundle = DatasetBundle(tuple(venues), tuple(histories), tuple(requests), QrelSet(qrels))
    return bundle, truth
