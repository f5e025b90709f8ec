from __future__ import annotations

from datetime import datetime, timezone

import pytest

from venuerank.core import (
    ContextSignals,
    RatedVenue,
    Review,
    Season,
    Source,
    SuggestionRequest,
    TravelerType,
    UserHistory,
    VenueRecord,
)
from venuerank.dataset import example_dir, load_bundle_dir
from venuerank.synth import SynthConfig, generate_synthetic

UTC = timezone.utc


def ts(year: int, month: int, day: int = 1) -> datetime:
    return datetime(year, month, day, 12, 0, tzinfo=UTC)


def venue(vid, fsq=(), yelp=None, tags=(), reviews=(), season=None, traveler=None):
    cats = {Source.FOURSQUARE: tuple(fsq)}
    if yelp is not None:
        cats[Source.YELP] = tuple(yelp)
    return VenueRecord(vid, cats, tuple(tags), tuple(reviews), season, traveler)


def history(user_id, **ratings):
    return UserHistory(user_id, tuple(RatedVenue(v, r) for v, r in ratings.items()))


def review(vid, source, stars, text, when=None):
    return Review(vid, source, stars, text, when or ts(2015, 7, 4))


CONTEXT = ContextSignals(Season.SUMMER, TravelerType.LEISURE, TravelerType.FAMILY)


def request(rid, user_id, candidates, context=CONTEXT):
    return SuggestionRequest(rid, user_id, context, tuple(candidates))


@pytest.fixture(scope="session")
def example_bundle():
    return load_bundle_dir(example_dir())


SMALL_SYNTH = SynthConfig(
    n_users=12, n_venues=120, n_candidates_per_request=12, history_size=15,
    reviews_per_source=3, seed=3,
)


@pytest.fixture(scope="session")
def small_synth():
    return generate_synthetic(SMALL_SYNTH)


def dense_docs(X, y):
    """LabeledDocuments from a dense matrix (zeros are left out)."""
    from venuerank.svm import LabeledDocument
    from venuerank.text import SparseVector

    docs = []
    for row, label in zip(X, y):
        idx = tuple(i for i, x in enumerate(row) if x != 0)
        docs.append(LabeledDocument(SparseVector(idx, tuple(float(row[i]) for i in idx)), int(label)))
    return docs


def blobs(n_pos, n_neg, seed, gap=1.5, spread=0.5):
    """Two separable 2-D clusters centred at (+gap, +gap) and (-gap, -gap)."""
    import numpy as np

    rng = np.random.default_rng(seed)
    pos = rng.uniform(-spread, spread, size=(n_pos, 2)) + gap
    neg = rng.uniform(-spread, spread, size=(n_neg, 2)) - gap
    return np.vstack([pos, neg]), np.array([1] * n_pos + [-1] * n_neg)


def instance(qid, vid, x0, label=None, rest=(0.0,) * 6):
    from venuerank.ltr.features import FeatureVector, RankingInstance

    return RankingInstance(qid, vid, FeatureVector((float(x0),) + tuple(rest)), label)


def single_feature_dataset(n_queries=20, per_query=10, seed=0):
    """Labels are a non-decreasing step function of feature 0; the rest is noise."""
    import numpy as np

    rng = np.random.default_rng(seed)
    out = []
    for q in range(n_queries):
        x0 = rng.permutation(per_query) / per_query + rng.uniform(0, 0.05)
        for i, x in enumerate(x0):
            label = int(min(4, np.floor(x * 5)))
            out.append(instance(f"q{q:02d}", f"v{i:02d}", x, label, tuple(rng.normal(size=6))))
    return out


ACCEPTANCE_RESULTS: list[str] = []


def record_acceptance(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_RESULTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
