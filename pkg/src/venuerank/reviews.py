"""Per-user review classifiers whose decision value scores candidate venues."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from .core import REVIEW_SOURCES, Polarity, Source, UserHistory, VenueRecord
from .errors import EmptyCorpus, TrainingUnderflow
from .svm import LabeledDocument, SvmModel, train_linear_svm
from .text import SparseVector, Vocabulary, build_vocabulary, tfidf_vector, tokenize

POSITIVE_MIN_STARS = 4
NEGATIVE_MAX_STARS = 2


@dataclass(frozen=True)
class TrainingSet:
    documents: tuple[LabeledDocument, ...]
    vocabulary: Vocabulary
    n_pos: int
    n_neg: int
    negative_free: bool


@dataclass(frozen=True)
class ReviewModel:
    """A trained classifier together with the vocabulary it was fit on."""

    user_id: str
    source: Source
    vocabulary: Vocabulary
    svm: SvmModel


def assemble_training_set(
    user: UserHistory, catalog: Mapping[str, VenueRecord], source: Source
) -> TrainingSet:
    """Label the user's reviews from one source.

    High-star reviews of positively rated venues are positives, low-star
    reviews of negatively rated venues are negatives; each review is one
    document.  A user without negatives gets a single all-zero negative
    document and the set is flagged ``negative_free``.

    Raises:
        TrainingUnderflow: no positive document.
        EmptyCorpus: every labeled review tokenized to nothing.
    """
    if source not in REVIEW_SOURCES:
        raise ValueError(f"{source} carries no reviews")
    labeled: list[tuple[list[str], int]] = []
    for rated in user.with_polarity(Polarity.POSITIVE):
        for review in catalog[rated.venue_id].reviews_from(source):
            if review.stars >= POSITIVE_MIN_STARS:
                labeled.append((tokenize(review.text), 1))
    n_pos = len(labeled)
    if n_pos == 0:
        raise TrainingUnderflow(f"user {user.user_id} has no positive {source.value} reviews")
    for rated in user.with_polarity(Polarity.NEGATIVE):
        for review in catalog[rated.venue_id].reviews_from(source):
            if review.stars <= NEGATIVE_MAX_STARS:
                labeled.append((tokenize(review.text), -1))
    n_neg = len(labeled) - n_pos

    vocab = build_vocabulary([tokens for tokens, _ in labeled])
    docs = [LabeledDocument(tfidf_vector(tokens, vocab), label) for tokens, label in labeled]
    if n_neg == 0:
        docs.append(LabeledDocument(SparseVector(), -1))
    return TrainingSet(tuple(docs), vocab, n_pos, n_neg, n_neg == 0)


def model_seed(seed: int, user_id: str, source: Source) -> int:
    """Stable per-(user, source) seed; independent of PYTHONHASHSEED."""
    return (seed * 1_000_003 + zlib.crc32(f"{user_id}\x1f{source.value}".encode())) % 2**32


def train_review_model(
    user: UserHistory,
    catalog: Mapping[str, VenueRecord],
    source: Source,
    lambda_reg: float = 1e-4,
    epochs: int = 50,
    seed: int = 0,
) -> ReviewModel:
    training = assemble_training_set(user, catalog, source)
    svm = train_linear_svm(
        training.documents,
        lambda_reg=lambda_reg,
        epochs=epochs,
        seed=model_seed(seed, user.user_id, source),
        n_features=len(training.vocabulary),
    )
    meta = dict(svm.training_meta, n_pos=training.n_pos, n_neg=training.n_neg,
                negative_free=training.negative_free)
    svm = replace(svm, training_meta=meta)
    return ReviewModel(user.user_id, source, training.vocabulary, svm)


def train_user_models(
    user: UserHistory,
    catalog: Mapping[str, VenueRecord],
    lambda_reg: float = 1e-4,
    epochs: int = 50,
    seed: int = 0,
) -> dict[Source, Optional[ReviewModel]]:
    """One model per review source; ``None`` where there is nothing to train on."""
    models: dict[Source, Optional[ReviewModel]] = {}
    for source in REVIEW_SOURCES:
        try:
            models[source] = train_review_model(user, catalog, source, lambda_reg, epochs, seed)
        except (TrainingUnderflow, EmptyCorpus):
            models[source] = None
    return models


def venue_document(venue: VenueRecord, source: Source) -> Optional[list[str]]:
    """Tokens of all the venue's reviews from ``source`` joined into one document."""
    reviews = venue.reviews_from(source)
    if not reviews:
        return None
    return tokenize("\n".join(r.text for r in reviews))


def decision_score(
    model: SvmModel, vocab: Vocabulary, venue: VenueRecord, source: Source
) -> tuple[float, bool]:
    """Return ``(score, missing)`` for one candidate venue.

    A venue without reviews from ``source`` scores 0 and is flagged missing.
    """
    tokens = venue_document(venue, source)
    if tokens is None:
        return 0.0, True
    return model.decision(tfidf_vector(tokens, vocab)), False
