"""Tokenization, vocabulary building and TF-IDF vectors for review text."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import EmptyCorpus

# Frozen list; changing it changes every trained model.
STOPWORDS = frozenset(
    """
    about after all an and are as at be been but by can did do
    for from had has have he her his if in into is it its me my no not of
    on or our she so than that the their them then there they this to was
    """.split()
)
assert len(STOPWORDS) == 50

MIN_TOKEN_LENGTH = 2
MIN_DF = 2
MIN_DF_CORPUS_SIZE = 10

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short tokens and stopwords.

    >>> tokenize("Great pizza, GREAT service!")
    ['great', 'pizza', 'great', 'service']
    """
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= MIN_TOKEN_LENGTH and tok not in STOPWORDS
    ]


@dataclass(frozen=True)
class Vocabulary:
    """Term index and document frequencies; indices follow sorted term order."""

    document_frequency: Mapping[str, int]
    document_count: int

    def __post_init__(self):
        terms = sorted(self.document_frequency)
        object.__setattr__(self, "document_frequency", {t: self.document_frequency[t] for t in terms})
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(terms)})

    def __len__(self) -> int:
        return len(self.document_frequency)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    @property
    def terms(self) -> list[str]:
        return list(self.document_frequency)

    def index(self, term: str) -> int:
        return self._index[term]

    def idf(self, term: str) -> float:
        return math.log((1 + self.document_count) / (1 + self.document_frequency[term])) + 1.0


def build_vocabulary(corpus: Sequence[Sequence[str]]) -> Vocabulary:
    """Document frequencies over a tokenized corpus.

    Terms seen in fewer than two documents are pruned once the corpus has at
    least ten documents.
    """
    if not corpus or not any(corpus):
        raise EmptyCorpus("corpus has no tokens")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(doc))
    if len(corpus) >= MIN_DF_CORPUS_SIZE:
        df = Counter({t: n for t, n in df.items() if n >= MIN_DF})
    return Vocabulary(dict(df), len(corpus))


@dataclass(frozen=True)
class SparseVector:
    indices: tuple[int, ...] = ()
    weights: tuple[float, ...] = ()

    def __len__(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.weights))

    def items(self):
        return zip(self.indices, self.weights)


def tfidf_vector(tokens: Sequence[str], vocab: Vocabulary) -> SparseVector:
    """L2-normalized raw-count tf times smoothed idf; unknown terms are ignored."""
    counts = Counter(t for t in tokens if t in vocab)
    if not counts:
        return SparseVector()
    pairs = sorted((vocab.index(t), n * vocab.idf(t)) for t, n in counts.items())
    norm = math.sqrt(math.fsum(w * w for _, w in pairs))
    return SparseVector(tuple(i for i, _ in pairs), tuple(w / norm for _, w in pairs))
