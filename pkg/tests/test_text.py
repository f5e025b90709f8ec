import math

import pytest

from venuerank.errors import EmptyCorpus
from venuerank.text import STOPWORDS, Vocabulary, build_vocabulary, tfidf_vector, tokenize


def test_tokenize_examples():
    assert tokenize("Great pizza, GREAT service!") == ["great", "pizza", "great", "service"]
    assert tokenize("a I ok") == ["ok"]
    assert tokenize("") == []
    assert tokenize("   \n\t") == []


def test_tokenize_splits_on_underscore_and_keeps_digits_and_unicode():
    assert tokenize("wood_fired 24h café") == ["wood", "fired", "24h", "café"]


def test_stopword_list_is_frozen_at_fifty():
    assert len(STOPWORDS) == 50
    assert all(tokenize(w) == [] for w in STOPWORDS)


def test_vocabulary_small_corpus():
    v = build_vocabulary([["a1", "b1"], ["b1", "c1"]])
    assert len(v) == 3
    assert v.document_frequency == {"a1": 1, "b1": 2, "c1": 1}
    assert [v.index(t) for t in ("a1", "b1", "c1")] == [0, 1, 2]


def test_min_df_pruning_at_ten_documents():
    docs = [["common"] for _ in range(9)] + [["common", "rare"]]
    v = build_vocabulary(docs)
    assert "rare" not in v and "common" in v
    v9 = build_vocabulary(docs[1:])
    assert "rare" in v9


def test_repeated_term_counts_document_once():
    assert build_vocabulary([["x1", "x1", "x1"], ["y1"]]).document_frequency["x1"] == 1


def test_empty_corpus_raises():
    with pytest.raises(EmptyCorpus):
        build_vocabulary([[], []])
    with pytest.raises(EmptyCorpus):
        build_vocabulary([])


@pytest.mark.parametrize("k", [1, 2, 7])
def test_single_term_vector_is_unit(k):
    v = build_vocabulary([["aa"], ["bb"]])
    vec = tfidf_vector(["aa"] * k, v)
    assert vec.indices == (0,) and vec.weights == (1.0,)


def test_equal_terms_equal_weights():
    v = build_vocabulary([["aa", "bb"], ["cc"]])
    vec = tfidf_vector(["aa", "bb"], v)
    assert vec.weights[0] == vec.weights[1]
    assert math.isclose(vec.weights[0], 1 / math.sqrt(2), abs_tol=1e-15)


def test_hand_computed_weights():
    corpus = [["pizza", "good"], ["pizza", "pasta"], ["wine"]]
    v = build_vocabulary(corpus)
    idf_pizza = math.log(4 / 3) + 1
    idf_pasta = math.log(4 / 2) + 1
    raw = {"pizza": 2 * idf_pizza, "pasta": 1 * idf_pasta}
    norm = math.sqrt(sum(w * w for w in raw.values()))
    sparse = tfidf_vector(["pizza", "pasta", "pizza", "zzz"], v)
    vec = dict(sparse.items())
    assert vec[v.index("pizza")] == pytest.approx(raw["pizza"] / norm, abs=1e-12)
    assert vec[v.index("pasta")] == pytest.approx(raw["pasta"] / norm, abs=1e-12)
    assert list(sparse.indices) == sorted(sparse.indices)


def test_oov_and_norm():
    v = Vocabulary({"aa": 1, "bb": 2}, 3)
    assert len(tfidf_vector(["zz"], v)) == 0
    assert tfidf_vector(["aa", "bb", "bb"], v).norm() == pytest.approx(1.0, abs=1e-12)
