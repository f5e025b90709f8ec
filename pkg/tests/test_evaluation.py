import math
import random

import pytest

from venuerank.evaluation import (
    QrelSet,
    mean_metrics,
    mrr,
    ndcg_at_k,
    ndcg_from_grades,
    precision_at_k,
    reciprocal_rank,
)


def qrels_for(query, grades):
    return QrelSet({(query, v): g for v, g in grades.items()})


def test_precision_examples():
    q = qrels_for("q", {f"v{i}": 4 for i in range(5)})
    assert precision_at_k([f"v{i}" for i in range(5)], q, "q") == 1.0
    q2 = qrels_for("q", {"a": 3, "c": 4, "b": 2})
    assert precision_at_k(["a", "b", "c", "d", "e", "f"], q2, "q") == pytest.approx(0.4, abs=1e-9)
    q3 = qrels_for("q", {"a": 3, "b": 3, "c": 3})
    assert precision_at_k(["a", "b", "c"], q3, "q", k=5) == pytest.approx(0.6, abs=1e-9)
    with pytest.raises(ValueError):
        precision_at_k(["a"], q3, "q", k=0)


def test_mrr_examples():
    q = QrelSet({("q1", "a"): 4, ("q2", "b"): 3, ("q3", "c"): 3})
    assert mrr({"q1": ["a", "x"], "q2": ["b"]}, q) == 1.0
    assert mrr({"q3": ["x", "y", "c"]}, q) == pytest.approx(1 / 3, abs=1e-9)
    assert mrr({"q1": ["a"], "q2": ["x", "b"]}, q) == pytest.approx(0.75, abs=1e-9)
    assert reciprocal_rank(["x", "y"], q, "q1") == 0.0
    with pytest.raises(ValueError):
        mrr({}, q)


def test_ndcg_examples():
    q = qrels_for("q", {"a": 4, "b": 2, "c": 1})
    assert ndcg_at_k(["a", "b", "c"], q, "q") == 1.0
    worst_first = qrels_for("q", {"lo": 0, "hi": 4})
    expected = (15 / math.log2(3)) / 15
    assert ndcg_at_k(["lo", "hi"], worst_first, "q", k=2) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.6309, abs=1e-4)
    assert ndcg_at_k(["x", "y"], qrels_for("q", {"x": 0}), "q") == 0.0
    assert ndcg_from_grades([0, 0, 0], 5) == 0.0


def test_ndcg_penalizes_omitted_relevant_items():
    q = qrels_for("q", {"a": 4, "b": 4})
    assert ndcg_at_k(["a"], q, "q") < 1.0


def test_unjudged_is_non_relevant():
    q = qrels_for("q", {"a": 3})
    assert q.grade("q", "zzz") == 0
    assert precision_at_k(["zzz", "a"], q, "q", k=1) == 0.0


def random_query(rng, n=8):
    grades = {f"v{i}": rng.randint(0, 4) for i in range(n)}
    ranking = list(grades)
    rng.shuffle(ranking)
    return grades, ranking


def test_metric_properties():
    rng = random.Random(7)
    for _ in range(300):
        grades, ranking = random_query(rng)
        q = qrels_for("q", grades)
        metrics = lambda r: (precision_at_k(r, q, "q"), reciprocal_rank(r, q, "q"), ndcg_at_k(r, q, "q"))
        before = metrics(ranking)
        assert all(0.0 <= m <= 1.0 for m in before)

        rel = [i for i, v in enumerate(ranking) if grades[v] >= 3 and i > 0]
        if rel:
            i = rng.choice(rel)
            j = rng.randrange(i)
            if grades[ranking[j]] <= grades[ranking[i]]:
                moved = list(ranking)
                moved[i], moved[j] = moved[j], moved[i]
                assert all(a >= b - 1e-12 for a, b in zip(metrics(moved), before))

        first_rel = next((i for i, v in enumerate(ranking) if grades[v] >= 3), len(ranking))
        depth = max(5, first_rel + 1)
        tail = ranking[depth:]
        rng.shuffle(tail)
        reordered = ranking[:depth] + tail
        assert precision_at_k(reordered, q, "q") == before[0]
        assert reciprocal_rank(reordered, q, "q") == before[1]


def test_macro_average_matches_per_query():
    rng = random.Random(3)
    grades, rankings = {}, {}
    for n in range(6):
        g, r = random_query(rng)
        grades.update({(f"q{n}", v): x for v, x in g.items()})
        rankings[f"q{n}"] = r
    q = QrelSet(grades)
    m = mean_metrics(rankings, q)
    per = [mean_metrics({k: v}, q) for k, v in rankings.items()]
    assert m["P@5"] == pytest.approx(sum(p["P@5"] for p in per) / 6, abs=1e-12)
    assert m["MRR"] == pytest.approx(sum(p["MRR"] for p in per) / 6, abs=1e-12)
