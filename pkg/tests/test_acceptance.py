"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``; the lines are
repeated in the terminal summary under "acceptance criteria".
"""

import json
import math
import random
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
from venuerank.cli import main
from venuerank.core import Source
from venuerank.context import SEASONS, SeasonDistribution, season_score
from venuerank.evaluation import QrelSet, mrr, ndcg_at_k, precision_at_k
from venuerank.frequency import CATEGORY_FOURSQUARE, build_profile, similarity_score
from venuerank.ltr.lambdamart import lambda_gradients, train_lambdamart
from venuerank.persistence import load_ranker, load_review_model, save_ranker, save_review_model
from venuerank.reviews import ReviewModel
from venuerank.svm import train_linear_svm
from venuerank.text import SparseVector, Vocabulary

from conftest import (
    blobs,
    dense_docs,
    history,
    instance,
    record_acceptance,
    single_feature_dataset,
    venue,
)
from oracles import frequency_oracle, lambda_oracle, random_history_case

README = Path(__file__).resolve().parents[1] / "README.md"


def test_criterion_1_reported_results_not_reproducible():
    text = README.read_text(encoding="utf-8")
    section = text.split("## Reproducibility", 1)[-1] if "## Reproducibility" in text else ""
    ok = "0.6171" in section and "0.7695" in section and "not reproduc" in section.lower()
    record_acceptance(1, "reported P@5 0.6171 / MRR 0.7695 declared non-reproducible", ok,
                      "judgments and crawled corpora unavailable; criteria 2-9 substitute")
    assert ok


def test_criterion_2_frequency_oracle():
    rng = random.Random(20151)
    start = time.perf_counter()
    mismatches = 0
    worst_sum = 0.0
    checked = 0
    while checked < 1000:
        venue_items, ratings, candidate = random_history_case(rng)
        expected = frequency_oracle(ratings, venue_items, candidate)
        if expected is None:
            continue
        checked += 1
        catalog = {vid: venue(vid, items) for vid, items in venue_items.items()}
        p = build_profile(history("u", **ratings), catalog, CATEGORY_FOURSQUARE)
        cf_pos, cf_neg, score = expected
        got_pos = {k: Fraction(n, p.denominator) for k, n in p.positive_counts.items()}
        got_neg = {k: Fraction(n, p.denominator) for k, n in p.negative_counts.items()}
        if got_pos != cf_pos or got_neg != cf_neg or similarity_score(p, candidate) != float(score):
            mismatches += 1
        if p.positive != {k: float(v) for k, v in cf_pos.items()}:
            mismatches += 1
        worst_sum = max(worst_sum, abs(sum(p.positive.values()) + sum(p.negative.values()) - 1.0))
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and worst_sum <= 1e-12 and elapsed < 5
    record_acceptance(2, "frequency profiles match brute-force oracle", ok,
                      f"{checked} histories, {mismatches} mismatches, max |sum-1|={worst_sum:.1e}, {elapsed:.2f}s")
    assert ok


def test_criterion_3_season_score_properties():
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    worst_sum = worst_scale = 0.0
    uniform_ok = True
    for _ in range(1000):
        counts = rng.uniform(0, 1000, size=4) * (rng.random() < 0.9) + rng.integers(0, 5, size=4)
        d = SeasonDistribution(dict(zip(SEASONS, counts.tolist())))
        scores = [season_score(s, d) for s in SEASONS]
        worst_sum = max(worst_sum, abs(math.fsum(scores)))
        k = float(rng.uniform(0.1, 50))
        dk = SeasonDistribution({s: c * k for s, c in d.counts.items()})
        for s, base in zip(SEASONS, scores):
            worst_scale = max(worst_scale, abs(season_score(s, dk) - k * base) / max(1.0, abs(k * base)))
        level = float(rng.uniform(0, 100))
        u = SeasonDistribution({s: level for s in SEASONS})
        uniform_ok &= all(season_score(s, u) == 0 for s in SEASONS)
    elapsed = time.perf_counter() - start
    ok = worst_sum <= 1e-9 and worst_scale <= 1e-9 and uniform_ok and elapsed < 1
    record_acceptance(3, "season scores sum to 0, vanish on uniform, scale linearly", ok,
                      f"max |sum|={worst_sum:.1e}, max scale err={worst_scale:.1e}, "
                      f"uniform exact={uniform_ok}, {elapsed:.2f}s")
    assert ok


def test_criterion_4_svm_correctness():
    start = time.perf_counter()
    two = train_linear_svm(dense_docs([[1.0], [-1.0]], [1, -1]), n_features=1)
    offset = abs(two.bias) / abs(two.weights[0])
    two_ok = two.weights[0] > 0 and offset <= 1e-3

    accs, recalls = [], []
    for seed in range(5):
        X, y = blobs(10, 10, seed)
        docs = dense_docs(X, y)
        m = train_linear_svm(docs, seed=seed, n_features=2)
        accs.append(np.mean([m.predict(d.vector) == d.label for d in docs]))
        X, y = blobs(45, 5, 100 + seed)
        docs = dense_docs(X, y)
        m = train_linear_svm(docs, seed=seed, n_features=2)
        minority = [d for d in docs if d.label == -1]
        recalls.append(np.mean([m.predict(d.vector) == -1 for d in minority]))
    elapsed = time.perf_counter() - start
    ok = two_ok and min(accs) == 1.0 and min(recalls) == 1.0 and elapsed < 10
    record_acceptance(4, "SVM: 2-point margin, separable blobs, 90/10 minority recall", ok,
                      f"offset={offset:.1e}, min acc={min(accs)}, min recall={min(recalls)}, {elapsed:.2f}s")
    assert ok


def test_criterion_5_lambda_gradients_oracle():
    rng = random.Random(55)
    worst = 0.0
    for _ in range(500):
        n = rng.randint(1, 5)
        labels = [rng.randint(0, 4) for _ in range(n)]
        scores = [rng.choice([0.0, round(rng.gauss(0, 1), 1), rng.gauss(0, 3)]) for _ in range(n)]
        vids = [f"v{i}" for i in rng.sample(range(10), n)]
        insts = [instance("q", v, 0, l) for v, l in zip(vids, labels)]
        lam, hess = lambda_gradients(insts, scores)
        exp_lam, exp_hess = lambda_oracle(labels, scores, vids)
        worst = max(worst, float(np.max(np.abs(lam - exp_lam))), float(np.max(np.abs(hess - exp_hess))))
    ok = worst <= 1e-9
    record_acceptance(5, "lambda gradients match swap-dNDCG enumeration", ok,
                      f"500 queries of <=5 instances, max abs err={worst:.1e}")
    assert ok


def test_criterion_6_lambdamart_sanity(small_synth):
    from venuerank.config import TrainConfig
    from venuerank.pipeline import fit_user_models, labeled_instances

    start = time.perf_counter()
    model = train_lambdamart(single_feature_dataset(20, 10, seed=0), n_trees=50)
    perfect = model.training_ndcg[-1] == 1.0
    rounds_needed = next(i for i, v in enumerate(model.training_ndcg) if v == 1.0) if perfect else None

    rng = np.random.default_rng(6)
    noisy = [instance(f"q{q}", f"v{i}", rng.normal(), int(rng.integers(0, 5)), tuple(rng.normal(size=6)))
             for q in range(15) for i in range(8)]
    bundle, _ = small_synth
    synth = labeled_instances(bundle, fit_user_models(bundle, TrainConfig(epochs=20), 0))
    fixtures = {"single-feature": model,
                "noisy": train_lambdamart(noisy, n_trees=30),
                "synthetic": train_lambdamart(synth, n_trees=30)}
    gains = {name: m.training_ndcg[-1] - m.training_ndcg[0] for name, m in fixtures.items()}
    elapsed = time.perf_counter() - start
    ok = perfect and all(g >= 0 for g in gains.values()) and elapsed < 30
    record_acceptance(6, "LambdaMART reaches NDCG@5=1 on single-feature data; never regresses", ok,
                      f"perfect after {rounds_needed} trees, gains " +
                      ", ".join(f"{k}={v:+.3f}" for k, v in gains.items()) + f", {elapsed:.1f}s")
    assert ok


def test_criterion_7_end_to_end_synthetic(tmp_path, capsys):
    data = tmp_path / "data"
    assert main(["synth", "--out", str(data), "--seed", "42"]) == 0
    capsys.readouterr()
    start = time.perf_counter()
    code = main(["cv", "--data", str(data), "--seed", "42", "--out", str(tmp_path / "cv")])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    records = [json.loads(l) for l in (tmp_path / "cv" / "cv.jsonl").read_text().splitlines()]
    mean = next(r for r in records if r["record"] == "mean")
    rand = next(r for r in records if r["record"] == "random_baseline")
    margin = mean["P@5"] - rand["P@5"]
    ok = (code == 0 and mean["P@5"] >= 0.8 and mean["MRR"] >= 0.85 and margin >= 0.3
          and elapsed < 120)
    record_acceptance(7, "synthetic cv --seed 42 beats thresholds", ok,
                      f"P@5={mean['P@5']:.3f}, MRR={mean['MRR']:.3f}, random P@5={rand['P@5']:.3f}, "
                      f"margin={margin:.3f}, {elapsed:.1f}s")
    assert ok


def test_criterion_8_metric_unit_cases():
    q = QrelSet({("q", f"v{i}"): 4 for i in range(5)})
    p = QrelSet({("q", "a"): 3, ("q", "c"): 4, ("q", "b"): 2})
    short = QrelSet({("q", "a"): 3, ("q", "b"): 3, ("q", "c"): 3})
    m = QrelSet({("q1", "a"): 4, ("q2", "b"): 3, ("q3", "c"): 3})
    g = QrelSet({("q", "lo"): 0, ("q", "hi"): 4, ("q", "x"): 0, ("q", "y"): 1})
    cases = [
        (precision_at_k([f"v{i}" for i in range(5)], q, "q"), 1.0),
        (precision_at_k(["a", "b", "c", "d", "e"], p, "q"), 0.4),
        (precision_at_k(["a", "b", "c"], short, "q"), 0.6),
        (mrr({"q1": ["a"], "q2": ["b"]}, m), 1.0),
        (mrr({"q3": ["x", "y", "c"]}, m), 1 / 3),
        (mrr({"q1": ["a"], "q2": ["z", "b"]}, m), 0.75),
        (ndcg_at_k(["hi", "y", "lo", "x"], g, "q"), 1.0),
        (ndcg_at_k(["lo", "hi"], QrelSet({("q", "lo"): 0, ("q", "hi"): 4}), "q", k=2), 1 / math.log2(3)),
        (ndcg_at_k(["lo", "x"], QrelSet({("q", "lo"): 0}), "q"), 0.0),
    ]
    errors = [abs(got - want) for got, want in cases]
    ok = max(errors) <= 1e-9 and abs(1 / math.log2(3) - 0.6309) < 1e-4
    record_acceptance(8, "hand-computed P@5 / MRR / NDCG cases", ok,
                      f"{len(cases)} cases, max abs err={max(errors):.1e}")
    assert ok


def _tree_bytes(path: Path) -> dict:
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_criterion_9_determinism_and_persistence(tmp_path, capsys):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("n_users=10\nn_venues=80\nn_candidates_per_request=10\nhistory_size=12\n"
                   "reviews_per_source=2\nn_trees=10\nepochs=15\n")
    outputs = {}
    for rep in ("a", "b"):
        base = tmp_path / rep
        data = str(base / "data")
        commands = [
            ["synth", "--out", data],
            ["train", "--data", data, "--out", str(base / "models")],
            ["rank", "--data", data, "--models", str(base / "models"), "--out", str(base / "run")],
            ["eval", "--run", str(base / "run" / "run.tsv"), "--qrels", f"{data}/qrels.jsonl",
             "--out", str(base / "eval")],
            ["cv", "--data", data, "--out", str(base / "cv")],
        ]
        stdout = []
        for argv in commands:
            assert main(argv + ["--seed", "9", "--config", str(cfg)]) == 0
            stdout.append(capsys.readouterr().out)
        outputs[rep] = (_tree_bytes(base), stdout)
    cli_same = outputs["a"] == outputs["b"]

    rng = np.random.default_rng(9)
    docs = dense_docs(rng.normal(size=(30, 12)), rng.choice([-1, 1], size=30))
    svm = train_linear_svm(docs, n_features=12)
    vocab = Vocabulary({f"t{i:02d}": 1 + i % 3 for i in range(12)}, 5)
    save_review_model(tmp_path / "svm.json", ReviewModel("u", Source.YELP, vocab, svm))
    svm2 = load_review_model(tmp_path / "svm.json").svm
    ranker = train_lambdamart(single_feature_dataset(10, 10, seed=9), n_trees=20)
    save_ranker(tmp_path / "ranker.json", ranker)
    ranker2 = load_ranker(tmp_path / "ranker.json")
    exact = 0
    for _ in range(100):
        idx = np.sort(rng.choice(12, size=int(rng.integers(1, 13)), replace=False))
        vec = SparseVector(tuple(int(i) for i in idx), tuple(rng.normal(size=len(idx)).tolist()))
        x = rng.normal(size=(1, 7))
        exact += svm2.decision(vec) == svm.decision(vec) and ranker2.predict(x)[0] == ranker.predict(x)[0]
    ok = cli_same and exact == 100
    record_acceptance(9, "CLI outputs byte-identical on repeat; models round-trip bit-exactly", ok,
                      f"5 commands x2 identical={cli_same}, {exact}/100 inputs bit-exact")
    assert ok
