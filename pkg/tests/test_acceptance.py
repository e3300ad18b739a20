"""Exit criteria.  Each test records its criterion number; the terminal summary
prints one PASS/FAIL line per criterion."""

import csv
import math
import time
from pathlib import Path

import numpy as np
import pytest

from strucdiv.classifier import ACTIVATIONS, ClassifierConfig, config_grid, gradient_check, init_classifier, predict
from strucdiv.diversity import (
    berger_parker_index,
    diversity_report,
    renyi_entropy,
    shannon_index,
    simpson_index,
    species_distribution,
)
from strucdiv.ensemble import Ensemble, accuracy, pool_votes
from strucdiv.evolve import GAConfig, evolve_votes
from strucdiv.cli import main
from strucdiv.harness import CSV_HEADER

from helpers import random_pool
from oracles import brute_indices, exhaustive_best_fitness

ROOT = Path(__file__).resolve().parents[1]
GRID = config_grid()


def tag(record_property, num, title, detail=""):
    record_property("criterion", num)
    record_property("title", title)
    record_property("detail", detail)


def test_c1_entropy_limits(record_property):
    tag(record_property, 1, "Renyi limit + monotonicity, 1000 random distributions")
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        s = int(rng.integers(2, 22))
        counts = rng.integers(1, 40, size=s)
        d = species_distribution([f"s{i}" for i, c in enumerate(counts) for _ in range(c)])
        p = counts / counts.sum()
        shannon = float(-np.sum(p * np.log(p)))
        for a in (1 - 1e-6, 1 + 1e-6):
            worst = max(worst, abs(renyi_entropy(d, a) - shannon))
        profile = [renyi_entropy(d, a) for a in (0, 0.5, 1, 2, 4, 10)]
        assert all(b <= a + 1e-12 for a, b in zip(profile, profile[1:])), profile
    elapsed = time.perf_counter() - start
    tag(record_property, 1, "Renyi limit + monotonicity, 1000 random distributions",
        f"(max gap {worst:.2e}, {elapsed:.2f}s)")
    assert worst < 1e-4
    assert elapsed < 5.0


def test_c2_closed_form_indices(record_property):
    tag(record_property, 2, "closed-form index values within 1e-9")
    a, b = GRID[0], GRID[1]
    mixed = [a] * 14 + [b] * 7
    # oracle first, then freeze, then the implementation
    _, o_sh, o_si, o_bp, o_s = brute_indices([str(m) for m in mixed])
    assert (round(o_sh, 4), round(o_si, 4), round(o_bp, 5), o_s) == (0.2091, 0.4444, 0.07143, 2)

    cases = [
        (GRID[:21], (1.0, 1 - 1 / 21, 1.0)),
        ([a] * 21, (0.0, 0.0, 1 / 21)),
        (mixed, (o_sh, o_si, o_bp)),
    ]
    for members, expected in cases:
        d = species_distribution(members)
        got = (shannon_index(d), simpson_index(d), berger_parker_index(d))
        for g, e in zip(got, expected):
            assert abs(g - e) < 1e-9, (got, expected)


def test_c3_gradients(record_property):
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    worst = 0.0
    for act in ACTIVATIONS:
        for _ in range(10):
            cfg = ClassifierConfig(act, int(rng.integers(7, 22)), 0.01)
            clf = init_classifier(cfg, 7, int(rng.integers(2**31)))
            for _ in range(10):
                worst = max(worst, gradient_check(clf, rng.uniform(size=7), int(rng.integers(0, 2))))
    elapsed = time.perf_counter() - start
    tag(record_property, 3, "backprop vs central differences, 3x10x10",
        f"(max rel err {worst:.2e}, {elapsed:.2f}s)")
    assert worst < 1e-4
    assert elapsed < 10.0


def test_c4_ga_matches_exhaustive(record_property):
    pool = random_pool(6, input_dim=5, seed=41)
    X = np.random.default_rng(42).uniform(size=(120, 5))
    y = np.random.default_rng(43).integers(0, 2, size=120)
    votes = pool_votes(pool, X)
    targets = np.random.default_rng(44).uniform(0, 1, size=100)
    start = time.perf_counter()
    hits = 0
    for seed, t in enumerate(targets):
        best = exhaustive_best_fitness(votes, y, t, 3)
        res = evolve_votes(votes, y, t, GAConfig(seed=seed), 3)
        hits += res.best_fitness == best
    elapsed = time.perf_counter() - start
    tag(record_property, 4, "GA optimum == exhaustive 6^3 optimum", f"({hits}/100, {elapsed:.1f}s)")
    assert hits >= 95
    assert elapsed < 60.0


def test_c5_monotone_history(record_property):
    # every GA run in the suite is also checked by the autouse fixture in conftest
    votes = pool_votes(random_pool(15, seed=5), np.random.default_rng(6).uniform(size=(90, 7)))
    y = np.random.default_rng(7).integers(0, 2, size=90)
    runs = 0
    for seed in range(30):
        ga = GAConfig(population_size=12, generations=25, elitism_count=1 + seed % 3,
                      mutation_rate=0.02 + 0.01 * (seed % 5), seed=seed)
        h = evolve_votes(votes, y, (seed % 10) / 10, ga, 1 + 2 * (seed % 6)).fitness_history
        assert all(b >= a for a, b in zip(h, h[1:]))
        runs += 1
    tag(record_property, 5, "fitness_history non-decreasing", f"({runs} dedicated runs + suite-wide guard)")


@pytest.fixture(scope="module")
def desk_runs(tmp_path_factory):
    cfg = ROOT / "configs" / "desk.json"
    outs, times = [], []
    for name in ("run1", "run2"):
        out = tmp_path_factory.mktemp(name)
        start = time.perf_counter()
        code = main(["experiment", "--config", str(cfg), "--out", str(out)])
        times.append(time.perf_counter() - start)
        assert code == 0
        outs.append(out)
    return outs, times


def test_c6_desk_experiment(record_property, desk_runs):
    outs, times = desk_runs
    tag(record_property, 6, "desk experiment: 40 pool, 2000 rows, 5 targets",
        f"({max(times):.1f}s per run)")
    for name in ("experiment.csv", "ensembles.json", "manifest.json", "pool.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    with (outs[0] / "experiment.csv").open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 6
    for r in rows[1:]:
        assert all(0.0 <= float(v) <= 1.0 for v in r[1:6])
        assert 1 <= int(r[6]) <= 21
    assert max(times) < 600


def test_c7_trend(record_property, desk_runs):
    outs, _ = desk_runs
    with (outs[0] / "experiment.csv").open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    shannon = np.array([float(r["shannon"]) for r in rows])
    acc = np.array([float(r["achieved_acc"]) for r in rows])
    lower = shannon <= np.median(shannon)
    r = float(np.corrcoef(shannon[lower], acc[lower])[0, 1]) if shannon[lower].std() > 0 else math.nan
    tag(record_property, 7, "Pearson(shannon, test acc) > 0 on lower half of diversity",
        f"(r = {r:.3f} over {int(lower.sum())} ensembles)")
    assert r > 0


def test_c8_degenerate_ensemble(record_property, small_data, small_pool):
    tag(record_property, 8, "21 copies of one classifier")
    X, y = small_data.split("test")
    for i, clf in enumerate(small_pool):
        rep = diversity_report([clf.config] * 21)
        assert rep.shannon_norm == 0.0
        assert rep.simpson_norm == 0.0
        assert abs(rep.berger_parker_norm - 1 / 21) < 1e-15
        single = float(np.mean(predict(clf, X) == y))
        assert accuracy(small_pool, Ensemble((i,) * 21), X, y) == single
