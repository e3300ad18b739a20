from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strucdiv.ensemble import Ensemble, accuracy, pool_votes
from strucdiv.evolve import GAConfig, GAResult, evolve, evolve_votes, feasible_targets, fitness

from helpers import random_pool
from oracles import exhaustive_best_fitness

POOL6 = random_pool(6, input_dim=5, seed=7)
X = np.random.default_rng(8).uniform(size=(80, 5))
Y = np.random.default_rng(9).integers(0, 2, size=80)
VOTES6 = pool_votes(POOL6, X)


def test_fitness_examples():
    assert fitness(0.7, 0.7) == 0.0
    assert fitness(0.5, 0.7) == pytest.approx(-0.04)
    assert fitness(0.71, 0.75) == pytest.approx(-0.0016)


@pytest.mark.parametrize("acc,target", [(-0.1, 0.5), (0.5, 1.2), (1.01, 0.0)])
def test_fitness_range(acc, target):
    with pytest.raises(ValueError):
        fitness(acc, target)


@given(st.floats(0, 1), st.floats(0, 1))
def test_fitness_properties(a, t):
    assert fitness(a, t) <= 0
    assert fitness(a, t) == fitness(t, a)
    if a == t:
        assert fitness(a, t) == 0
    elif abs(a - t) > 1e-150:
        assert fitness(a, t) < 0


@pytest.mark.parametrize(
    "kwargs", [dict(population_size=1), dict(elitism_count=40), dict(mutation_rate=1.5), dict(tournament_size=0)]
)
def test_gaconfig_validation(kwargs):
    with pytest.raises(ValueError):
        GAConfig(**kwargs)


def test_evolve_errors():
    with pytest.raises(ValueError):
        evolve(POOL6, X, Y, 0.5, GAConfig(), ensemble_size=4)
    with pytest.raises(ValueError):
        evolve([], X, Y, 0.5, GAConfig())


def test_small_pool_matches_exhaustive():
    for target in (0.0, 0.43, 0.6, 1.0):
        res = evolve(POOL6, X, Y, target, GAConfig(seed=1), ensemble_size=3)
        assert res.best_fitness == exhaustive_best_fitness(VOTES6, Y, target, 3)


def test_reachable_target_hits_zero():
    acc = accuracy(POOL6, Ensemble((0, 2, 5)), X, Y)
    res = evolve(POOL6, X, Y, acc, GAConfig(seed=3), ensemble_size=3)
    assert res.best_fitness == 0.0
    assert res.achieved_accuracy == acc


def test_result_consistency():
    res = evolve(POOL6, X, Y, 0.55, GAConfig(seed=5, generations=10), ensemble_size=7)
    assert res.best_fitness == fitness(res.achieved_accuracy, 0.55)
    assert res.best_fitness == max(res.fitness_history)
    assert len(res.fitness_history) == 11
    assert accuracy(POOL6, res.best_ensemble, X, Y) == res.achieved_accuracy
    assert all(0 <= i < 6 for i in res.best_ensemble.member_indices)


def test_frozen_evolution():
    ga = GAConfig(population_size=10, generations=15, crossover_rate=0.0, mutation_rate=0.0, elitism_count=9, seed=2)
    res = evolve(POOL6, X, Y, 0.8, ga, ensemble_size=5)
    assert len(set(res.fitness_history)) == 1


def test_deterministic():
    ga = GAConfig(seed=11, generations=20)
    a = evolve(POOL6, X, Y, 0.6, ga, ensemble_size=5)
    b = evolve(POOL6, X, Y, 0.6, ga, ensemble_size=5)
    assert a.to_dict() == b.to_dict()


@given(st.integers(0, 10**6), st.floats(0, 1), st.sampled_from([1, 3, 5, 9]))
def test_history_monotone_and_in_bounds(seed, target, size):
    ga = GAConfig(population_size=8, generations=8, elitism_count=1, seed=seed)
    res = evolve_votes(VOTES6, Y, target, ga, size)
    h = res.fitness_history
    assert all(b >= a for a, b in zip(h, h[1:]))
    assert all(0 <= i < 6 for i in res.best_ensemble.member_indices)
    assert res.best_ensemble.size == size


def test_custom_fitness_hook():
    # maximize accuracy outright
    res = evolve(POOL6, X, Y, 0.0, GAConfig(seed=0), ensemble_size=3, fitness_fn=lambda a, t: a)
    assert res.best_fitness == res.achieved_accuracy
    assert res.achieved_accuracy == max(
        accuracy(POOL6, Ensemble((i, j, k)), X, Y) for i in range(6) for j in range(6) for k in range(6)
    )


def test_result_json_round_trip():
    res = evolve(POOL6, X, Y, 0.6, GAConfig(seed=1, generations=5), ensemble_size=5)
    assert GAResult.from_dict(res.to_dict()) == res


def test_feasible_targets_shape():
    probes = [0.5, 0.6, 0.7, 0.8, 0.9]
    out = feasible_targets(POOL6, X, Y, probes, GAConfig(seed=2, generations=10), ensemble_size=5)
    assert [f.target for f in out] == probes
    for f in out:
        assert 0 <= f.achieved_accuracy <= 1
        assert f.attainable == (abs(f.achieved_accuracy - f.target) <= 0.01)


def test_feasible_targets_identical_pool():
    pool = [POOL6[0]] * 4
    out = feasible_targets(pool, X, Y, [0.1, 0.5, 0.9], GAConfig(generations=4), ensemble_size=3)
    assert len({f.achieved_accuracy for f in out}) == 1


def test_feasible_targets_validation():
    with pytest.raises(ValueError):
        feasible_targets(POOL6, X, Y, [], GAConfig())
    with pytest.raises(ValueError):
        feasible_targets(POOL6, X, Y, [1.5], GAConfig())


def test_feasible_targets_short_budget():
    ga = GAConfig(generations=10, seed=4)
    out = feasible_targets(POOL6, X, Y, [0.5], ga, ensemble_size=3)
    res = evolve_votes(VOTES6, Y, 0.5, replace(ga, generations=5), 3)
    assert out[0].achieved_accuracy == res.achieved_accuracy
