"""Genetic search over a trained pool for an ensemble of a target accuracy.

A chromosome is a sequence of ``ensemble_size`` pool indices.  Its fitness
is ``-(accuracy - target)**2``, so the search drives ensemble accuracy toward
the target rather than simply up.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .classifier import TrainedClassifier
from .ensemble import DEFAULT_ENSEMBLE_SIZE, Ensemble, accuracy_from_votes, pool_votes

FitnessFn = Callable[[float, float], float]


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 40
    generations: int = 60
    crossover_rate: float = 0.8
    mutation_rate: float = 0.05
    tournament_size: int = 3
    elitism_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must be in [0, population_size)")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass
class GAResult:
    best_ensemble: Ensemble
    best_fitness: float
    achieved_accuracy: float
    target: float
    fitness_history: list[float] = field(default_factory=list)
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "member_indices": list(self.best_ensemble.member_indices),
            "best_fitness": self.best_fitness,
            "achieved_accuracy": self.achieved_accuracy,
            "target": self.target,
            "fitness_history": list(self.fitness_history),
            "evaluations": self.evaluations,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GAResult":
        return cls(
            best_ensemble=Ensemble(tuple(doc["member_indices"])),
            best_fitness=float(doc["best_fitness"]),
            achieved_accuracy=float(doc["achieved_accuracy"]),
            target=float(doc["target"]),
            fitness_history=[float(v) for v in doc.get("fitness_history", [])],
            evaluations=int(doc.get("evaluations", 0)),
        )


@dataclass(frozen=True)
class FeasibleTarget:
    target: float
    achieved_accuracy: float
    attainable: bool


def fitness(acc: float, target: float) -> float:
    if not (0.0 <= acc <= 1.0 and 0.0 <= target <= 1.0):
        raise ValueError("accuracy and target must lie in [0, 1]")
    return -((acc - target) ** 2)


def _tournament(rng, fit: np.ndarray, k: int) -> int:
    entrants = rng.integers(0, fit.size, size=k)
    # first entrant wins ties
    return int(entrants[np.argmax(fit[entrants])])


def evolve_votes(
    votes: np.ndarray,
    y,
    target: float,
    ga: GAConfig,
    ensemble_size: int = DEFAULT_ENSEMBLE_SIZE,
    fitness_fn: FitnessFn = fitness,
) -> GAResult:
    """GA on a precomputed (pool, samples) vote matrix; see :func:`evolve`."""
    n_pool = votes.shape[0]
    if n_pool == 0:
        raise ValueError("empty pool")
    if ensemble_size < 1 or ensemble_size % 2 == 0:
        raise ValueError(f"ensemble_size must be a positive odd integer, got {ensemble_size}")
    y = np.asarray(y)
    rng = np.random.default_rng(ga.seed)
    cache: dict[tuple[int, ...], tuple[float, float]] = {}

    def score(chrom: np.ndarray) -> tuple[float, float]:
        key = tuple(sorted(chrom.tolist()))
        hit = cache.get(key)
        if hit is None:
            acc = accuracy_from_votes(votes, chrom, y)
            hit = cache[key] = (fitness_fn(acc, target), acc)
        return hit

    pop = rng.integers(0, n_pool, size=(ga.population_size, ensemble_size))
    fit = np.array([score(c)[0] for c in pop])
    best_i = int(np.argmax(fit))
    best_chrom, best_fit = pop[best_i].copy(), float(fit[best_i])
    history = [best_fit]

    n_children = ga.population_size - ga.elitism_count
    for _ in range(ga.generations):
        elite = np.argsort(-fit, kind="stable")[: ga.elitism_count]
        children = []
        while len(children) < n_children:
            a = pop[_tournament(rng, fit, ga.tournament_size)]
            b = pop[_tournament(rng, fit, ga.tournament_size)]
            if rng.random() < ga.crossover_rate:
                mask = rng.random(ensemble_size) < 0.5
                a, b = np.where(mask, a, b), np.where(mask, b, a)
            for child in (a, b):
                child = child.copy()
                hits = rng.random(ensemble_size) < ga.mutation_rate
                if hits.any():
                    child[hits] = rng.integers(0, n_pool, size=int(hits.sum()))
                children.append(child)
        children = children[:n_children]
        pop = np.vstack([pop[elite]] + children) if ga.elitism_count else np.vstack(children)
        fit = np.array([score(c)[0] for c in pop])
        gen_best = int(np.argmax(fit))
        if fit[gen_best] > best_fit:
            best_chrom, best_fit = pop[gen_best].copy(), float(fit[gen_best])
        history.append(float(fit[gen_best]))

    if ga.elitism_count >= 1:
        assert all(b >= a for a, b in zip(history, history[1:])), "elitism violated"
    return GAResult(
        best_ensemble=Ensemble(tuple(best_chrom.tolist())),
        best_fitness=best_fit,
        achieved_accuracy=score(best_chrom)[1],
        target=float(target),
        fitness_history=history,
        evaluations=len(cache),
    )


def evolve(
    pool: Sequence[TrainedClassifier],
    X,
    y,
    target: float,
    ga: GAConfig,
    ensemble_size: int = DEFAULT_ENSEMBLE_SIZE,
    fitness_fn: FitnessFn = fitness,
    votes: Optional[np.ndarray] = None,
) -> GAResult:
    """Search ``pool`` for an ensemble whose accuracy on (X, y) is near ``target``.

    Tournament selection, uniform crossover, per-gene resampling mutation and
    elitism.  Chromosomes are memoized by their sorted index multiset since the
    vote ignores member order.  The best chromosome ever seen is returned.
    Pass ``votes`` (from :func:`pool_votes`) to skip recomputing member outputs.
    """
    if len(pool) == 0:
        raise ValueError("empty pool")
    if votes is None:
        votes = pool_votes(pool, X)
    return evolve_votes(votes, y, target, ga, ensemble_size, fitness_fn)


def feasible_targets(
    pool: Sequence[TrainedClassifier],
    X,
    y,
    probe_targets: Sequence[float],
    ga: GAConfig,
    ensemble_size: int = DEFAULT_ENSEMBLE_SIZE,
    tolerance: float = 0.01,
    votes: Optional[np.ndarray] = None,
) -> list[FeasibleTarget]:
    """Probe which targets the pool can reach, on half the generation budget."""
    if len(probe_targets) == 0:
        raise ValueError("no probe targets")
    if votes is None:
        votes = pool_votes(pool, X)
    short = replace(ga, generations=max(1, ga.generations // 2))
    out = []
    for i, t in enumerate(probe_targets):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"probe target {t} outside [0, 1]")
        res = evolve_votes(votes, y, t, replace(short, seed=short.seed + i), ensemble_size)
        out.append(FeasibleTarget(float(t), res.achieved_accuracy, abs(res.achieved_accuracy - t) <= tolerance))
    return out
