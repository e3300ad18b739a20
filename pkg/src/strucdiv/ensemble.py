"""Majority-vote aggregation over a pool of trained classifiers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classifier import TrainedClassifier, predict

DEFAULT_ENSEMBLE_SIZE = 21


@dataclass(frozen=True)
class Ensemble:
    """Indices into a classifier pool.  Repeats are allowed; size must be odd."""

    member_indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "member_indices", tuple(int(i) for i in self.member_indices))
        if len(self.member_indices) % 2 == 0:
            raise ValueError(f"ensemble size must be odd, got {len(self.member_indices)}")

    @property
    def size(self) -> int:
        return len(self.member_indices)

    def check(self, pool_size: int) -> None:
        for i in self.member_indices:
            if not 0 <= i < pool_size:
                raise IndexError(f"member index {i} outside pool of {pool_size}")


def pool_votes(pool: Sequence[TrainedClassifier], X) -> np.ndarray:
    """(pool, samples) matrix of 0/1 member votes, thresholded at y >= 0.5."""
    X = np.asarray(X, dtype=float)
    return np.stack([predict(clf, X) for clf in pool]).astype(np.int8)


def majority(votes: np.ndarray, member_indices) -> np.ndarray:
    """Ensemble labels from a precomputed vote matrix."""
    idx = np.asarray(member_indices, dtype=np.intp)
    ones = votes[idx].sum(axis=0, dtype=np.int64)
    return (2 * ones > len(idx)).astype(np.int8)


def accuracy_from_votes(votes: np.ndarray, member_indices, y) -> float:
    y = np.asarray(y)
    if y.size == 0:
        raise ValueError("empty data")
    return float(np.mean(majority(votes, member_indices) == y))


def vote(pool: Sequence[TrainedClassifier], ens: Ensemble, x) -> int:
    ens.check(len(pool))
    x = np.asarray(x, dtype=float)
    return int(_vote_rows(pool, ens, x[None, :])[0])


def _vote_rows(pool, ens: Ensemble, X) -> np.ndarray:
    # evaluate each distinct member once, weight by multiplicity
    uniq, mult = np.unique(np.asarray(ens.member_indices), return_counts=True)
    ones = np.zeros(X.shape[0], dtype=np.int64)
    for i, m in zip(uniq, mult):
        ones += m * predict(pool[i], X)
    return (2 * ones > ens.size).astype(np.int8)


def accuracy(pool: Sequence[TrainedClassifier], ens: Ensemble, X, y) -> float:
    """Fraction of samples whose majority vote equals the label."""
    ens.check(len(pool))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if y.size == 0:
        raise ValueError("empty data")
    if X.shape[0] != y.shape[0]:
        raise ValueError("features and labels differ in length")
    return float(np.mean(_vote_rows(pool, ens, X) == y))
