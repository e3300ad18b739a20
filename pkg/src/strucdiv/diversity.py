"""Entropy-based structural diversity indices for classifier ensembles.

Each distinct classifier configuration is a species.  An ensemble of M
members is reduced to species counts, and the indices below are computed
from the proportions ``P_i = count_i / M``.  Natural logarithms throughout.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .classifier import ClassifierConfig, species_key

# |alpha - 1| below this dispatches to the Shannon formula
SHANNON_ALPHA_TOL = 1e-9

DEFAULT_ALPHAS = (0.0, 0.5, 1.0, 2.0, 4.0, 10.0)

Member = Union[ClassifierConfig, str]


@dataclass(frozen=True)
class SpeciesDistribution:
    counts: dict[str, int]
    total: int

    def __post_init__(self):
        if not self.counts:
            raise ValueError("empty ensemble")
        if any(c < 1 for c in self.counts.values()):
            raise ValueError("species counts must be >= 1")
        if sum(self.counts.values()) != self.total:
            raise ValueError("species counts do not sum to total")

    @property
    def richness(self) -> int:
        return len(self.counts)

    def proportions(self) -> np.ndarray:
        # sorted so that results never depend on member order
        c = np.array(sorted(self.counts.values()), dtype=float)
        return c / self.total


@dataclass(frozen=True)
class DiversityReport:
    shannon_norm: float
    simpson_norm: float
    berger_parker_norm: float
    species_richness: int
    renyi_profile: tuple[tuple[float, float], ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "shannon": self.shannon_norm,
            "simpson": self.simpson_norm,
            "berger_parker": self.berger_parker_norm,
            "species_richness": self.species_richness,
            "renyi_profile": [list(p) for p in self.renyi_profile],
        }


def _key(member: Member) -> str:
    return member if isinstance(member, str) else species_key(member)


def species_distribution(members: Iterable[Member]) -> SpeciesDistribution:
    """Group ensemble members into species.

    Members may be ``ClassifierConfig`` instances or their species keys;
    two members are the same species iff their keys are equal.
    """
    keys = [_key(m) for m in members]
    if not keys:
        raise ValueError("empty ensemble")
    return SpeciesDistribution(counts=dict(Counter(keys)), total=len(keys))


def renyi_entropy(dist: SpeciesDistribution, alpha: float) -> float:
    """Rényi entropy of order ``alpha``.

    ``ln(sum P_i**alpha) / (1 - alpha)``, with the Shannon limit used for
    alpha within 1e-9 of 1.  ``alpha = 0`` gives ``ln(S)``.
    """
    if not alpha >= 0:
        raise ValueError("alpha out of range")
    p = dist.proportions()
    if abs(alpha - 1.0) < SHANNON_ALPHA_TOL:
        return float(-np.sum(p * np.log(p)))
    if math.isinf(alpha):
        return float(-np.log(p.max()))
    # log-sum-exp keeps large alpha from underflowing to log(0)
    logs = alpha * np.log(p)
    top = logs.max()
    return float((top + np.log(np.sum(np.exp(logs - top)))) / (1.0 - alpha))


def shannon_index(dist: SpeciesDistribution) -> float:
    """Shannon entropy normalized by ``ln(M)``, M the ensemble size."""
    if dist.total == 1:
        return 0.0
    h = renyi_entropy(dist, 1.0)
    return min(1.0, max(0.0, h / math.log(dist.total)))


def simpson_index(dist: SpeciesDistribution) -> float:
    """``1 - sum P_i**2``: chance that two random draws differ in species."""
    p = dist.proportions()
    return max(0.0, 1.0 - float(np.sum(p * p)))


def berger_parker_index(dist: SpeciesDistribution) -> float:
    """Equivalent number of species ``1 / max P_i``, scaled by ensemble size."""
    # 1/max(P) / M == 1 / max(count)
    return 1.0 / max(dist.counts.values())


def uncertainty(p: float) -> float:
    """Surprisal ``-ln(p)`` of an event with probability ``p``."""
    if not 0.0 < p <= 1.0:
        raise ValueError("probability out of range")
    return -math.log(p)


def diversity_report(
    members: Sequence[Member], alphas: Sequence[float] = DEFAULT_ALPHAS
) -> DiversityReport:
    dist = species_distribution(members)
    return DiversityReport(
        shannon_norm=shannon_index(dist),
        simpson_norm=simpson_index(dist),
        berger_parker_norm=berger_parker_index(dist),
        species_richness=dist.richness,
        renyi_profile=tuple((float(a), renyi_entropy(dist, a)) for a in alphas),
    )
