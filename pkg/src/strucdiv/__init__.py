"""Structural diversity of classifier ensembles measured with entropy indices."""

from .classifier import (
    ClassifierConfig,
    TrainedClassifier,
    config_grid,
    forward,
    gradient_check,
    init_classifier,
    predict_proba,
    species_key,
    train,
)
from .data import Dataset, generate_synthetic, load_csv, minmax_normalize, partition
from .diversity import (
    DiversityReport,
    SpeciesDistribution,
    berger_parker_index,
    diversity_report,
    renyi_entropy,
    shannon_index,
    simpson_index,
    species_distribution,
    uncertainty,
)
from .ensemble import Ensemble, accuracy, vote
from .evolve import GAConfig, GAResult, evolve, feasible_targets, fitness
from .harness import ExperimentConfig, ExperimentRow, build_pool, run_experiment

__version__ = "0.1.0"
