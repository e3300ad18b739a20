"""Experiment orchestration: data, classifier pool, target sweep, diversity table."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .classifier import TrainedClassifier, config_grid, init_classifier, species_key, train
from .data import (
    DEFAULT_FRACTIONS,
    Dataset,
    generate_synthetic,
    load_csv,
    oversample_minority,
    partition,
)
from .diversity import diversity_report
from .ensemble import accuracy_from_votes, pool_votes
from .evolve import GAConfig, evolve_votes, feasible_targets

log = logging.getLogger(__name__)

CSV_HEADER = (
    "ensemble_id",
    "target_acc",
    "achieved_acc",
    "shannon",
    "simpson",
    "berger_parker",
    "species_richness",
)

# Every random stage draws from SeedSequence([master_seed, stage_id, index]).
STAGE_IDS = {
    "data": 0,
    "partition": 1,
    "pool_sample": 2,
    "pool_init": 3,
    "probe": 4,
    "ga": 5,
    "oversample": 6,
}
SEED_RULE = "seed(stage, i) = SeedSequence([master_seed, STAGE_IDS[stage], i]).generate_state(1)[0]"


def stage_seed(master_seed: int, stage: str, index: int = 0) -> int:
    ss = np.random.SeedSequence([int(master_seed), STAGE_IDS[stage], int(index)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass(frozen=True)
class DataConfig:
    n: int = 2000
    class1_fraction: float = 0.5
    separation: float = 1.5
    csv_path: Optional[str] = None
    label_column: str = "label"
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS
    oversample: bool = False
    oversample_ratio: float = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    pool_size: int = 120
    ensemble_size: int = 21
    targets: Optional[tuple[float, ...]] = None
    n_targets: int = 11
    refine_targets: bool = True
    probe_tolerance: float = 0.01
    ga: GAConfig = field(default_factory=GAConfig)
    data: DataConfig = field(default_factory=DataConfig)
    epochs: int = 100
    batch_size: int = 32
    master_seed: int = 0
    allow_replacement: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        if self.ensemble_size < 1 or self.ensemble_size % 2 == 0:
            raise ValueError("ensemble_size must be a positive odd integer")
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        if self.targets is not None:
            object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
            if not self.targets:
                raise ValueError("targets must be non-empty")
        elif self.n_targets < 1:
            raise ValueError("n_targets must be >= 1")

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["targets"] = None if self.targets is None else list(self.targets)
        doc["data"]["fractions"] = list(self.data.fractions)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        _check_keys(cls, doc)
        if "ga" in doc:
            _check_keys(GAConfig, doc["ga"])
            doc["ga"] = GAConfig(**doc["ga"])
        if "data" in doc:
            _check_keys(DataConfig, doc["data"])
            d = dict(doc["data"])
            if "fractions" in d:
                d["fractions"] = tuple(d["fractions"])
            doc["data"] = DataConfig(**d)
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _check_keys(cls, doc: dict) -> None:
    known = {f.name for f in fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} fields: {sorted(unknown)}")


@dataclass
class ExperimentRow:
    ensemble_id: int
    target_accuracy: float
    achieved_accuracy: float  # test split
    validation_accuracy: float
    best_fitness: float
    shannon_norm: float
    simpson_norm: float
    berger_parker_norm: float
    species_richness: int
    member_indices: list[int] = field(default_factory=list)
    member_species_keys: list[str] = field(default_factory=list)
    fitness_history: list[float] = field(default_factory=list)
    status: str = "ok"
    error: Optional[str] = None

    @classmethod
    def failed(cls, ensemble_id: int, target: float, error: str) -> "ExperimentRow":
        nan = math.nan
        return cls(ensemble_id, target, nan, nan, nan, nan, nan, nan, 0, status="failed", error=error)


@dataclass
class ExperimentResult:
    """Rows plus the context needed to reproduce them.  Iterates over rows."""

    rows: list[ExperimentRow]
    targets: list[float]
    probes: list[dict]
    pool: list[TrainedClassifier]
    dataset: Dataset
    config: ExperimentConfig

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]


def load_data(cfg: ExperimentConfig) -> Dataset:
    dc = cfg.data
    if dc.csv_path:
        ds = load_csv(dc.csv_path, dc.label_column)
    else:
        ds = generate_synthetic(
            dc.n, dc.class1_fraction, stage_seed(cfg.master_seed, "data"), dc.separation
        )
    return partition(ds, dc.fractions, stage_seed(cfg.master_seed, "partition"))


def _train_one(args):
    config, input_dim, seed, X, y, epochs, batch_size = args
    return train(init_classifier(config, input_dim, seed), X, y, epochs, batch_size)


def build_pool(cfg: ExperimentConfig, data: Dataset) -> list[TrainedClassifier]:
    """Sample ``pool_size`` grid cells and train one classifier per cell."""
    grid = config_grid()
    if cfg.pool_size > len(grid) and not cfg.allow_replacement:
        raise ValueError(f"pool_size {cfg.pool_size} exceeds the {len(grid)}-cell grid")
    rng = np.random.default_rng(stage_seed(cfg.master_seed, "pool_sample"))
    cells = rng.choice(len(grid), size=cfg.pool_size, replace=cfg.allow_replacement)
    X, y = data.split("train")
    if cfg.data.oversample:
        X, y = oversample_minority(X, y, cfg.data.oversample_ratio, stage_seed(cfg.master_seed, "oversample"))
    jobs = [
        (grid[c], data.input_dim, stage_seed(cfg.master_seed, "pool_init", i), X, y, cfg.epochs, cfg.batch_size)
        for i, c in enumerate(cells)
    ]
    if cfg.n_jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_jobs) as ex:
            pool = list(ex.map(_train_one, jobs))
    else:
        pool = [_train_one(j) for j in jobs]
    log.info("trained pool of %d classifiers", len(pool))
    return pool


def _sweep_targets(cfg: ExperimentConfig, val_votes, y_val):
    if cfg.targets is not None:
        probes = list(cfg.targets)
    else:
        probes = np.linspace(0.0, 1.0, cfg.n_targets).round(6).tolist()
    if not cfg.refine_targets:
        return probes, []
    ga = replace(cfg.ga, seed=stage_seed(cfg.master_seed, "probe"))
    found = feasible_targets(
        None, None, y_val, probes, ga, cfg.ensemble_size, cfg.probe_tolerance, votes=val_votes
    )
    achieved = [f.achieved_accuracy for f in found]
    lo, hi = min(achieved), max(achieved)
    targets = np.linspace(lo, hi, len(probes)).round(6).tolist()
    return targets, [asdict(f) for f in found]


def run_experiment(
    cfg: ExperimentConfig,
    data: Optional[Dataset] = None,
    pool: Optional[Sequence[TrainedClassifier]] = None,
) -> ExperimentResult:
    """Build data and pool (unless given), sweep targets, measure each winner.

    Fitness is evaluated on the validation split; reported accuracy is on the
    test split.  A target whose GA run raises becomes a failed row.
    """
    data = load_data(cfg) if data is None else data
    pool = build_pool(cfg, data) if pool is None else list(pool)
    X_val, y_val = data.split("validation")
    X_test, y_test = data.split("test")
    val_votes = pool_votes(pool, X_val)
    test_votes = pool_votes(pool, X_test)
    targets, probes = _sweep_targets(cfg, val_votes, y_val)

    rows = []
    for j, t in enumerate(targets):
        try:
            ga = replace(cfg.ga, seed=stage_seed(cfg.master_seed, "ga", j))
            res = evolve_votes(val_votes, y_val, t, ga, cfg.ensemble_size)
            idx = list(res.best_ensemble.member_indices)
            keys = [species_key(pool[i].config) for i in idx]
            rep = diversity_report(keys)
            rows.append(
                ExperimentRow(
                    ensemble_id=j,
                    target_accuracy=float(t),
                    achieved_accuracy=accuracy_from_votes(test_votes, idx, y_test),
                    validation_accuracy=res.achieved_accuracy,
                    best_fitness=res.best_fitness,
                    shannon_norm=rep.shannon_norm,
                    simpson_norm=rep.simpson_norm,
                    berger_parker_norm=rep.berger_parker_norm,
                    species_richness=rep.species_richness,
                    member_indices=idx,
                    member_species_keys=keys,
                    fitness_history=res.fitness_history,
                )
            )
        except Exception as exc:  # one bad target must not sink the sweep
            log.warning("target %s failed: %s", t, exc)
            rows.append(ExperimentRow.failed(j, float(t), f"{type(exc).__name__}: {exc}"))
    return ExperimentResult(rows, list(targets), probes, pool, data, cfg)


def _fmt(v: float) -> str:
    return "" if math.isnan(v) else f"{v:.6f}"


def write_csv(rows: Sequence[ExperimentRow], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(
                [
                    r.ensemble_id,
                    _fmt(r.target_accuracy),
                    _fmt(r.achieved_accuracy),
                    _fmt(r.shannon_norm),
                    _fmt(r.simpson_norm),
                    _fmt(r.berger_parker_norm),
                    r.species_richness if r.status == "ok" else "",
                ]
            )
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def save_pool(pool: Sequence[TrainedClassifier], path, master_seed: Optional[int] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "grid": {
            "activations": sorted({c.activation for c in config_grid()}),
            "hidden_nodes": [7, 21],
            "learning_rates": sorted({c.learning_rate for c in config_grid()}),
            "cells": len(config_grid()),
        },
        "master_seed": master_seed,
        "seed_rule": SEED_RULE,
        "classifiers": [clf.to_dict() for clf in pool],
    }
    path.write_text(json.dumps(doc) + "\n")
    return path


def load_pool(path) -> list[TrainedClassifier]:
    doc = json.loads(Path(path).read_text())
    docs = doc["classifiers"] if isinstance(doc, dict) else doc
    return [TrainedClassifier.from_dict(d) for d in docs]


def write_outputs(result: ExperimentResult, out_dir) -> dict[str, Path]:
    """``experiment.csv``, ``ensembles.json``, ``manifest.json`` and ``pool.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"csv": write_csv(result.rows, out_dir / "experiment.csv")}

    def clean(v):
        return None if isinstance(v, float) and math.isnan(v) else v

    ens = [{k: clean(v) for k, v in asdict(r).items()} for r in result.rows]
    paths["ensembles"] = out_dir / "ensembles.json"
    paths["ensembles"].write_text(json.dumps(ens, indent=1) + "\n")
    cfg = result.config
    manifest = {
        "config": cfg.to_dict(),
        "seed_rule": SEED_RULE,
        "stage_ids": STAGE_IDS,
        "stage_seeds": {
            "data": stage_seed(cfg.master_seed, "data"),
            "partition": stage_seed(cfg.master_seed, "partition"),
            "pool_sample": stage_seed(cfg.master_seed, "pool_sample"),
            "probe": stage_seed(cfg.master_seed, "probe"),
        },
        "targets": result.targets,
        "probes": result.probes,
        "csv_header": list(CSV_HEADER),
    }
    paths["manifest"] = out_dir / "manifest.json"
    paths["manifest"].write_text(json.dumps(manifest, indent=2) + "\n")
    paths["pool"] = save_pool(result.pool, out_dir / "pool.json", cfg.master_seed)
    return paths
