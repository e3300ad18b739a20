"""Command line entry point.

    strucdiv gen-data    synthetic dataset -> <out>/dataset.{csv,json}
    strucdiv train-pool  train a classifier pool -> <out>/pool.json
    strucdiv evolve      one GA run against a saved pool -> <out>/ga_result.json
    strucdiv measure     diversity of a saved ensemble, printed to stdout
    strucdiv experiment  full sweep -> <out>/experiment.csv (+ json sidecars)

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .classifier import species_key
from .data import DataError, generate_synthetic, load_dataset, partition, save_dataset
from .diversity import diversity_report
from .ensemble import Ensemble
from .evolve import GAResult, evolve
from .harness import (
    DataConfig,
    ExperimentConfig,
    build_pool,
    load_pool,
    run_experiment,
    save_pool,
    stage_seed,
    write_outputs,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--config", type=Path, default=None, help="ExperimentConfig JSON file")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="strucdiv", description=__doc__.split("\n\n")[0], parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen-data", parents=[common], help="write a synthetic dataset")
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--fraction", type=float, default=None, help="class-1 fraction")
    g.add_argument("--separation", type=float, default=None)

    t = sub.add_parser("train-pool", parents=[common], help="train and save a classifier pool")
    t.add_argument("--data", type=Path, required=True, help="dataset directory from gen-data")
    t.add_argument("--pool-size", type=int, default=None)
    t.add_argument("--epochs", type=int, default=None)

    e = sub.add_parser("evolve", parents=[common], help="one GA run against a saved pool")
    e.add_argument("--pool", type=Path, required=True)
    e.add_argument("--data", type=Path, required=True)
    e.add_argument("--target", type=float, required=True)
    e.add_argument("--ensemble-size", type=int, default=None)

    m = sub.add_parser("measure", parents=[common], help="diversity report for a saved ensemble")
    m.add_argument("ensemble", type=Path, help="ga_result.json or a JSON array of pool indices")
    m.add_argument("--pool", type=Path, required=True)

    sub.add_parser("experiment", parents=[common], help="full target sweep")
    return p


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    return cfg


def _gen_data(args, cfg: ExperimentConfig) -> int:
    dc: DataConfig = cfg.data
    ds = generate_synthetic(
        args.n if args.n is not None else dc.n,
        args.fraction if args.fraction is not None else dc.class1_fraction,
        stage_seed(cfg.master_seed, "data"),
        args.separation if args.separation is not None else dc.separation,
    )
    ds = partition(ds, dc.fractions, stage_seed(cfg.master_seed, "partition"))
    csv_path, _ = save_dataset(ds, args.out)
    print(f"wrote {csv_path} ({len(ds)} rows, {int(ds.labels.sum())} class-1)")
    return EXIT_OK


def _train_pool(args, cfg: ExperimentConfig) -> int:
    if args.pool_size is not None:
        cfg = replace(cfg, pool_size=args.pool_size)
    if args.epochs is not None:
        cfg = replace(cfg, epochs=args.epochs)
    pool = build_pool(cfg, load_dataset(args.data))
    path = save_pool(pool, args.out / "pool.json", cfg.master_seed)
    print(f"wrote {path} ({len(pool)} classifiers)")
    return EXIT_OK


def _evolve(args, cfg: ExperimentConfig) -> int:
    pool = load_pool(args.pool)
    X, y = load_dataset(args.data).split("validation")
    ga = replace(cfg.ga, seed=stage_seed(cfg.master_seed, "ga"))
    size = args.ensemble_size or cfg.ensemble_size
    res = evolve(pool, X, y, args.target, ga, size)
    doc = res.to_dict()
    doc["member_species_keys"] = [species_key(pool[i].config) for i in res.best_ensemble.member_indices]
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "ga_result.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"target {res.target:.6f} achieved {res.achieved_accuracy:.6f} fitness {res.best_fitness:.6g}")
    return EXIT_OK


def _measure(args, cfg: ExperimentConfig) -> int:
    pool = load_pool(args.pool)
    doc = json.loads(args.ensemble.read_text())
    indices = doc["member_indices"] if isinstance(doc, dict) else doc
    ens = Ensemble(tuple(indices))
    ens.check(len(pool))
    rep = diversity_report([pool[i].config for i in ens.member_indices])
    print(f"shannon {rep.shannon_norm}")
    print(f"simpson {rep.simpson_norm}")
    print(f"berger_parker {rep.berger_parker_norm}")
    print(f"species_richness {rep.species_richness}")
    for alpha, h in rep.renyi_profile:
        print(f"renyi[{alpha:g}] {h}")
    return EXIT_OK


def _experiment(args, cfg: ExperimentConfig) -> int:
    result = run_experiment(cfg)
    paths = write_outputs(result, args.out)
    failed = sum(r.status != "ok" for r in result.rows)
    print(f"wrote {paths['csv']} ({len(result.rows)} rows, {failed} failed)")
    return EXIT_OK


COMMANDS = {
    "gen-data": _gen_data,
    "train-pool": _train_pool,
    "evolve": _evolve,
    "measure": _measure,
    "experiment": _experiment,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        cfg = _config(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"strucdiv: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, cfg)
    except (DataError, ValueError, IndexError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"strucdiv: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
