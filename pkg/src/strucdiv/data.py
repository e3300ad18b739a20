"""Binary-classification datasets: synthetic generation, CSV ingestion,
min-max normalization and stratified partitioning."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

FEATURE_NAMES = (
    "Allies",
    "Contingency",
    "Distance",
    "Major Power",
    "Capability",
    "Democracy",
    "Dependency",
)
# 875 conflict dyad-years out of 27,737
CONFLICT_FRACTION = 875 / 27737

SPLITS = ("train", "validation", "test")
DEFAULT_FRACTIONS = (0.6, 0.2, 0.2)


class DataError(ValueError):
    pass


class ConstantColumnWarning(UserWarning):
    pass


@dataclass
class Dataset:
    features: np.ndarray  # (N, d) in [0, 1]
    labels: np.ndarray  # (N,) of 0/1
    feature_names: tuple[str, ...]
    ranges: np.ndarray  # (d, 2) raw per-column (min, max)
    partition: Optional[np.ndarray] = None  # (N,) of split codes 0/1/2
    seed: Optional[int] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int8)
        self.feature_names = tuple(self.feature_names)
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise DataError("features must be (N, d) with N labels")
        if len(self.feature_names) != self.features.shape[1]:
            raise DataError("one feature name per column required")

    def __len__(self):
        return self.labels.shape[0]

    @property
    def input_dim(self) -> int:
        return self.features.shape[1]

    def split(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        if self.partition is None:
            raise DataError("dataset has not been partitioned")
        mask = self.partition == SPLITS.index(name)
        return self.features[mask], self.labels[mask]


def minmax_normalize(features) -> tuple[np.ndarray, np.ndarray]:
    """Scale each column to [0, 1]; returns the scaled matrix and (min, max) per column.

    Constant columns map to zero and emit :class:`ConstantColumnWarning`.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.size == 0:
        raise DataError("empty feature matrix")
    lo, hi = X.min(axis=0), X.max(axis=0)
    ranges = np.stack([lo, hi], axis=1)
    return apply_ranges(X, ranges), ranges


def apply_ranges(features, ranges) -> np.ndarray:
    """Normalize with previously fitted ranges (values are not clipped)."""
    X = np.asarray(features, dtype=float)
    lo, hi = ranges[:, 0], ranges[:, 1]
    span = hi - lo
    flat = span == 0
    if flat.any():
        warnings.warn(
            f"constant columns {np.flatnonzero(flat).tolist()} normalized to 0",
            ConstantColumnWarning,
            stacklevel=3,
        )
    return np.where(flat, 0.0, (X - lo) / np.where(flat, 1.0, span))


def generate_synthetic(
    n: int,
    class1_fraction: float = 0.5,
    seed: int = 0,
    separation: float = 1.5,
) -> Dataset:
    """Two overlapping unit-variance Gaussian classes in 7 dimensions.

    The class means lie ``separation`` standard deviations apart along the
    diagonal.  Class-1 gets ``round(n * class1_fraction)`` rows.
    """
    if n < 20:
        raise DataError("n must be >= 20")
    if not 0.0 < class1_fraction < 1.0:
        raise DataError("class1_fraction must be in (0, 1)")
    d = len(FEATURE_NAMES)
    rng = np.random.default_rng(seed)
    n1 = int(round(n * class1_fraction))
    n1 = min(max(n1, 1), n - 1)
    labels = np.zeros(n, dtype=np.int8)
    labels[rng.permutation(n)[:n1]] = 1
    shift = separation / math.sqrt(d)
    raw = rng.standard_normal((n, d)) + shift * labels[:, None]
    X, ranges = minmax_normalize(raw)
    return Dataset(X, labels, FEATURE_NAMES, ranges, seed=seed)


def load_csv(path, label_column: str) -> Dataset:
    """Read a numeric CSV with a header row; ``label_column`` must hold 0/1."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: no column named {label_column!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            vals = []
            for col, cell in zip(header, row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {col!r}"
                    ) from None
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    table = np.array(rows)
    li = header.index(label_column)
    labels = table[:, li]
    if not np.all((labels == 0) | (labels == 1)):
        bad = sorted(set(labels[(labels != 0) & (labels != 1)].tolist()))
        raise DataError(f"{path}: labels must be 0/1, found {bad}")
    names = [h for i, h in enumerate(header) if i != li]
    X, ranges = minmax_normalize(np.delete(table, li, axis=1))
    return Dataset(X, labels.astype(np.int8), names, ranges)


def _allocate(n: int, fractions: Sequence[float]) -> list[int]:
    # largest-remainder rounding so the parts sum to n
    exact = [f * n for f in fractions]
    parts = [math.floor(e) for e in exact]
    by_rem = sorted(range(len(exact)), key=lambda i: (-(exact[i] - parts[i]), i))
    for i in by_rem[: n - sum(parts)]:
        parts[i] += 1
    return parts


def partition(
    ds: Dataset, fractions: Sequence[float] = DEFAULT_FRACTIONS, seed: int = 0
) -> Dataset:
    """Stratified train/validation/test assignment; returns a new Dataset."""
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise DataError("fractions must be three positive values")
    if not math.isclose(sum(fractions), 1.0, abs_tol=1e-9):
        raise DataError("fractions must sum to 1")
    rng = np.random.default_rng(seed)
    assign = np.empty(len(ds), dtype=np.int8)
    for cls in (0, 1):
        rows = np.flatnonzero(ds.labels == cls)
        parts = _allocate(rows.size, fractions)
        if min(parts) == 0:
            raise DataError(f"class {cls} has too few rows ({rows.size}) to appear in every split")
        rows = rng.permutation(rows)
        bounds = np.cumsum([0] + parts)
        for code in range(3):
            assign[rows[bounds[code]:bounds[code + 1]]] = code
    return replace(ds, partition=assign, seed=ds.seed if ds.seed is not None else seed)


def oversample_minority(X, y, ratio: float = 1.0, seed: int = 0):
    """Duplicate minority rows until minority/majority reaches ``ratio``."""
    X, y = np.asarray(X), np.asarray(y)
    counts = np.bincount(y.astype(int), minlength=2)
    minority = int(np.argmin(counts))
    want = int(math.ceil(ratio * counts.max())) - counts[minority]
    if want <= 0 or counts[minority] == 0:
        return X, y
    rng = np.random.default_rng(seed)
    extra = rng.choice(np.flatnonzero(y == minority), size=want, replace=True)
    keep = np.concatenate([np.arange(y.size), np.sort(extra)])
    return X[keep], y[keep]


def save_dataset(ds: Dataset, out_dir, stem: str = "dataset") -> tuple[Path, Path]:
    """Write ``<stem>.csv`` (normalized values, label, split) and ``<stem>.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path, manifest_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.json"
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(ds.feature_names) + ["label"])
        for row, lab in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in row] + [int(lab)])
    manifest = {
        "feature_names": list(ds.feature_names),
        "ranges": ds.ranges.tolist(),
        "label_column": "label",
        "n_rows": len(ds),
        "seed": ds.seed,
        "splits": list(SPLITS),
        "partition": None if ds.partition is None else ds.partition.tolist(),
        "csv": csv_path.name,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return csv_path, manifest_path


def load_dataset(path) -> Dataset:
    """Load a dataset written by :func:`save_dataset` (directory or manifest path)."""
    path = Path(path)
    manifest_path = path / "dataset.json" if path.is_dir() else path
    if not manifest_path.exists():
        raise DataError(f"{manifest_path}: no such dataset manifest")
    manifest = json.loads(manifest_path.read_text())
    table = np.loadtxt(manifest_path.parent / manifest["csv"], delimiter=",", skiprows=1, ndmin=2)
    part = manifest.get("partition")
    return Dataset(
        features=table[:, :-1],
        labels=table[:, -1].astype(np.int8),
        feature_names=manifest["feature_names"],
        ranges=np.asarray(manifest["ranges"], dtype=float),
        partition=None if part is None else np.asarray(part, dtype=np.int8),
        seed=manifest.get("seed"),
    )
