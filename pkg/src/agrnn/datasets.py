"""Seeded synthetic dataset generators, CSV ingestion and column shuffling.

Two synthetic families are provided:

* the *Butterfly* dataset: two relevant inputs X1, X2 drawn uniformly on
  ]-5, 5[ drive the target through a small fixed tanh network; three
  redundant features J3 = log10(X1+5), J4 = X1^2 - X2^2, J5 = X1^4 - X2^4
  are deterministic functions of the relevant pair, and three irrelevant
  ones are built from an independent uniform draw I6 (I7 = log10(I6+5),
  I8 = I6 + I7);

* the *Friedman* regression benchmark: of d uniform [0, 1] features only
  the first five enter the target
  y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5 + noise.

Generators are pure functions of their spec; every random stream is derived
from the spec's seeds, so equal specs produce bitwise-identical datasets.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DroppedRowsWarning, InputError
from .validation import check_seed

# Canonical weights for the Butterfly target network.  The architecture is
# fixed (one hidden layer of 10 tanh units); the weights are standard normal
# draws from this seed, shared by every Butterfly dataset unless overridden.
DEFAULT_WEIGHT_SEED = 42

BUTTERFLY_FEATURES = ("X1", "X2", "J3", "J4", "J5", "I6", "I7", "I8")


@dataclass(frozen=True)
class ButterflySpec:
    """Sample count and seeds for one Butterfly dataset.

    ``seed`` drives the sample draws; ``weight_seed`` fixes the target
    network's weights and defaults to the canonical value so independently
    generated datasets share one target function.
    """

    n: int
    seed: int = 0
    hidden_units: int = 10
    weight_seed: int = DEFAULT_WEIGHT_SEED

    def __post_init__(self):
        if self.n < 2:
            raise InputError("butterfly spec needs n >= 2")
        if self.hidden_units < 1:
            raise InputError("hidden_units must be >= 1")
        check_seed(self.seed)
        check_seed(self.weight_seed)


@dataclass(frozen=True)
class FriedmanSpec:
    """Sample count, width, noise level and seed for one Friedman dataset."""

    n: int
    d: int = 30
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InputError("friedman spec needs n >= 2")
        if self.d < 5:
            raise InputError("friedman spec needs d >= 5 (five relevant features)")
        if self.noise_sd < 0.0:
            raise InputError("noise_sd must be non-negative")
        check_seed(self.seed)


def _open_uniform(rng: np.random.Generator, low: float, high: float, n: int) -> np.ndarray:
    """Uniform draw on the open interval ]low, high[ (endpoints excluded)."""
    x = rng.uniform(low, high, n)
    while True:
        hit = (x <= low) | (x >= high)
        if not hit.any():
            return x
        x[hit] = rng.uniform(low, high, int(hit.sum()))


def make_butterfly(spec: ButterflySpec) -> Dataset:
    """Generate a Butterfly dataset (8 features named X1..I8, target Y)."""
    rng = np.random.default_rng(spec.seed)
    x1 = _open_uniform(rng, -5.0, 5.0, spec.n)
    x2 = _open_uniform(rng, -5.0, 5.0, spec.n)
    i6 = _open_uniform(rng, -5.0, 5.0, spec.n)

    wrng = np.random.default_rng(spec.weight_seed)
    w = wrng.normal(size=(spec.hidden_units, 2))
    b = wrng.normal(size=spec.hidden_units)
    v = wrng.normal(size=spec.hidden_units)
    c = wrng.normal()
    y = np.tanh(np.column_stack([x1, x2]) @ w.T + b) @ v + c

    j3 = np.log10(x1 + 5.0)
    j4 = x1**2 - x2**2
    j5 = x1**4 - x2**4
    i7 = np.log10(i6 + 5.0)
    i8 = i6 + i7
    X = np.column_stack([x1, x2, j3, j4, j5, i6, i7, i8])
    return Dataset(features=X, target=y, feature_names=BUTTERFLY_FEATURES, target_name="Y")


def make_friedman(spec: FriedmanSpec) -> Dataset:
    """Generate a Friedman benchmark dataset (features x1..xd, target y)."""
    rng = np.random.default_rng(spec.seed)
    X = rng.uniform(size=(spec.n, spec.d))
    y = (
        10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
        + 20.0 * (X[:, 2] - 0.5) ** 2
        + 10.0 * X[:, 3]
        + 5.0 * X[:, 4]
    )
    if spec.noise_sd > 0.0:
        y = y + rng.normal(0.0, spec.noise_sd, spec.n)
    names = tuple(f"x{j + 1}" for j in range(spec.d))
    return Dataset(features=X, target=y, feature_names=names, target_name="y")


def load_csv(path, target_column: str) -> Dataset:
    """Load a numeric CSV with a header row into a :class:`Dataset`.

    Rows containing any value that does not parse as a float are dropped; the
    drop count is reported through a :class:`DroppedRowsWarning`.  Missing
    target column, an empty file or zero usable rows raise
    :class:`InputError`.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if target_column not in header:
            raise InputError(
                f"{path}: target column {target_column!r} not in header {header}"
            )
        rows: list[list[float]] = []
        dropped = 0
        for raw in reader:
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if len(raw) != len(header):
                dropped += 1
                continue
            try:
                rows.append([float(cell) for cell in raw])
            except ValueError:
                dropped += 1
    if dropped:
        warnings.warn(
            f"{path}: dropped {dropped} row(s) with missing or unparsable values",
            DroppedRowsWarning,
            stacklevel=2,
        )
    if not rows:
        raise InputError(f"{path}: no usable rows")
    data = np.asarray(rows, dtype=np.float64)
    t = header.index(target_column)
    feature_cols = [j for j in range(len(header)) if j != t]
    return Dataset(
        features=data[:, feature_cols],
        target=data[:, t],
        feature_names=tuple(header[j] for j in feature_cols),
        target_name=target_column,
    )


def save_csv(dataset: Dataset, path) -> None:
    """Write a dataset as CSV (features then target, shortest exact floats)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [dataset.target_name])
        for i in range(dataset.n):
            writer.writerow(
                [repr(float(v)) for v in dataset.features[i]]
                + [repr(float(dataset.target[i]))]
            )


def shuffle_column(dataset: Dataset, feature: str, seed: int) -> Dataset:
    """Copy of the dataset with one feature column permuted by a seeded shuffle.

    The permutation is the Fisher-Yates shuffle of the seeded generator; all
    other columns and the target are untouched.
    """
    j = dataset.feature_index(feature)
    perm = np.random.default_rng(check_seed(seed)).permutation(dataset.n)
    X = dataset.features.copy()
    X[:, j] = X[perm, j]
    return dataset.with_features(X)
