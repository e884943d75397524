"""Benchmark harness comparing feature-selection methods with a pluggable evaluator.

Protocol: every method first selects its feature subset on the full scaled
dataset; then, for each of ``repeats`` seeded 80/20 splits, the evaluator's
hyperparameter is tuned by k-fold cross-validation on the training part, the
tuned model is fit and scored on the held-out part, and the MSE (on the
scaled target) is recorded.  Feature selection deliberately happens before
the splits; the selection bias this introduces is a property of the protocol
being reproduced and is noted in the report.

The default evaluator is k-nearest-neighbors with k tuned over {1, 3, 5, 7,
9}; an isotropic-kernel variant of the GRNN regressor (bandwidth tuned over a
10-point log grid) is available as an alternative.  F-test and mutual
information do not define their own subset size, so their count is fixed to
the RReliefF selection count.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.neighbors import KNeighborsRegressor

from .baselines import cfs_select, ftest_scores, mi_scores, rrelieff_scores, top_k
from .data import Dataset, min_max_scale
from .errors import InputError
from .grnn import GRNNRegressor
from .optim import OptimizerConfig
from .selector import select
from .validation import check_seed

METHODS = ("as", "ftest", "mi", "cfs", "rrelieff")
EVALUATORS = ("knn", "grnn-isotropic")

KNN_GRID = (1, 3, 5, 7, 9)
GRNN_SIGMA_GRID = tuple(np.logspace(-2.0, 0.5, 10))


@dataclass(frozen=True)
class BenchmarkConfig:
    """Configuration of one benchmark run."""

    methods: tuple[str, ...] = METHODS
    evaluator: str = "knn"
    train_fraction: float = 0.8
    cv_folds: int = 5
    repeats: int = 20
    seed: int = 0
    target_column: str | None = None
    scale_target: bool = True
    threshold: float = 1.0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise InputError(f"unknown method(s): {', '.join(unknown)}")
        if self.evaluator not in EVALUATORS:
            raise InputError(f"unknown evaluator {self.evaluator!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise InputError("train_fraction must lie in (0, 1)")
        if self.cv_folds < 2:
            raise InputError("cv_folds must be >= 2")
        if self.repeats < 1:
            raise InputError("repeats must be >= 1")
        check_seed(self.seed)

    def to_dict(self) -> dict:
        opt = self.optimizer
        return {
            "methods": list(self.methods),
            "evaluator": self.evaluator,
            "train_fraction": self.train_fraction,
            "cv_folds": self.cv_folds,
            "repeats": self.repeats,
            "seed": self.seed,
            "target_column": self.target_column,
            "scale_target": self.scale_target,
            "threshold": self.threshold,
            "optimizer": {
                "memory": opt.memory,
                "max_iterations": opt.max_iterations,
                "grad_tol": opt.grad_tol,
                "rel_loss_tol": opt.rel_loss_tol,
                "init_sigma": opt.init_sigma,
                "restarts": opt.restarts,
                "seed": opt.seed,
            },
        }


@dataclass(frozen=True)
class MethodResult:
    """Selected subset and repeated-evaluation MSE statistics for one method."""

    method: str
    selected: tuple[str, ...]
    count: int
    mse_mean: float
    mse_std: float
    mse_values: tuple[float, ...]
    zero_selection: bool = False

    def to_dict(self) -> dict:
        return {
            "selected": list(self.selected),
            "count": self.count,
            "mse_mean": self.mse_mean,
            "mse_std": self.mse_std,
            "mse_values": list(self.mse_values),
            "zero_selection": self.zero_selection,
        }


@dataclass(frozen=True)
class BenchmarkReport:
    """Per-method selections and MSE statistics plus run metadata."""

    dataset_name: str
    n: int
    d: int
    config: BenchmarkConfig
    results: tuple[MethodResult, ...]
    notes: tuple[str, ...] = ()
    timings: dict = field(default_factory=dict, compare=False)

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "schema_version": 1,
            "dataset": {"name": self.dataset_name, "n": self.n, "d": self.d},
            "config": self.config.to_dict(),
            "methods": {r.method: r.to_dict() for r in self.results},
            "notes": list(self.notes),
        }
        if include_timings:
            out["timings"] = self.timings
        return out


def _split_indices(n: int, n_train: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint train/test row indices for one seeded repeat."""
    perm = np.random.default_rng(seed).permutation(n)
    return perm[:n_train], perm[n_train:]


def _tuned_model(evaluator: str, X_train, y_train, cv_folds: int):
    """Pick the evaluator hyperparameter by k-fold CV and return the fitted model."""
    n_train = X_train.shape[0]
    if n_train < cv_folds:
        raise InputError(
            f"training part has {n_train} rows, fewer than cv_folds={cv_folds}"
        )
    fold_sizes = np.full(cv_folds, n_train // cv_folds)
    fold_sizes[: n_train % cv_folds] += 1
    bounds = np.concatenate([[0], np.cumsum(fold_sizes)])
    folds = [np.arange(bounds[f], bounds[f + 1]) for f in range(cv_folds)]
    min_fit = n_train - max(len(f) for f in folds)

    if evaluator == "knn":
        grid = [("n_neighbors", k) for k in KNN_GRID if k <= min_fit]
        make = lambda k: KNeighborsRegressor(n_neighbors=k)
    else:
        grid = [("sigma", s) for s in GRNN_SIGMA_GRID]
        make = lambda s: GRNNRegressor(sigma=s)
    if not grid:
        raise InputError("training part too small for any evaluator setting")

    best_err, best_value = np.inf, None
    for _, value in grid:
        err = 0.0
        for f in range(cv_folds):
            test_idx = folds[f]
            train_idx = np.concatenate([folds[g] for g in range(cv_folds) if g != f])
            model = make(value).fit(X_train[train_idx], y_train[train_idx])
            pred = model.predict(X_train[test_idx])
            err += float(((pred - y_train[test_idx]) ** 2).mean())
        err /= cv_folds
        if err < best_err:
            best_err, best_value = err, value
    return make(best_value).fit(X_train, y_train)


def _select_features(method: str, scaled: Dataset, config: BenchmarkConfig, cache: dict):
    """Selected feature names for one method on the full scaled dataset."""
    if method == "as":
        return list(select(scaled, config.optimizer, config.threshold).selected)
    if method == "rrelieff":
        return cache["rrelieff_selected"]
    if method == "cfs":
        return cfs_select(scaled)
    # F-test and MI rank all features; the subset size follows RReliefF.
    k = len(cache["rrelieff_selected"])
    if k == 0:
        return []
    scores = ftest_scores(scaled) if method == "ftest" else mi_scores(scaled)
    return top_k(scores, k)


def run_benchmark(
    dataset: Dataset,
    config: BenchmarkConfig,
    dataset_name: str = "",
    threads: int | None = None,
) -> BenchmarkReport:
    """Run the selection-plus-evaluation protocol and aggregate MSE statistics.

    A method that selects zero features is evaluated on the full feature set
    and flagged; this is reported, not raised.  Repeats run in parallel over
    a bounded worker pool; results are reduced in repeat order, so reports
    are a pure function of (dataset, config).
    """
    timings: dict = {"selection": {}, "evaluation": {}}
    scaled = min_max_scale(dataset, scale_target=config.scale_target)
    n = scaled.n
    n_train = int(config.train_fraction * n)
    if n_train < config.cv_folds:
        raise InputError(
            f"train_fraction*n = {n_train} is smaller than cv_folds = {config.cv_folds}"
        )
    if n_train >= n:
        raise InputError("train_fraction leaves no test rows")

    cache: dict = {}
    if any(m in config.methods for m in ("rrelieff", "ftest", "mi")):
        t0 = time.perf_counter()
        relief = rrelieff_scores(scaled, seed=config.seed)
        cache["rrelieff_selected"] = [
            name for name, w in zip(scaled.feature_names, relief.scores) if w > 0.0
        ]
        timings["selection"]["rrelieff-scores"] = time.perf_counter() - t0

    selections: dict[str, tuple[list[str], bool]] = {}
    for method in config.methods:
        t0 = time.perf_counter()
        names = _select_features(method, scaled, config, cache)
        timings["selection"][method] = time.perf_counter() - t0
        zero = len(names) == 0
        selections[method] = (list(scaled.feature_names) if zero else names, zero)

    split_seeds = [
        int(s) for s in np.random.default_rng(config.seed).integers(2**63, size=config.repeats)
    ]
    column_index = {name: j for j, name in enumerate(scaled.feature_names)}
    X, y = scaled.features, scaled.target

    def one_repeat(r: int) -> dict[str, float]:
        train_idx, test_idx = _split_indices(n, n_train, split_seeds[r])
        row = {}
        for method in config.methods:
            cols = [column_index[name] for name in selections[method][0]]
            model = _tuned_model(
                config.evaluator, X[np.ix_(train_idx, cols)], y[train_idx], config.cv_folds
            )
            pred = model.predict(X[np.ix_(test_idx, cols)])
            row[method] = float(((pred - y[test_idx]) ** 2).mean())
        return row

    t0 = time.perf_counter()
    if threads == 1 or config.repeats == 1:
        rows = [one_repeat(r) for r in range(config.repeats)]
    else:
        workers = threads or min(config.repeats, os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one_repeat, range(config.repeats)))
    timings["evaluation"]["total"] = time.perf_counter() - t0

    results = []
    for method in config.methods:
        names, zero = selections[method]
        mses = np.asarray([row[method] for row in rows])
        results.append(
            MethodResult(
                method=method,
                selected=tuple(() if zero else names),
                count=0 if zero else len(names),
                mse_mean=float(mses.mean()),
                mse_std=float(mses.std(ddof=1)) if config.repeats > 1 else 0.0,
                mse_values=tuple(float(v) for v in mses),
                zero_selection=zero,
            )
        )
    notes = (
        "feature selection runs on the full dataset before the evaluation splits",
        "cross-validation tunes the evaluator hyperparameter, then the tuned "
        "model is refit on the whole training part",
        "MSE is computed on the scaled target" if config.scale_target else "MSE is computed on the raw target",
    )
    return BenchmarkReport(
        dataset_name=dataset_name,
        n=n,
        d=scaled.d,
        config=config,
        results=tuple(results),
        notes=notes,
        timings=timings,
    )


def _format_mse(mean: float, std: float) -> str:
    std_text = f"{std:.3g}" if 0.0 < std < 5e-4 else f"{std:.3f}"
    return f"{mean:.3f}(±{std_text})"


def emit_report(report: BenchmarkReport, format: str = "text-table", include_timings: bool = False) -> str:
    """Render a report as a text table, JSON document or CSV.

    Timings are excluded by default so that emitted reports are byte-identical
    across reruns with the same seed.
    """
    if format in ("text", "text-table"):
        lines = [f"dataset: {report.dataset_name or '(unnamed)'}  n={report.n}  d={report.d}"]
        lines.append(f"{'method':<10} {'#':>3}  MSE mean(±std) over {report.config.repeats} repeats")
        for r in report.results:
            flag = "  [zero selection: evaluated on all features]" if r.zero_selection else ""
            lines.append(f"{r.method:<10} {r.count:>3}  {_format_mse(r.mse_mean, r.mse_std)}{flag}")
        return "\n".join(lines) + "\n"
    if format == "json":
        return json.dumps(report.to_dict(include_timings=include_timings), sort_keys=True, indent=2) + "\n"
    if format == "csv":
        lines = ["dataset,method,count,mse_mean,mse_std,zero_selection"]
        for r in report.results:
            lines.append(
                f"{report.dataset_name},{r.method},{r.count},"
                f"{r.mse_mean!r},{r.mse_std!r},{str(r.zero_selection).lower()}"
            )
        return "\n".join(lines) + "\n"
    raise InputError(f"unknown report format {format!r}")
