"""Bandwidth-based feature selection.

The selection rule: rescale features to [0, 1], minimize the leave-one-out
loss over log-bandwidths, then call a feature relevant when its optimized
bandwidth is at or below the threshold (default 1).  A bandwidth above 1 on
unit-scaled data means the kernel weights along that feature are nearly
constant across the training set, so the feature no longer influences the
regression.

``shuffle_importance`` measures relevance the other way around: permute one
column to destroy its relation to the target, re-run the selection and
compare the optimized bandwidths with a paired baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin

from .data import Dataset, min_max_scale
from .datasets import shuffle_column
from .errors import InputError
from .loss import LeaveOneOutObjective
from .optim import LINE_SEARCH_FAILURE, OptimResult, OptimizerConfig, minimize
from .validation import check_feature_matrix, check_seed, check_target_vector


@dataclass(frozen=True)
class SelectionResult:
    """Optimized bandwidths plus the relevance decision and diagnostics."""

    sigma_opt: np.ndarray
    relevant_mask: np.ndarray
    threshold: float
    optim: OptimResult
    feature_names: tuple[str, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sigma_opt", np.asarray(self.sigma_opt, dtype=np.float64))
        object.__setattr__(self, "relevant_mask", np.asarray(self.relevant_mask, dtype=bool))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def selected(self) -> tuple[str, ...]:
        """Names of the features marked relevant."""
        return tuple(
            name for name, keep in zip(self.feature_names, self.relevant_mask) if keep
        )

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "sigma_opt": [float(v) for v in self.sigma_opt],
            "relevant_mask": [bool(v) for v in self.relevant_mask],
            "selected": list(self.selected),
            "threshold": float(self.threshold),
            "optim": {
                "loss_opt": float(self.optim.loss_opt),
                "loss_trace": [float(v) for v in self.optim.loss_trace],
                "iterations": int(self.optim.iterations),
                "converged": bool(self.optim.converged),
                "termination_reason": self.optim.termination_reason,
                "n_evaluations": int(self.optim.n_evaluations),
            },
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class ImportanceReport:
    """Paired bandwidth statistics before and after shuffling one feature.

    Means and normal-approximation 95% confidence half-widths are per
    feature, aggregated over the repeats; the raw per-repeat bandwidths are
    kept for finer-grained analysis.  ``crossed_threshold`` records whether
    the shuffled feature's mean bandwidth moved from relevant to irrelevant.
    """

    feature: str
    repeats: int
    feature_names: tuple[str, ...]
    threshold: float
    baseline_mean: np.ndarray
    baseline_ci_half: np.ndarray
    shuffled_mean: np.ndarray
    shuffled_ci_half: np.ndarray
    baseline_sigmas: np.ndarray
    shuffled_sigmas: np.ndarray
    crossed_threshold: bool

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "repeats": int(self.repeats),
            "feature_names": list(self.feature_names),
            "threshold": float(self.threshold),
            "baseline": {
                "mean": [float(v) for v in self.baseline_mean],
                "ci_half": [float(v) for v in self.baseline_ci_half],
            },
            "shuffled": {
                "mean": [float(v) for v in self.shuffled_mean],
                "ci_half": [float(v) for v in self.shuffled_ci_half],
            },
            "crossed_threshold": bool(self.crossed_threshold),
        }


def select(
    dataset: Dataset,
    config: OptimizerConfig | None = None,
    threshold: float = 1.0,
) -> SelectionResult:
    """Run the bandwidth selection on a dataset.

    Features are min-max scaled unless the dataset already carries a scaling
    record.  A bandwidth exactly at the threshold counts as relevant.
    Constant columns are always deselected: their gradient is identically
    zero, so their bandwidth never moves from the (sub-threshold)
    initialization.  Optimizer trouble is reported through the warnings list,
    never as an exception.
    """
    if threshold <= 0.0:
        raise InputError("threshold must be strictly positive")
    if dataset.n < 2:
        raise InputError("selection needs at least 2 rows")
    config = config or OptimizerConfig()
    scaled = dataset if dataset.scaler is not None else min_max_scale(dataset)
    constant = scaled.scaler.constant_mask

    objective = LeaveOneOutObjective(scaled.features, scaled.target)
    result = minimize(objective, config.initial_log_sigma(scaled.d), config)
    # The loss is exactly flat in float64 once a log-bandwidth passes ~370
    # (the kernel factor is 1 to the last bit), so the optimizer may park
    # dead coordinates arbitrarily far out; clamp to keep sigma finite.
    sigma = np.exp(np.clip(result.theta_opt, -700.0, 700.0))
    mask = (sigma <= threshold) & ~constant

    notes = list(scaled.warnings_)
    if result.termination_reason == LINE_SEARCH_FAILURE:
        notes.append("line search failed to find further decrease; best iterate kept")
    if constant.any():
        cols = [scaled.feature_names[j] for j in np.flatnonzero(constant)]
        notes.append(f"constant column(s) treated as irrelevant: {', '.join(cols)}")
    if not mask.any():
        notes.append("no feature fell at or below the bandwidth threshold")
    return SelectionResult(
        sigma_opt=sigma,
        relevant_mask=mask,
        threshold=float(threshold),
        optim=result,
        feature_names=scaled.feature_names,
        warnings=tuple(notes),
    )


def shuffle_importance(
    dataset: Dataset,
    feature: str,
    config: OptimizerConfig | None = None,
    repeats: int = 20,
    seed: int = 0,
    threshold: float = 1.0,
    dataset_factory=None,
    permutation=None,
) -> ImportanceReport:
    """Compare optimized bandwidths before and after shuffling one feature.

    Each repeat runs the selection twice on the same data: once as drawn and
    once with the named feature's column permuted by a seeded shuffle.  When
    ``dataset_factory`` (a callable ``seed -> Dataset``) is given, every
    repeat works on a freshly generated dataset, mirroring a
    repeated-simulation protocol; otherwise the fixed dataset is reused and
    per-repeat variation comes from jittered optimizer initializations (the
    same jitter the optimizer's restarts use).

    ``permutation`` is a testing hook: an explicit index array applied
    instead of the seeded shuffle in every repeat.
    """
    config = config or OptimizerConfig()
    if repeats < 1:
        raise InputError("repeats must be >= 1")
    check_seed(seed)
    dataset.feature_index(feature)

    rng = np.random.default_rng(seed)
    base_sigmas = []
    shuf_sigmas = []
    for _ in range(repeats):
        if dataset_factory is not None:
            data_r = dataset_factory(int(rng.integers(2**63)))
            config_r = config
        else:
            data_r = dataset
            init = np.asarray(config.init_sigma, dtype=np.float64)
            if init.ndim == 0:
                init = np.full(dataset.d, float(init))
            jitter = np.exp(rng.normal(0.0, 0.5, dataset.d))
            config_r = replace(config, init_sigma=tuple(init * jitter))
        shuffle_seed = int(rng.integers(2**63))
        if permutation is not None:
            perm = np.asarray(permutation, dtype=np.intp)
            j = data_r.feature_index(feature)
            X = data_r.features.copy()
            X[:, j] = X[perm, j]
            shuffled_r = data_r.with_features(X)
        else:
            shuffled_r = shuffle_column(data_r, feature, shuffle_seed)
        base_sigmas.append(select(data_r, config_r, threshold).sigma_opt)
        shuf_sigmas.append(select(shuffled_r, config_r, threshold).sigma_opt)

    base = np.asarray(base_sigmas)
    shuf = np.asarray(shuf_sigmas)

    def _ci_half(values: np.ndarray) -> np.ndarray:
        if repeats < 2:
            return np.zeros(values.shape[1])
        return 1.96 * values.std(axis=0, ddof=1) / np.sqrt(repeats)

    j = dataset.feature_index(feature)
    base_mean = base.mean(axis=0)
    shuf_mean = shuf.mean(axis=0)
    return ImportanceReport(
        feature=feature,
        repeats=repeats,
        feature_names=dataset.feature_names,
        threshold=float(threshold),
        baseline_mean=base_mean,
        baseline_ci_half=_ci_half(base),
        shuffled_mean=shuf_mean,
        shuffled_ci_half=_ci_half(shuf),
        baseline_sigmas=base,
        shuffled_sigmas=shuf,
        crossed_threshold=bool(base_mean[j] <= threshold < shuf_mean[j]),
    )


class BandwidthSelector(SelectorMixin, BaseEstimator):
    """Feature selector driven by optimized per-feature kernel bandwidths.

    Fits the anisotropic kernel regression bandwidths by minimizing the
    leave-one-out loss (features are min-max scaled internally) and keeps the
    features whose bandwidth ends at or below ``threshold``.  Composes with
    scikit-learn pipelines through ``transform`` / ``get_support``.

    Attributes set by ``fit``: ``sigma_`` (optimized bandwidths on the
    [0, 1]-scaled features), ``support_mask_`` and ``selection_result_``.
    """

    def __init__(
        self,
        threshold=1.0,
        init_sigma=0.5,
        memory=10,
        max_iterations=500,
        grad_tol=1e-6,
        rel_loss_tol=1e-10,
        restarts=0,
        random_state=0,
    ):
        self.threshold = threshold
        self.init_sigma = init_sigma
        self.memory = memory
        self.max_iterations = max_iterations
        self.grad_tol = grad_tol
        self.rel_loss_tol = rel_loss_tol
        self.restarts = restarts
        self.random_state = random_state

    def _config(self) -> OptimizerConfig:
        init = self.init_sigma
        if np.ndim(init) > 0:
            init = tuple(float(v) for v in init)
        return OptimizerConfig(
            memory=self.memory,
            max_iterations=self.max_iterations,
            grad_tol=self.grad_tol,
            rel_loss_tol=self.rel_loss_tol,
            init_sigma=init,
            restarts=self.restarts,
            seed=self.random_state,
        )

    def fit(self, X, y):
        X = check_feature_matrix(X, min_rows=2)
        y = check_target_vector(y, X.shape[0])
        dataset = Dataset(features=X, target=y)
        result = select(dataset, self._config(), self.threshold)
        self.selection_result_ = result
        self.sigma_ = result.sigma_opt
        self.support_mask_ = result.relevant_mask
        self.n_features_in_ = X.shape[1]
        return self

    def _get_support_mask(self):
        if not hasattr(self, "support_mask_"):
            raise InputError("BandwidthSelector.transform called before fit")
        return self.support_mask_
