"""Reference feature-selection methods used for comparison.

Univariate F-test scores, plug-in histogram mutual information, greedy
correlation-based feature selection (CFS) and the RReliefF neighborhood
estimator.  All methods operate on [0, 1] min-max scaled features (the same
scaling the bandwidth selector applies) so distance-based scores are
comparable across datasets.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset, min_max_scale
from .errors import ConstantColumnWarning, InputError
from .grnn import _block_rows
from .validation import check_seed

# Score assigned to a perfectly correlated feature by the F-test.
F_SENTINEL = 1e12

# Exponential rank-decay scale for RReliefF neighbor weighting.
RELIEF_RANK_SCALE = 20.0


@dataclass(frozen=True)
class ScoreVector:
    """Per-feature relevance scores; higher means more relevant."""

    method: str
    scores: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.shape[0] != len(self.feature_names):
            raise InputError("scores and feature_names length mismatch")
        if not np.isfinite(scores).all():
            raise InputError("scores must be finite")
        object.__setattr__(self, "scores", scores)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "feature_names": list(self.feature_names),
            "scores": [float(v) for v in self.scores],
        }


def _scaled(dataset: Dataset, scale_target: bool = False) -> Dataset:
    # Min-max scaling is idempotent, so re-scaling an already scaled dataset
    # is a no-op; the constant-column warning is suppressed here because the
    # caller reports degeneracies in its own terms.
    raw = Dataset(
        features=dataset.features,
        target=dataset.target,
        feature_names=dataset.feature_names,
        target_name=dataset.target_name,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstantColumnWarning)
        return min_max_scale(raw, scale_target=scale_target)


def _pearson_with_target(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pearson correlation of each column with y; 0 for degenerate columns."""
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    sx = np.sqrt((Xc**2).sum(axis=0))
    sy = np.sqrt((yc**2).sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (Xc * yc[:, None]).sum(axis=0) / (sx * sy)
    return np.where(np.isfinite(r), r, 0.0)


def ftest_scores(dataset: Dataset) -> ScoreVector:
    """Univariate F statistic of each feature against the target.

    F = r^2 (n - 2) / (1 - r^2) from the Pearson correlation r; perfect
    correlation maps to the sentinel 1e12.  Constant features score 0 and
    raise a warning.
    """
    if dataset.n < 3:
        raise InputError("F-test needs at least 3 rows")
    X, y = dataset.features, dataset.target
    constant = X.max(axis=0) == X.min(axis=0)
    if constant.any():
        warnings.warn(
            "constant feature(s) scored 0 by the F-test",
            ConstantColumnWarning,
            stacklevel=2,
        )
    r = _pearson_with_target(X, y)
    r2 = np.minimum(r * r, 1.0)
    with np.errstate(divide="ignore"):
        f = r2 * (dataset.n - 2) / (1.0 - r2)
    f = np.where(np.isfinite(f), np.minimum(f, F_SENTINEL), F_SENTINEL)
    f = np.where(constant, 0.0, f)
    return ScoreVector(method="ftest", scores=f, feature_names=dataset.feature_names)


def mi_scores(dataset: Dataset, bins: int = 10) -> ScoreVector:
    """Plug-in mutual information from an equal-width joint histogram, in nats.

    Each (feature, target) pair is binned on a ``bins x bins`` grid; the
    score is the mutual information of the empirical cell distribution.
    Non-negative by construction; a constant feature occupies a single
    column, giving exactly 0.
    """
    if bins < 1:
        raise InputError("bins must be >= 1")
    if dataset.n < bins:
        raise InputError(f"mutual information needs n >= bins ({bins})")
    X, y = dataset.features, dataset.target
    out = np.empty(dataset.d)
    for j in range(dataset.d):
        counts, _, _ = np.histogram2d(X[:, j], y, bins=bins)
        p = counts / counts.sum()
        px = p.sum(axis=1, keepdims=True)
        py = p.sum(axis=0, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = p * np.log(p / (px * py))
        out[j] = max(0.0, float(np.nansum(terms)))
    return ScoreVector(method="mi", scores=out, feature_names=dataset.feature_names)


def cfs_merit(corr_fy: np.ndarray, corr_ff: np.ndarray, subset: list[int]) -> float:
    """CFS merit of a feature subset from precomputed absolute correlations.

    merit(S) = k mean(|r_cf|) / sqrt(k + k (k - 1) mean(|r_ff|)) for |S| = k.
    """
    k = len(subset)
    if k == 0:
        return 0.0
    rcf = float(corr_fy[subset].mean())
    if k == 1:
        return rcf
    sub = corr_ff[np.ix_(subset, subset)]
    rff = float((sub.sum() - k) / (k * (k - 1)))  # off-diagonal mean
    return k * rcf / np.sqrt(k + k * (k - 1) * rff)


def cfs_select(dataset: Dataset) -> list[str]:
    """Greedy forward correlation-based feature selection.

    Starts empty and adds the feature that most improves the merit, stopping
    when no addition strictly improves it.  Ties prefer the lower column
    index.  An all-constant dataset yields an empty selection with a warning.
    """
    if dataset.n < 3:
        raise InputError("CFS needs at least 3 rows")
    X, y = dataset.features, dataset.target
    corr_fy = np.abs(_pearson_with_target(X, y))
    Xc = X - X.mean(axis=0)
    sx = np.sqrt((Xc**2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr_ff = np.abs((Xc.T @ Xc) / np.outer(sx, sx))
    corr_ff = np.where(np.isfinite(corr_ff), corr_ff, 0.0)
    np.fill_diagonal(corr_ff, 1.0)

    selected: list[int] = []
    merit = 0.0
    remaining = list(range(dataset.d))
    while remaining:
        candidates = [(cfs_merit(corr_fy, corr_ff, selected + [j]), j) for j in remaining]
        best_merit, best_j = max(candidates, key=lambda t: (t[0], -t[1]))
        if best_merit <= merit:
            break
        selected.append(best_j)
        remaining.remove(best_j)
        merit = best_merit
    if not selected:
        warnings.warn(
            "CFS selected no features (no feature correlates with the target)",
            ConstantColumnWarning,
            stacklevel=2,
        )
    return [dataset.feature_names[j] for j in selected]


def rrelieff_scores(
    dataset: Dataset,
    k_neighbors: int = 10,
    sample_size: int | None = None,
    seed: int = 0,
) -> ScoreVector:
    """RReliefF relevance estimate for a continuous target.

    For each sampled instance the k nearest neighbors (Euclidean distance on
    the scaled features, ties broken by row index) contribute
    rank-decay-weighted absolute differences to three accumulators: target
    difference N_dC, per-feature difference N_dA and their conjunction
    N_dC&dA.  The score is

        W[j] = N_dC&dA[j] / N_dC - (N_dA[j] - N_dC&dA[j]) / (m - N_dC)

    over m sampled instances.  Differences are absolute distances of
    [0, 1]-scaled values, so every contribution lies in [0, 1].
    """
    if k_neighbors < 1:
        raise InputError("k_neighbors must be >= 1")
    if dataset.n <= k_neighbors:
        raise InputError("RReliefF needs n > k_neighbors")
    scaled = _scaled(dataset, scale_target=True)
    X = scaled.features
    y = scaled.target
    n, d = X.shape

    if sample_size is None or sample_size >= n:
        instances = np.arange(n)
    else:
        if sample_size < 1:
            raise InputError("sample_size must be >= 1")
        rng = np.random.default_rng(check_seed(seed))
        instances = np.sort(rng.choice(n, size=sample_size, replace=False))
    m = instances.shape[0]

    ranks = np.arange(1, k_neighbors + 1)
    rank_w = np.exp(-((ranks / RELIEF_RANK_SCALE) ** 2))
    rank_w /= rank_w.sum()

    sq_norms = (X * X).sum(axis=1)
    n_dc = 0.0
    n_da = np.zeros(d)
    n_dcda = np.zeros(d)
    step = _block_rows(n)
    for start in range(0, m, step):
        chunk = instances[start : start + step]
        D = sq_norms[chunk, None] - 2.0 * (X[chunk] @ X.T) + sq_norms[None, :]
        D[np.arange(chunk.shape[0]), chunk] = np.inf  # exclude self
        # stable argsort keeps ascending-index order among tied distances
        neighbors = np.argsort(D, axis=1, kind="stable")[:, :k_neighbors]
        for b, i in enumerate(chunk):
            nb = neighbors[b]
            dy = np.abs(y[i] - y[nb])
            da = np.abs(X[i] - X[nb])  # (k, d)
            n_dc += float(rank_w @ dy)
            n_da += rank_w @ da
            n_dcda += (rank_w * dy) @ da
    if n_dc <= 0.0 or n_dc >= m:
        warnings.warn(
            "degenerate target differences; RReliefF scores set to 0",
            ConstantColumnWarning,
            stacklevel=2,
        )
        scores = np.zeros(d)
    else:
        scores = n_dcda / n_dc - (n_da - n_dcda) / (m - n_dc)
    return ScoreVector(
        method="rrelieff", scores=scores, feature_names=dataset.feature_names
    )


def top_k(scores: ScoreVector, k: int) -> list[str]:
    """The k highest-scoring features, ties broken by ascending column index."""
    d = scores.scores.shape[0]
    if k < 1:
        raise InputError("k must be >= 1")
    if k > d:
        raise InputError(f"k={k} exceeds the number of features ({d})")
    order = np.argsort(-scores.scores, kind="stable")
    return [scores.feature_names[j] for j in order[:k]]
