"""Kernel regression with an anisotropic Gaussian kernel.

The regressor predicts a query point as the kernel-weighted average of the
training targets,

    yhat(x) = sum_i y_i K_i / sum_i K_i,
    log K_i = sum_j -(x_j - x_ij)^2 / (2 sigma_j^2),

with one bandwidth ``sigma_j`` per feature.  A large bandwidth flattens that
feature's kernel factor towards 1 for every training point, removing the
feature from the regression; a small bandwidth makes it highly
discriminative.

All weight sums are stabilized by shifting log-weights by their maximum (so
the largest weight is exactly 1 and the denominator can never underflow) and
accumulated with compensated summation, which makes results independent of
training-row order to within a few ulps.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .data import Dataset
from .errors import InputError
from .validation import (
    check_bandwidths,
    check_feature_matrix,
    check_point,
    check_target_vector,
)

# Pairwise blocks are sized to hold roughly this many float64 entries.
_BLOCK_ENTRIES = 4_000_000


def _block_rows(n_cols: int) -> int:
    return max(1, _BLOCK_ENTRIES // max(1, n_cols))


def _neumaier_sum(terms: np.ndarray, axis: int = -1) -> np.ndarray:
    """Compensated (Neumaier) summation along one axis.

    Sequential along the reduction axis, vectorized across the rest; the
    result is accurate to a couple of ulps regardless of summand order.
    """
    terms = np.moveaxis(terms, axis, -1)
    total = np.zeros(terms.shape[:-1])
    comp = np.zeros_like(total)
    for k in range(terms.shape[-1]):
        x = terms[..., k]
        t = total + x
        comp += np.where(np.abs(total) >= np.abs(x), (total - t) + x, (x - t) + total)
        total = t
    return total + comp


def log_kernel(query, center, sigma) -> float:
    """Log of the anisotropic Gaussian kernel between two points.

    Returns ``sum_j -(query_j - center_j)^2 / (2 sigma_j^2)``, which is
    always <= 0; the kernel weight itself is ``exp`` of this value.
    """
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    c = check_point(center, q.shape[0], name="center")
    s = check_bandwidths(sigma, q.shape[0])
    q = check_point(q, q.shape[0])
    return float(_neumaier_sum(-((q - c) ** 2) / (2.0 * s**2)))


def _log_weights_block(Q: np.ndarray, X: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """(m, n) matrix of log kernel weights, computed from exact differences."""
    diff = Q[:, None, :] - X[None, :, :]
    return _neumaier_sum(-(diff * diff) / (2.0 * sigma**2), axis=-1)


def _weighted_average(Q: np.ndarray, X: np.ndarray, y: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Stabilized Nadaraya-Watson average of ``y`` at each row of ``Q``."""
    m = Q.shape[0]
    out = np.empty(m)
    step = _block_rows(X.shape[0] * X.shape[1])
    for start in range(0, m, step):
        block = slice(start, min(start + step, m))
        lw = _log_weights_block(Q[block], X, sigma)
        lw -= lw.max(axis=1, keepdims=True)
        w = np.exp(lw)
        num = _neumaier_sum(w * y, axis=1)
        den = _neumaier_sum(w, axis=1)
        out[block] = num / den
    # The average is a convex combination of the targets; clipping only
    # removes the final ulp of rounding.
    return np.clip(out, y.min(), y.max())


def predict(train: Dataset, sigma, query) -> float:
    """GRNN prediction at a single query point.

    The result always lies in ``[min(y), max(y)]``; stabilization guarantees
    the total weight cannot underflow even for extreme bandwidths.
    """
    s = check_bandwidths(sigma, train.d)
    q = check_point(query, train.d)
    return float(_weighted_average(q[None, :], train.features, train.target, s)[0])


def predict_batch(train: Dataset, sigma, queries) -> np.ndarray:
    """GRNN predictions for each row of ``queries``; empty input is allowed."""
    s = check_bandwidths(sigma, train.d)
    Q = np.asarray(queries, dtype=np.float64)
    if Q.size == 0:
        return np.empty(0)
    Q = check_feature_matrix(Q, name="queries")
    if Q.shape[1] != train.d:
        raise InputError(f"queries have {Q.shape[1]} columns, expected {train.d}")
    return _weighted_average(Q, train.features, train.target, s)


class GRNNRegressor(RegressorMixin, BaseEstimator):
    """General regression neural network with per-feature Gaussian bandwidths.

    A memory-based estimator: ``fit`` stores the training data and ``predict``
    returns the stabilized kernel-weighted average of the training targets.

    Parameters
    ----------
    sigma : float or array-like of shape (n_features,), default=1.0
        Kernel bandwidth per feature; a scalar gives the isotropic kernel.
    """

    def __init__(self, sigma=1.0):
        self.sigma = sigma

    def fit(self, X, y):
        X = check_feature_matrix(X, min_rows=1)
        y = check_target_vector(y, X.shape[0])
        self.sigma_ = check_bandwidths(self.sigma, X.shape[1])
        self.X_ = X
        self.y_ = y
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "X_"):
            raise InputError("GRNNRegressor.predict called before fit")
        X = check_feature_matrix(X, min_rows=1)
        if X.shape[1] != self.n_features_in_:
            raise InputError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return _weighted_average(X, self.X_, self.y_, self.sigma_)
