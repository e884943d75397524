"""Leave-one-out loss of the anisotropic GRNN and its analytic gradient.

The bandwidth-selection criterion is the mean squared error of the
leave-one-out predictions on the training set,

    loss(sigma) = (1/n) sum_i (y_i - yhat_{-i}(x_i))^2,

where ``yhat_{-i}`` is the kernel-weighted average over all training points
except i.  The gradient is taken with respect to ``theta_j = log sigma_j`` so
an unconstrained optimizer keeps every bandwidth strictly positive.

Writing ``p_ik`` for the self-excluded normalized kernel weights and
``D2_ikj = (x_ij - x_kj)^2``, the chain rule through the weighted average
gives

    d loss / d theta_j
        = (2/n) sum_i r_i * sum_k p_ik D2_ikj (y_k - yhat_{-i}) / sigma_j^2,

with residuals ``r_i = yhat_{-i} - y_i``.  The inner sums expand into matrix
products of the weight matrix with feature moments, so one evaluation costs a
handful of GEMMs on (n, n) blocks instead of an explicit n x n x d sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import InputError, NumericalError
from .grnn import _block_rows, _neumaier_sum, _log_weights_block
from .validation import check_bandwidths, check_feature_matrix, check_target_vector


@dataclass(frozen=True)
class LossReport:
    """Loss value, gradient in log-bandwidth space, and evaluation count."""

    loss: float
    gradient: np.ndarray
    evaluations: int


class LeaveOneOutObjective:
    """Callable (loss, gradient) objective over log-bandwidths.

    Instances precompute the feature moments reused by every evaluation and
    count how often they are called.  ``__call__`` never raises on numerical
    overflow: a non-finite loss is returned as ``inf`` so a line search can
    reject the trial point; use :func:`loo_loss_grad` for the checked variant.
    """

    def __init__(self, features, target):
        X = check_feature_matrix(features, min_rows=2, name="features")
        y = check_target_vector(target, X.shape[0], name="target")
        self.X = X
        self.y = y
        self.n, self.d = X.shape
        X2 = X * X
        # Columns: [X, X^2, X*y, X^2*y]; one GEMM against the weight matrix
        # yields all moments the gradient needs.
        self._Z = np.hstack([X, X2, X * y[:, None], X2 * y[:, None]])
        self._X2 = X2
        self.evaluations = 0

    def __call__(self, theta) -> tuple[float, np.ndarray]:
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        if theta.shape[0] != self.d:
            raise InputError(f"theta has length {theta.shape[0]}, expected {self.d}")
        self.evaluations += 1

        X, y, n, d = self.X, self.y, self.n, self.d
        grad = np.zeros(d)
        sq_err = 0.0
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            alpha = 0.5 * np.exp(-2.0 * theta)  # 1 / (2 sigma_j^2)
            if not np.isfinite(alpha).all():
                return np.inf, grad
            u = self._X2 @ alpha
            Xa = X * alpha
            step = _block_rows(n)
            for start in range(0, n, step):
                stop = min(start + step, n)
                rows = slice(start, stop)
                # log weights via the expanded squared distance
                L = Xa[rows] @ X.T
                L *= 2.0
                L -= u[rows, None]
                L -= u[None, :]
                idx = np.arange(start, stop)
                L[idx - start, idx] = -np.inf  # exclude the held-out point
                L -= L.max(axis=1, keepdims=True)
                W = np.exp(L)
                W /= W.sum(axis=1, keepdims=True)
                yhat = W @ y
                r = yhat - y[rows]
                M = W @ self._Z
                G1, G2 = M[:, :d], M[:, d : 2 * d]
                H1, H2 = M[:, 2 * d : 3 * d], M[:, 3 * d :]
                # sum_k p_ik D2_ikj (y_k - yhat_i); the x_ij^2 terms cancel
                T = (H2 - yhat[:, None] * G2) - 2.0 * X[rows] * (H1 - yhat[:, None] * G1)
                grad += r @ T
                sq_err += float(r @ r)
            grad *= (2.0 / n) * (2.0 * alpha)
            loss = sq_err / n
        if not np.isfinite(loss):
            return np.inf, np.zeros(d)
        return loss, grad


def loo_loss(train: Dataset, sigma) -> float:
    """Leave-one-out mean squared error at the given bandwidths.

    Computed from exact pairwise differences with stabilized, compensated
    weight sums; serves as the reference path for the faster gradient
    evaluation in :class:`LeaveOneOutObjective`.
    """
    if train.n < 2:
        raise InputError("leave-one-out loss needs at least 2 rows")
    s = check_bandwidths(sigma, train.d)
    X, y = train.features, train.target
    n = train.n
    resid = np.empty(n)
    step = _block_rows(n * train.d)
    for start in range(0, n, step):
        stop = min(start + step, n)
        lw = _log_weights_block(X[start:stop], X, s)
        idx = np.arange(start, stop)
        lw[idx - start, idx] = -np.inf
        lw -= lw.max(axis=1, keepdims=True)
        w = np.exp(lw)
        num = _neumaier_sum(w * y, axis=1)
        den = _neumaier_sum(w, axis=1)
        resid[start:stop] = num / den - y[start:stop]
    return float(_neumaier_sum(resid * resid)) / n


def loo_loss_grad(train: Dataset, log_sigma) -> LossReport:
    """Loss and exact gradient with respect to each log-bandwidth.

    Raises :class:`NumericalError` naming the offending component if the
    evaluation produces a non-finite value.
    """
    if train.n < 2:
        raise InputError("leave-one-out loss needs at least 2 rows")
    theta = np.asarray(log_sigma, dtype=np.float64).reshape(-1)
    if theta.shape[0] != train.d:
        raise InputError(f"log_sigma has length {theta.shape[0]}, expected {train.d}")
    if not np.isfinite(theta).all():
        raise InputError("log_sigma contains non-finite values")
    objective = LeaveOneOutObjective(train.features, train.target)
    loss, grad = objective(theta)
    if not np.isfinite(loss):
        raise NumericalError(f"leave-one-out loss is non-finite at log_sigma={theta!r}")
    bad = np.flatnonzero(~np.isfinite(grad))
    if bad.size:
        raise NumericalError(
            f"gradient component {bad[0]} (feature "
            f"{train.feature_names[bad[0]]!r}) is non-finite"
        )
    return LossReport(loss=loss, gradient=grad, evaluations=objective.evaluations)
