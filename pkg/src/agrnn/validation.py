"""Input validation helpers used by the estimators and the functional API."""

from __future__ import annotations

import numpy as np

from .errors import InputError


def check_feature_matrix(X, *, min_rows: int = 1, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to a finite float64 2-D array with at least ``min_rows`` rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got ndim={X.ndim}")
    if X.shape[0] < min_rows:
        raise InputError(f"{name} needs at least {min_rows} rows, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise InputError(f"{name} needs at least one column")
    if not np.isfinite(X).all():
        raise InputError(f"{name} contains non-finite values")
    return X


def check_target_vector(y, n_rows: int, *, name: str = "y") -> np.ndarray:
    """Coerce ``y`` to a finite float64 1-D array of length ``n_rows``."""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != n_rows:
        raise InputError(f"{name} has length {y.shape[0]}, expected {n_rows}")
    if not np.isfinite(y).all():
        raise InputError(f"{name} contains non-finite values")
    return y


def check_bandwidths(sigma, n_features: int, *, name: str = "sigma") -> np.ndarray:
    """Validate kernel bandwidths: strictly positive, finite, one per feature.

    A scalar is broadcast to all features (the isotropic case).
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim == 0:
        sigma = np.full(n_features, float(sigma))
    sigma = sigma.reshape(-1)
    if sigma.shape[0] != n_features:
        raise InputError(
            f"{name} has length {sigma.shape[0]}, expected {n_features}"
        )
    if not np.isfinite(sigma).all() or (sigma <= 0.0).any():
        raise InputError(f"{name} entries must be strictly positive and finite")
    return sigma


def check_point(x, n_features: int, *, name: str = "query") -> np.ndarray:
    """Coerce a single d-dimensional point to a finite float64 vector."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != n_features:
        raise InputError(f"{name} has dimension {x.shape[0]}, expected {n_features}")
    if not np.isfinite(x).all():
        raise InputError(f"{name} contains non-finite values")
    return x


def check_seed(seed) -> int:
    """Validate a 64-bit unsigned seed."""
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise InputError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed
