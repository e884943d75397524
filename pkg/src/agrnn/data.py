"""Dataset container and [0, 1] min-max feature scaling.

A :class:`Dataset` bundles the feature matrix, the target vector and the
feature names, plus an optional :class:`ScalingRecord` describing the affine
map that brought each column into the unit interval.  Datasets are immutable:
the underlying arrays are marked read-only so they can be shared freely
between threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConstantColumnWarning, InputError
from .validation import check_feature_matrix, check_target_vector


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScalingRecord:
    """Per-column (min, max) pairs of the data before min-max scaling.

    Constant columns (max == min) are flagged and map to all zeros; the
    inverse map restores their constant value.
    """

    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float | None = None
    target_max: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "feature_min", _readonly(self.feature_min))
        object.__setattr__(self, "feature_max", _readonly(self.feature_max))
        if (self.feature_max < self.feature_min).any():
            raise InputError("scaling record has max < min")
        if self.target_min is not None and self.target_max is not None:
            if self.target_max < self.target_min:
                raise InputError("scaling record has target max < target min")

    @property
    def constant_mask(self) -> np.ndarray:
        """Boolean mask of columns that were constant in the original data."""
        return self.feature_max == self.feature_min

    @property
    def scales_target(self) -> bool:
        return self.target_min is not None

    def apply(self, features: np.ndarray) -> np.ndarray:
        span = np.where(self.constant_mask, 1.0, self.feature_max - self.feature_min)
        out = (features - self.feature_min) / span
        return np.where(self.constant_mask, 0.0, out)

    def invert(self, features: np.ndarray) -> np.ndarray:
        span = self.feature_max - self.feature_min
        return np.where(self.constant_mask, self.feature_min, features * span + self.feature_min)

    def apply_target(self, target: np.ndarray) -> np.ndarray:
        if not self.scales_target:
            return target
        span = self.target_max - self.target_min
        if span == 0.0:
            return np.zeros_like(target)
        return (target - self.target_min) / span

    def invert_target(self, target: np.ndarray) -> np.ndarray:
        if not self.scales_target:
            return target
        span = self.target_max - self.target_min
        if span == 0.0:
            return np.full_like(target, self.target_min)
        return target * span + self.target_min


@dataclass(frozen=True)
class Dataset:
    """An n x d feature matrix with a length-n target vector.

    Invariants enforced at construction: finite entries, one distinct name
    per feature and, when a scaler is attached, feature values inside [0, 1].
    """

    features: np.ndarray
    target: np.ndarray
    feature_names: tuple[str, ...] = ()
    scaler: ScalingRecord | None = None
    target_name: str = "y"
    warnings_: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self):
        X = check_feature_matrix(self.features, name="features")
        y = check_target_vector(self.target, X.shape[0], name="target")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise InputError(
                f"got {len(names)} feature names for {X.shape[1]} columns"
            )
        if len(set(names)) != len(names):
            raise InputError("feature names must be distinct")
        if self.scaler is not None:
            if self.scaler.feature_min.shape[0] != X.shape[1]:
                raise InputError("scaling record does not match feature count")
            if X.min() < -1e-12 or X.max() > 1.0 + 1e-12:
                raise InputError("scaled features must lie in [0, 1]")
        object.__setattr__(self, "features", _readonly(X))
        object.__setattr__(self, "target", _readonly(y))
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "warnings_", tuple(self.warnings_))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise InputError(
                f"unknown feature {name!r}; available: {', '.join(self.feature_names)}"
            ) from None

    def with_features(self, features: np.ndarray, **kwargs) -> "Dataset":
        """Copy of this dataset with a replaced feature matrix."""
        return replace(self, features=features, **kwargs)


def min_max_scale(dataset: Dataset, scale_target: bool = False) -> Dataset:
    """Rescale each feature column affinely to [0, 1].

    Constant columns map to all zeros and raise a :class:`ConstantColumnWarning`.
    With ``scale_target`` the target is rescaled the same way.  The returned
    dataset carries the :class:`ScalingRecord` needed to invert the map.
    """
    if dataset.n < 2:
        raise InputError("min-max scaling needs at least 2 rows")
    X = dataset.features
    record = ScalingRecord(
        feature_min=X.min(axis=0),
        feature_max=X.max(axis=0),
        target_min=float(dataset.target.min()) if scale_target else None,
        target_max=float(dataset.target.max()) if scale_target else None,
    )
    notes = list(dataset.warnings_)
    if record.constant_mask.any():
        cols = [dataset.feature_names[j] for j in np.flatnonzero(record.constant_mask)]
        msg = f"constant feature column(s) mapped to zeros: {', '.join(cols)}"
        warnings.warn(msg, ConstantColumnWarning, stacklevel=2)
        notes.append(msg)
    return Dataset(
        features=record.apply(X),
        target=record.apply_target(dataset.target),
        feature_names=dataset.feature_names,
        scaler=record,
        target_name=dataset.target_name,
        warnings_=tuple(notes),
    )
