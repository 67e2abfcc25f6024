"""Input validation helpers for estimators and array-consuming functions."""

import numpy as np
from sklearn.exceptions import NotFittedError


def as_float_array(x, name="X", ndim=None, allow_empty=True):
    """Coerce to a float64 ndarray and reject non-finite values."""
    arr = np.asarray(x, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_matrix(X, name="X", min_rows=1):
    X = as_float_array(X, name=name, ndim=2)
    if X.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {X.shape[0]}")
    return X


def check_binary_labels(y, name="y"):
    """Return (y, classes) where classes are the two sorted unique labels."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional")
    classes = np.unique(y)
    if len(classes) != 2:
        raise ValueError(f"{name} must contain exactly two classes, got {len(classes)}")
    return y, classes


def check_consistent_rows(X, y):
    if X.shape[0] != len(y):
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} entries")


def check_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )
