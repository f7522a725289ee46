"""Input validation helpers shared by the estimator layer."""

from __future__ import annotations

import numpy as np


def check_complex_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    X = X.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} must contain only finite values")
    return X


def check_complex_vector(y, length: int | None = None, name: str = "y") -> np.ndarray:
    """Coerce to a finite 1-D complex128 array, optionally of fixed length."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {y.shape}")
    y = y.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(y)):
        raise ValueError(f"{name} must contain only finite values")
    if length is not None and y.size != length:
        raise ValueError(f"{name} must have length {length}, got {y.size}")
    return y


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
