"""Small input-validation helpers used by the public entry points."""
from __future__ import annotations

import numpy as np

from .errors import DataError, InputError


def as_float_array(x, name: str, min_len: int = 1, require_finite: bool = True) -> np.ndarray:
    """Coerce ``x`` to a contiguous 1-D float64 array and validate it."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.shape[0] < min_len:
        raise InputError(f"{name} must have at least {min_len} samples, got {arr.shape[0]}")
    if require_finite and not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def as_feature_matrix(x, name: str = "features") -> np.ndarray:
    """Coerce to a 2-D float64 matrix of feature rows."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def check_positive(value: float, name: str) -> float:
    if not value > 0:
        raise InputError(f"{name} must be positive, got {value!r}")
    return value


def check_nonnegative(value: float, name: str) -> float:
    if value < 0:
        raise InputError(f"{name} must be nonnegative, got {value!r}")
    return value
