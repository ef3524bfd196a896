"""Statistical features of a normalized motion segment.

Every segment is rescaled to [0, 1] before any moment is computed, so the
features are invariant to positive affine transforms of the raw envelope.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import normalize
from .errors import InputError
from .validation import as_float_array

FEATURE_NAMES = (
    "mean",
    "std",
    "maximum",
    "minimum",
    "q25",
    "q50",
    "q75",
    "skewness",
    "kurtosis",
    "energy_ratio",
)


@dataclass(frozen=True)
class FeatureVector:
    """The ten per-segment features, all computed on the normalized segment.

    ``std`` is the population standard deviation. ``skewness`` and
    ``kurtosis`` are the third and fourth standardized central moments
    (kurtosis is not excess kurtosis). ``energy_ratio`` is the sum of
    squared samples divided by the variance.
    """

    mean: float
    std: float
    maximum: float
    minimum: float
    q25: float
    q50: float
    q75: float
    skewness: float
    kurtosis: float
    energy_ratio: float

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (len(FEATURE_NAMES),):
            raise InputError(
                f"feature vector must have {len(FEATURE_NAMES)} entries, got shape {arr.shape}"
            )
        return cls(**{name: float(v) for name, v in zip(FEATURE_NAMES, arr)})


def extract_features(segment) -> FeatureVector:
    """Extract the ten features from one motion segment.

    The segment must contain at least 4 samples and must not be constant
    (a constant segment has zero variance, which poisons the standardized
    moments).
    """
    arr = as_float_array(segment, "segment", min_len=4)
    x = normalize(arr)
    mu = float(x.mean())
    centered = x - mu
    m2 = float((centered**2).mean())
    sigma = float(np.sqrt(m2))
    q25, q50, q75 = (float(v) for v in np.quantile(x, [0.25, 0.5, 0.75]))
    return FeatureVector(
        mean=mu,
        std=sigma,
        maximum=float(x.max()),
        minimum=float(x.min()),
        q25=q25,
        q50=q50,
        q75=q75,
        skewness=float((centered**3).mean()) / sigma**3,
        kurtosis=float((centered**4).mean()) / sigma**4,
        energy_ratio=float((x**2).sum()) / m2,
    )
