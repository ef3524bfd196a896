"""Per-segment feature extraction."""
import numpy as np
import pytest

from motionfi import (
    FEATURE_NAMES,
    DataError,
    DegenerateRangeError,
    FeatureVector,
    InputError,
    extract_features,
)


class TestExtractFeatures:
    def test_symmetric_ramp(self):
        fv = extract_features([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])
        assert fv.mean == pytest.approx(0.5)
        assert fv.minimum == 0.0
        assert fv.maximum == 1.0
        assert fv.q50 == pytest.approx(0.5)

    def test_symmetric_segment_zero_skew(self, rng):
        half = rng.uniform(0, 1, size=25)
        x = np.concatenate([half, -half])  # symmetric about the mean after normalization
        fv = extract_features(x)
        assert abs(fv.skewness) < 1e-9

    def test_uniform_grid_kurtosis(self):
        fv = extract_features([0.0, 0.25, 0.5, 0.75, 1.0])
        assert fv.kurtosis == pytest.approx(1.7, abs=1e-9)

    def test_affine_invariance(self, rng):
        x = rng.standard_normal(64)
        a = extract_features(x).to_array()
        b = extract_features(2.5 * x + 17.0).to_array()
        assert np.allclose(a, b, atol=1e-9)

    def test_quantiles_ordered_and_bounded(self, rng):
        for _ in range(30):
            fv = extract_features(rng.standard_normal(int(rng.integers(4, 200))))
            assert fv.q25 <= fv.q50 <= fv.q75
            assert fv.minimum == 0.0
            assert fv.maximum == 1.0

    def test_population_std(self):
        fv = extract_features([0.0, 0.0, 1.0, 1.0])
        assert fv.std == pytest.approx(0.5)

    def test_energy_ratio_definition(self, rng):
        x = rng.uniform(0, 5, size=32)
        fv = extract_features(x)
        norm = (x - x.min()) / (x.max() - x.min())
        var = norm.var()
        assert fv.energy_ratio == pytest.approx(np.sum(norm**2) / var, rel=1e-12)

    def test_constant_segment_rejected(self):
        with pytest.raises(DegenerateRangeError):
            extract_features([3.0, 3.0, 3.0, 3.0])

    def test_short_segment_rejected(self):
        with pytest.raises(InputError):
            extract_features([0.0, 1.0])

    def test_nan_rejected(self):
        with pytest.raises(DataError):
            extract_features([0.0, np.nan, 1.0, 2.0])


class TestFeatureVector:
    def test_array_round_trip(self, rng):
        fv = extract_features(rng.standard_normal(20))
        arr = fv.to_array()
        assert arr.shape == (10,)
        assert FeatureVector.from_array(arr) == fv

    def test_names_match_fields(self):
        assert len(FEATURE_NAMES) == 10
        fv = extract_features([0.0, 0.2, 0.9, 0.4])
        for name in FEATURE_NAMES:
            assert hasattr(fv, name)

    def test_wrong_width_rejected(self):
        with pytest.raises(InputError):
            FeatureVector.from_array(np.zeros(9))
