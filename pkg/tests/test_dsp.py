"""Envelope extraction, low-pass filtering, normalization, spline warping."""
import math

import numpy as np
import pytest

from motionfi import (
    DegenerateRangeError,
    Envelope,
    FilterSpec,
    FilterSpecError,
    InputError,
    IqTrace,
    design_lowpass,
    energy,
    lowpass,
    normalize,
    synth_trace,
    warp_spline,
)
from conftest import build_scene


def _trace(i, q, fs=100.0):
    return IqTrace(sample_rate=fs, i_samples=np.asarray(i, float), q_samples=np.asarray(q, float))


class TestEnergy:
    def test_three_four_five(self):
        env = energy(_trace([3.0, 0.0, 1.0], [4.0, 0.0, 1.0]))
        assert env.samples == pytest.approx([5.0, 0.0, math.sqrt(2)])
        assert env.provenance == "raw"
        assert env.sample_rate == 100.0

    def test_scale_equivariance(self, rng):
        i = rng.standard_normal(64)
        q = rng.standard_normal(64)
        base = energy(_trace(i, q)).samples
        scaled = energy(_trace(3.5 * i, 3.5 * q)).samples
        assert np.allclose(scaled, 3.5 * base, rtol=1e-12)


def _two_pass_response(spec: FilterSpec, sample_rate: float, freq: float) -> float:
    """Magnitude response (linear) of the forward-backward filter at ``freq``."""
    taps = design_lowpass(spec, sample_rate)
    n = np.arange(taps.size)
    single = abs(np.sum(taps * np.exp(-2j * np.pi * freq * n / sample_rate)))
    return single**2


class TestLowpass:
    def test_constant_passthrough(self):
        env = Envelope(sample_rate=100.0, samples=np.full(300, 2.5))
        out = lowpass(env, FilterSpec(cutoff_hz=10.0, taps=101))
        assert out.provenance == "filtered"
        assert len(out) == 300
        assert np.allclose(out.samples, 2.5, atol=1e-9)

    def test_offset_commutes(self, rng):
        x = rng.standard_normal(400)
        spec = FilterSpec(cutoff_hz=8.0, taps=61)
        a = lowpass(Envelope(100.0, x + 7.0), spec).samples
        b = lowpass(Envelope(100.0, x), spec).samples + 7.0
        assert np.allclose(a, b, atol=1e-6)

    def test_stopband_tone_attenuated(self):
        fs, cutoff = 100.0, 10.0
        spec = FilterSpec(cutoff_hz=cutoff, taps=101)
        t = np.arange(4000) / fs
        tone = np.sin(2 * np.pi * 4 * cutoff * t)
        out = lowpass(Envelope(fs, tone), spec).samples
        mid = slice(500, 3500)
        measured = np.sqrt(np.mean(out[mid] ** 2)) / np.sqrt(np.mean(tone[mid] ** 2))
        oracle = _two_pass_response(spec, fs, 4 * cutoff)
        assert 20 * math.log10(oracle) <= -40.0
        assert 20 * math.log10(measured + 1e-300) <= -40.0

    def test_passband_tone_preserved(self):
        fs, cutoff = 100.0, 10.0
        spec = FilterSpec(cutoff_hz=cutoff, taps=101)
        t = np.arange(4000) / fs
        tone = np.sin(2 * np.pi * (cutoff / 10) * t)
        out = lowpass(Envelope(fs, tone), spec).samples
        mid = slice(500, 3500)
        measured = np.sqrt(np.mean(out[mid] ** 2)) / np.sqrt(np.mean(tone[mid] ** 2))
        oracle = _two_pass_response(spec, fs, cutoff / 10)
        assert abs(20 * math.log10(oracle)) <= 0.5
        assert abs(20 * math.log10(measured)) <= 0.5

    def test_cutoff_at_nyquist_rejected(self):
        env = Envelope(sample_rate=100.0, samples=np.zeros(200))
        with pytest.raises(FilterSpecError):
            lowpass(env, FilterSpec(cutoff_hz=50.0, taps=11))

    def test_even_taps_rejected(self):
        with pytest.raises(FilterSpecError):
            FilterSpec(cutoff_hz=10.0, taps=100)

    def test_signal_shorter_than_pad_rejected(self):
        env = Envelope(sample_rate=100.0, samples=np.zeros(10))
        with pytest.raises(FilterSpecError):
            lowpass(env, FilterSpec(cutoff_hz=10.0, taps=101))


class TestNormalize:
    def test_basic(self):
        assert normalize([1, 2, 3]) == pytest.approx([0.0, 0.5, 1.0])
        assert normalize([-5, 5]) == pytest.approx([0.0, 1.0])

    def test_affine_invariance(self, rng):
        x = rng.standard_normal(50)
        assert np.allclose(normalize(3.7 * x + 11.0), normalize(x), atol=1e-12)

    def test_idempotent(self, rng):
        x = rng.uniform(-4, 9, size=40)
        once = normalize(x)
        assert np.array_equal(normalize(once), once)

    def test_constant_rejected(self):
        with pytest.raises(DegenerateRangeError):
            normalize([2.0, 2.0, 2.0])

    def test_output_range(self, rng):
        y = normalize(rng.standard_normal(100))
        assert y.min() == 0.0
        assert y.max() == 1.0


class TestWarpSpline:
    def test_identity_at_knots(self, rng):
        s = rng.standard_normal(17)
        assert np.allclose(warp_spline(s, 17), s, atol=1e-12)

    def test_linear_data_stays_linear(self):
        out = warp_spline([0.0, 1.0, 2.0, 3.0], 7)
        assert np.allclose(out, [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0], atol=1e-9)

    def test_endpoints_exact(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 30))
            m = int(rng.integers(2, 50))
            s = rng.standard_normal(n)
            out = warp_spline(s, m)
            assert out[0] == s[0]
            assert out[-1] == s[-1]
            assert out.shape == (m,)

    def test_round_trip_on_smooth_signal(self):
        t = np.linspace(0, 1, 40)
        s = np.sin(2 * np.pi * t) + 0.3 * np.cos(6 * np.pi * t)
        back = warp_spline(warp_spline(s, 80), 40)
        scale = np.abs(s).max()
        assert np.max(np.abs(back - s)) <= 1e-3 * scale

    def test_too_short_rejected(self):
        with pytest.raises(InputError):
            warp_spline([1.0], 5)
        with pytest.raises(InputError):
            warp_spline([1.0, 2.0], 1)


class TestEnvelopeRecovery:
    def test_filtered_envelope_matches_analytic_phasor(self):
        # noise-free single scatterer: energy + lowpass recovers the
        # analytic |static + dynamic| within 2% RMS
        scene = build_scene(label="SQ", n_cycles=8, period=1.0, jitter=0.0, amp=0.04)
        trace = synth_trace(scene)
        filtered = lowpass(energy(trace), FilterSpec(cutoff_hz=10.0, taps=101))

        noise_free = np.hypot(trace.i_samples, trace.q_samples)
        err = filtered.samples - noise_free
        rel_rms = np.sqrt(np.mean(err**2)) / np.sqrt(np.mean(noise_free**2))
        assert rel_rms <= 0.02
