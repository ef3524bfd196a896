"""Shared scene builders: seven waveform families standing in for the gym motions."""
from __future__ import annotations

import math

import numpy as np
import pytest

from motionfi import (
    CarrierConfig,
    Envelope,
    FilterSpec,
    IqTrace,
    LinkBudget,
    Scatterer,
    Scene,
    energy,
    lowpass,
    scattered_power,
    synth_trace,
)

PROFILE_POINTS = 256


def _grid() -> np.ndarray:
    return np.arange(PROFILE_POINTS) / PROFILE_POINTS


# One displacement cycle per motion family, normalized to [0, 1]. The squat
# profile starts mid-slope, which anchors the segmentation phase on clean
# periodic signals.
SHAPE_FNS = {
    "SQ": lambda p: 0.5 * (1 - np.cos(2 * np.pi * ((p + 0.15) % 1.0))),
    "PU": lambda p: np.sin(np.pi * p**1.5) ** 2,
    "SU": lambda p: 0.65 * np.sin(np.pi * p) ** 2 + 0.35 * np.sin(2 * np.pi * p + 0.6) ** 2,
    "LR": lambda p: np.sin(np.pi * p),
    "ST": lambda p: np.clip(4 * np.minimum(p, 1 - p), 0.0, 1.0),
    "SD": lambda p: np.exp(-0.5 * ((p - 0.35) / 0.16) ** 2),
    "DB": lambda p: 0.6 * np.sin(np.pi * p) ** 2 + 0.4 * np.sin(3 * np.pi * p) ** 2,
}

MOTION_LABELS = tuple(sorted(SHAPE_FNS))

DEFAULT_LINK = LinkBudget(p_tx=0.01, g_tx=1.0, g_tag=1.0, wavelength=0.15, d=1.0)


def shape_profile(label: str, amp: float) -> np.ndarray:
    return amp * SHAPE_FNS[label](_grid())


def build_scene(
    label: str = "SQ",
    n_cycles: int = 10,
    period: float = 1.0,
    jitter: float = 0.0,
    amp: float = 0.04,
    dyn: float = 0.35,
    snr_db: float | None = None,
    sample_rate: float = 100.0,
    seed: int = 0,
    extra_scatterers: tuple = (),
) -> Scene:
    """Single-scatterer scene with dynamic phasor amplitude ``dyn``.

    ``snr_db`` sets the per-component noise sigma relative to the dynamic
    phasor amplitude: sigma = dyn / 10**(snr_db / 20). None means noise-free.
    """
    link = DEFAULT_LINK
    base_amplitude = dyn / math.sqrt(scattered_power(link))
    scatterer = Scatterer(
        base_amplitude=base_amplitude,
        profile=shape_profile(label, amp),
        period=period,
        period_jitter=jitter,
    )
    sigma = 0.0 if snr_db is None else dyn / 10 ** (snr_db / 20)
    return Scene(
        link=link,
        carrier=CarrierConfig(sample_rate=sample_rate),
        scatterers=(scatterer,) + tuple(extra_scatterers),
        static_power=1.0,
        noise_sigma=sigma,
        n_cycles=n_cycles,
        rng_seed=seed,
        label=label,
    )


def scene_envelope(scene: Scene, spec: FilterSpec | None = None) -> tuple[IqTrace, Envelope]:
    """Synthesize a scene and run it through the envelope pipeline."""
    trace = synth_trace(scene)
    if spec is None:
        nyquist = trace.sample_rate / 2
        spec = FilterSpec(cutoff_hz=min(10.0, 0.8 * nyquist), taps=101)
    return trace, lowpass(energy(trace), spec)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
