"""Envelope extraction, low-pass smoothing, and shared resampling primitives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import firwin

from .backscatter import IqTrace
from .errors import DegenerateRangeError, FilterSpecError, InputError
from .validation import as_float_array


@dataclass(frozen=True)
class Envelope:
    """Real-valued amplitude sequence at a fixed sample rate.

    ``provenance`` is "raw" for magnitudes straight out of ``energy`` and
    "filtered" once the low-pass smoother has been applied.
    """

    sample_rate: float
    samples: np.ndarray
    provenance: str = "raw"

    def __post_init__(self):
        samples = as_float_array(self.samples, "samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise InputError(f"sample_rate must be positive, got {self.sample_rate!r}")
        if self.provenance not in ("raw", "filtered"):
            raise InputError(f"provenance must be 'raw' or 'filtered', got {self.provenance!r}")

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class FilterSpec:
    """Windowed-sinc low-pass specification (Hamming window, odd tap count)."""

    cutoff_hz: float = 10.0
    taps: int = 101

    def __post_init__(self):
        if self.cutoff_hz <= 0:
            raise FilterSpecError(f"cutoff_hz must be positive, got {self.cutoff_hz!r}")
        if self.taps < 1 or self.taps % 2 == 0:
            raise FilterSpecError(f"taps must be a positive odd count, got {self.taps!r}")


def energy(trace: IqTrace) -> Envelope:
    """Instantaneous magnitude sqrt(I^2 + Q^2) of an I/Q trace."""
    return Envelope(
        sample_rate=trace.sample_rate,
        samples=np.hypot(trace.i_samples, trace.q_samples),
        provenance="raw",
    )


def design_lowpass(spec: FilterSpec, sample_rate: float) -> np.ndarray:
    """FIR taps for ``spec`` at ``sample_rate`` (unit DC gain)."""
    if spec.cutoff_hz >= sample_rate / 2:
        raise FilterSpecError(
            f"cutoff {spec.cutoff_hz!r} Hz must be below the Nyquist rate "
            f"{sample_rate / 2!r} Hz"
        )
    return firwin(spec.taps, spec.cutoff_hz, window="hamming", fs=sample_rate)


def _one_pass(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    pad = taps.shape[0] // 2
    padded = np.pad(x, pad, mode="reflect")
    return np.convolve(padded, taps, mode="valid")


def lowpass(env: Envelope, spec: FilterSpec) -> Envelope:
    """Zero-phase low-pass: forward and backward passes of the FIR filter.

    Each pass reflect-pads half the filter length at both ends so boundary
    transients do not corrupt the first and last motion cycles. Output
    length equals the input length and the DC gain is 1.
    """
    taps = design_lowpass(spec, env.sample_rate)
    pad = spec.taps // 2
    if len(env) <= pad:
        raise FilterSpecError(
            f"signal of {len(env)} samples is too short for a {spec.taps}-tap filter"
        )
    y = _one_pass(env.samples, taps)
    y = _one_pass(y[::-1], taps)[::-1]
    return Envelope(sample_rate=env.sample_rate, samples=y, provenance="filtered")


def normalize(x) -> np.ndarray:
    """Rescale a sequence to [0, 1]: min maps to 0 and max maps to 1."""
    arr = as_float_array(x, "sequence", min_len=2)
    lo = arr.min()
    hi = arr.max()
    if hi <= lo:
        raise DegenerateRangeError("cannot normalize a constant sequence (max == min)")
    return (arr - lo) / (hi - lo)


def warp_spline(s, m: int) -> np.ndarray:
    """Resample ``s`` to length ``m`` with a natural cubic spline.

    The spline passes through (k/(len(s)-1), s[k]) and is evaluated at m
    uniform abscissae on [0, 1]; the endpoints are preserved exactly.
    """
    arr = as_float_array(s, "sequence", min_len=2)
    if m < 2:
        raise InputError(f"target length must be >= 2, got {m!r}")
    knots = np.linspace(0.0, 1.0, arr.shape[0])
    spline = CubicSpline(knots, arr, bc_type="natural")
    out = spline(np.linspace(0.0, 1.0, m))
    out[0] = arr[0]
    out[-1] = arr[-1]
    return out
