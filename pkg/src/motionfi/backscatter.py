"""Backscatter scene model and I/Q trace synthesis.

A scene describes a tag/transceiver link and a set of periodically moving
point scatterers. Synthesis produces a complex baseband channel

    h(t) = sqrt(static_power) + sum_j a_j * exp(-2j*pi*d_j(t) / wavelength)

sampled at the configured rate, with independent white Gaussian noise on
the I and Q components. The receiver is assumed perfectly tuned to the
lower shifted tone, so no carrier mixing is simulated per sample; the
tag's square-wave switching is summarized by its first harmonic (see
``square_wave_harmonics`` for the harmonic levels that justify this).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SceneError
from .validation import as_float_array


def reflection_coefficient(z_a: complex, z_c: complex) -> complex:
    """Conjugate reflection coefficient of a tag circuit against its antenna.

    Args:
        z_a: complex antenna impedance (ohms).
        z_c: complex tag circuit impedance (ohms).

    Returns:
        (conj(z_a) - z_c) / (z_a + z_c). Magnitude is at most 1 when both
        impedances have nonnegative real parts.
    """
    denom = complex(z_a) + complex(z_c)
    if denom == 0:
        raise SceneError(f"degenerate impedance pair: z_a + z_c == 0 (z_a={z_a}, z_c={z_c})")
    return (np.conj(complex(z_a)) - complex(z_c)) / denom


def differential_rcs(wavelength: float, g_tag: float, gamma1: complex, gamma2: complex) -> float:
    """Differential radar cross-section between two tag switch states (m^2)."""
    if wavelength <= 0:
        raise SceneError(f"wavelength must be positive, got {wavelength!r}")
    return wavelength**2 / (4.0 * math.pi) * g_tag**2 * abs(gamma1 - gamma2)


def scattered_power_given_rcs(p_tx: float, g_tx: float, delta_rcs: float, d: float) -> float:
    """Power scattered by the tag for an explicit differential RCS (W)."""
    if d <= 0:
        raise SceneError(f"transmitter-to-tag distance must be positive, got {d!r}")
    return p_tx * g_tx * delta_rcs / (4.0 * math.pi * d**2)


@dataclass(frozen=True)
class LinkBudget:
    """Transmitter/tag link parameters.

    Attributes:
        p_tx: transmit power (W).
        g_tx: transmitter antenna gain (dimensionless).
        g_tag: tag antenna gain (dimensionless).
        wavelength: carrier wavelength (m).
        d: transmitter-to-tag distance (m).
        z_a: complex antenna impedance (ohms).
        z_c1, z_c2: complex tag circuit impedances for the two switch states.
    """

    p_tx: float
    g_tx: float
    g_tag: float
    wavelength: float
    d: float
    z_a: complex = 50 + 0j
    z_c1: complex = 0 + 0j
    z_c2: complex = 1e9 + 0j

    def __post_init__(self):
        if self.p_tx <= 0:
            raise SceneError(f"p_tx must be positive, got {self.p_tx!r}")
        if self.d <= 0:
            raise SceneError(f"d must be positive, got {self.d!r}")
        if self.wavelength <= 0:
            raise SceneError(f"wavelength must be positive, got {self.wavelength!r}")
        for name in ("z_a", "z_c1", "z_c2"):
            z = complex(getattr(self, name))
            if z.real < 0:
                raise SceneError(f"{name} must have nonnegative real part, got {z!r}")


def scattered_power(link: LinkBudget) -> float:
    """Tag scattered power from the full link budget (W)."""
    gamma1 = reflection_coefficient(link.z_a, link.z_c1)
    gamma2 = reflection_coefficient(link.z_a, link.z_c2)
    drcs = differential_rcs(link.wavelength, link.g_tag, gamma1, gamma2)
    return scattered_power_given_rcs(link.p_tx, link.g_tx, drcs, link.d)


def square_wave_harmonics(delta_f: float, n: int) -> list[tuple[float, float]]:
    """First ``n`` odd harmonics of a unit square wave at ``delta_f``.

    Returns (frequency, amplitude) pairs: frequency (2k-1)*delta_f with
    amplitude (4/pi)/(2k-1). Amplitudes are strictly decreasing; only odd
    multiples of the switching frequency appear.
    """
    if n < 1:
        raise SceneError(f"harmonic count must be >= 1, got {n!r}")
    if delta_f <= 0:
        raise SceneError(f"delta_f must be positive, got {delta_f!r}")
    return [((2 * k - 1) * delta_f, 4.0 / (math.pi * (2 * k - 1))) for k in range(1, n + 1)]


@dataclass(frozen=True)
class CarrierConfig:
    """Carrier and sampling configuration.

    Attributes:
        f_c: carrier frequency (Hz).
        delta_f: tag switching frequency (Hz), below the carrier.
        sample_rate: baseband samples per second (Hz).
    """

    f_c: float = 2.0e9
    delta_f: float = 200e3
    sample_rate: float = 100.0

    def __post_init__(self):
        if not 0 < self.delta_f < self.f_c:
            raise SceneError(f"need 0 < delta_f < f_c, got delta_f={self.delta_f!r}, f_c={self.f_c!r}")
        if self.sample_rate <= 0:
            raise SceneError(f"sample_rate must be positive, got {self.sample_rate!r}")


@dataclass(frozen=True)
class Scatterer:
    """A moving point reflector with a periodic displacement profile.

    ``profile`` holds one cycle of displacement samples (m) at uniform
    phase spacing; the cycle is repeated ``n_cycles`` times with per-cycle
    durations drawn around ``period`` with relative standard deviation
    ``period_jitter``. ``base_amplitude`` is the complex reflection
    coefficient of the scatterer; during synthesis it is scaled by the
    square root of the link's scattered power.
    """

    base_amplitude: complex
    profile: np.ndarray
    period: float
    period_jitter: float = 0.0

    def __post_init__(self):
        profile = as_float_array(self.profile, "profile", min_len=2)
        profile.setflags(write=False)
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "base_amplitude", complex(self.base_amplitude))
        if self.period <= 0:
            raise SceneError(f"period must be positive, got {self.period!r}")
        if self.period_jitter < 0:
            raise SceneError(f"period_jitter must be nonnegative, got {self.period_jitter!r}")


@dataclass(frozen=True)
class Scene:
    """Declarative description of one simulated recording."""

    link: LinkBudget
    carrier: CarrierConfig
    scatterers: tuple[Scatterer, ...]
    static_power: float = 1.0
    noise_sigma: float = 0.0
    n_cycles: int = 0
    rng_seed: int = 0
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        if self.static_power < 0:
            raise SceneError(f"static_power must be nonnegative, got {self.static_power!r}")
        if self.noise_sigma < 0:
            raise SceneError(f"noise_sigma must be nonnegative, got {self.noise_sigma!r}")
        if self.n_cycles < 0:
            raise SceneError(f"n_cycles must be nonnegative, got {self.n_cycles!r}")


@dataclass(frozen=True)
class GroundTruth:
    """Cycle-level ground truth attached to a synthesized trace."""

    n_cycles: int
    cycle_bounds: tuple[tuple[int, int], ...]
    label: str | None = None


@dataclass(frozen=True)
class IqTrace:
    """Uniformly sampled complex baseband recording."""

    sample_rate: float
    i_samples: np.ndarray
    q_samples: np.ndarray
    ground_truth: GroundTruth | None = None

    def __post_init__(self):
        i = as_float_array(self.i_samples, "i_samples")
        q = as_float_array(self.q_samples, "q_samples")
        if i.shape != q.shape:
            raise SceneError(f"i_samples and q_samples differ in length: {i.shape[0]} vs {q.shape[0]}")
        if self.sample_rate <= 0:
            raise SceneError(f"sample_rate must be positive, got {self.sample_rate!r}")
        i.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "i_samples", i)
        object.__setattr__(self, "q_samples", q)

    def __len__(self) -> int:
        return self.i_samples.shape[0]


def _cycle_durations(scatterer: Scatterer, n_cycles: int, rng: np.random.Generator) -> np.ndarray:
    """Per-cycle durations: nominal period scaled by max(0.1, 1 + jitter * g)."""
    g = rng.standard_normal(n_cycles)
    return scatterer.period * np.maximum(0.1, 1.0 + scatterer.period_jitter * g)


def _displacement(scatterer: Scatterer, edges: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Displacement time series: the one-cycle profile repeated over ``edges``.

    Within cycle k the profile is resampled to the realized duration by
    periodic linear interpolation; after the last cycle the scatterer rests
    at the profile start.
    """
    n_cycles = edges.shape[0] - 1
    if n_cycles <= 0:
        return np.full(t.shape, scatterer.profile[0])
    idx = np.searchsorted(edges, t, side="right") - 1
    idx = np.clip(idx, 0, n_cycles - 1)
    durations = edges[idx + 1] - edges[idx]
    phase = np.clip((t - edges[idx]) / durations, 0.0, 1.0)
    phase[t >= edges[-1]] = 0.0
    profile = scatterer.profile
    npts = profile.shape[0]
    pos = phase * npts
    i0 = np.minimum(pos.astype(np.int64), npts - 1)
    frac = pos - i0
    i1 = (i0 + 1) % npts
    return profile[i0] * (1.0 - frac) + profile[i1] * frac


def synth_trace(scene: Scene, duration: float | None = None) -> IqTrace:
    """Synthesize an I/Q trace for ``scene``.

    Args:
        scene: scene description; ``scene.rng_seed`` makes the result
            bit-reproducible.
        duration: trace length in seconds. ``None`` ends the trace exactly
            at the last realized cycle boundary of the first scatterer.

    Returns:
        IqTrace with ground truth cycle boundaries taken from the first
        scatterer (the labeled motion); additional scatterers model other
        limbs or interferers.
    """
    fs = scene.carrier.sample_rate
    if duration is not None and scene.scatterers and scene.n_cycles > 0:
        shortest = min(s.period for s in scene.scatterers)
        if duration < scene.n_cycles * shortest:
            raise SceneError(
                f"duration {duration!r} s is too short for {scene.n_cycles} cycles "
                f"of shortest nominal period {shortest!r} s"
            )
    if duration is None and not scene.scatterers:
        raise SceneError("duration is required for a scene with no scatterers")
    if duration is None and scene.n_cycles == 0:
        raise SceneError("duration is required for a scene with n_cycles == 0")

    seq = np.random.SeedSequence(scene.rng_seed)
    children = seq.spawn(len(scene.scatterers) + 1)
    noise_rng = np.random.default_rng(children[-1])

    edges_per_scatterer = []
    for scatterer, child in zip(scene.scatterers, children):
        rng = np.random.default_rng(child)
        durations = _cycle_durations(scatterer, scene.n_cycles, rng)
        edges_per_scatterer.append(np.concatenate(([0.0], np.cumsum(durations))))

    if duration is None:
        duration = float(edges_per_scatterer[0][-1])
    n_samples = int(round(duration * fs))
    if n_samples < 1:
        raise SceneError(f"duration {duration!r} s yields no samples at {fs} Hz")
    t = np.arange(n_samples) / fs

    amp_scale = math.sqrt(scattered_power(scene.link))
    h = np.full(n_samples, math.sqrt(scene.static_power), dtype=np.complex128)
    for scatterer, edges in zip(scene.scatterers, edges_per_scatterer):
        d = _displacement(scatterer, edges, t)
        h += (scatterer.base_amplitude * amp_scale) * np.exp(
            -2j * math.pi * d / scene.link.wavelength
        )

    i = h.real.copy()
    q = h.imag.copy()
    if scene.noise_sigma > 0:
        i += scene.noise_sigma * noise_rng.standard_normal(n_samples)
        q += scene.noise_sigma * noise_rng.standard_normal(n_samples)

    if scene.scatterers and scene.n_cycles > 0:
        bounds = np.round(edges_per_scatterer[0] * fs).astype(int)
        pairs = tuple(
            (int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if b <= n_samples and b > a
        )
    else:
        pairs = ()
    truth = GroundTruth(n_cycles=len(pairs), cycle_bounds=pairs, label=scene.label)
    return IqTrace(sample_rate=fs, i_samples=i, q_samples=q, ground_truth=truth)
