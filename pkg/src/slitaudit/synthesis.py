"""Synthetic intensity traces on a line camera.

Two models live here.  The exact two-slit model samples the Fraunhofer
intensity at the physical angle of every pixel.  The window model is the
Fourier-envelope approximation ``F(x) * I0 * (1 + V cos(K x)) + I_DC``, with
``x = 2*pi*(i - center)/N`` so that the envelope spans one period across the
camera window and ``cos(K x)`` completes ``K`` cycles per window.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from slitaudit.geometry import ApparatusConfig, DomainError

ENVELOPES = ("raised-cosine", "extended", "exact-sinc2", "flat")

REFERENCE_POINTS = 10004
REFERENCE_STEP = 2e-4


@dataclass
class Trace:
    """Intensity samples along the pixel line.

    ``pixel_pitch`` is the sample spacing in physical units (metres for a
    camera, radians for the angular reference simulation).
    """

    samples: np.ndarray
    pixel_pitch: float = 7e-6
    center_pixel: float | None = None
    unit: str = "m"

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1:
            raise ValueError("trace samples must be one-dimensional")
        if len(self.samples) < 16:
            raise ValueError(f"trace needs at least 16 samples, got {len(self.samples)}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("trace samples must be finite")
        if np.any(self.samples < 0):
            raise ValueError("trace samples must be non-negative")
        if self.center_pixel is None:
            self.center_pixel = len(self.samples) / 2

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def pixel_index(self) -> np.ndarray:
        return np.arange(len(self.samples))

    def scaled(self, factor: float) -> "Trace":
        return Trace(self.samples * factor, self.pixel_pitch, self.center_pixel, self.unit)


@dataclass
class SynthesisParams:
    I0: float
    V: float
    K: float
    I_DC: float = 0.0
    envelope: str = "raised-cosine"
    A: float = 0.0
    noise_sigma: float = 0.0
    rng_seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.I0 > 0:
            raise DomainError("I0 must be positive")
        if not 0 <= self.V <= 1:
            raise DomainError("V must lie in [0, 1]")
        if self.I_DC < 0:
            raise DomainError("I_DC must be non-negative")
        if not self.K > 1:
            raise DomainError("K must exceed 1")
        if self.envelope not in ENVELOPES:
            raise DomainError(f"unknown envelope {self.envelope!r}; expected one of {ENVELOPES}")
        if not 0 <= self.A < 1:
            raise DomainError("envelope coefficient A must lie in [0, 1)")
        if self.noise_sigma < 0:
            raise DomainError("noise_sigma must be non-negative")


def intensity_exact(config: ApparatusConfig, theta):
    """Normalised two-slit Fraunhofer intensity at angle ``theta``.

    sinc^2(pi a sin(theta)/lambda) * cos^2(pi d sin(theta)/lambda), equal to 1
    on axis.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) >= np.pi / 2):
        raise DomainError("|theta| must be below pi/2")
    s = np.sin(theta) / config.wavelength
    # np.sinc(x) = sin(pi x)/(pi x)
    single = np.sinc(config.slit_width_a * s) ** 2
    return single * np.cos(np.pi * config.slit_separation_d * s) ** 2


def pixel_angles(config: ApparatusConfig, center_pixel: float | None = None) -> np.ndarray:
    center = config.center_pixel if center_pixel is None else center_pixel
    offsets = (np.arange(config.pixel_count) - center) * config.pixel_pitch
    return np.arctan(offsets / config.screen_distance_D)


def exact_trace(
    config: ApparatusConfig,
    I0: float = 1.0,
    V: float = 1.0,
    I_DC: float = 0.0,
    center_pixel: float | None = None,
    noise_sigma: float = 0.0,
    rng_seed: int = 0,
) -> Trace:
    """Sample the exact two-slit pattern on every camera pixel.

    Partial coherence enters as ``(1 + V cos(phi)) / 2`` in place of
    ``cos^2(phi / 2)``, so ``V = 1`` reproduces :func:`intensity_exact` scaled
    by ``I0``.
    """
    if not 0 <= V <= 1:
        raise DomainError("V must lie in [0, 1]")
    center = config.center_pixel if center_pixel is None else center_pixel
    theta = pixel_angles(config, center)
    s = np.sin(theta) / config.wavelength
    single = np.sinc(config.slit_width_a * s) ** 2
    fringes = (1 + V * np.cos(2 * np.pi * config.slit_separation_d * s)) / 2
    samples = I0 * single * fringes + I_DC
    samples = _add_noise(samples, noise_sigma, rng_seed)
    return Trace(samples, config.pixel_pitch, center)


def simulate_reference(n_points: int = REFERENCE_POINTS, step: float = REFERENCE_STEP) -> Trace:
    """The textbook angular simulation [sin(10t)/(10t)]^2 * cos^2(200t).

    Samples are spaced ``step`` radians apart with theta = 0 at index
    ``n_points // 2``.
    """
    if n_points < 2 or not step > 0:
        raise DomainError("need n_points >= 2 and step > 0")
    center = n_points // 2
    theta = (np.arange(n_points) - center) * step
    envelope_term = np.sinc(10 * theta / np.pi) ** 2
    interference = np.cos(200 * theta) ** 2
    return Trace(envelope_term * interference, pixel_pitch=step, center_pixel=center, unit="rad")


def envelope_coefficients(A: float = 0.0) -> tuple[float, float, float]:
    """Cosine-series coefficients (a0, a1, a2) of the extended envelope."""
    if not 0 <= A < 1:
        raise DomainError("envelope coefficient A must lie in [0, 1)")
    return (1 - A) / 2, 0.5, A / 2


def envelope(model: str, x, A: float = 0.0):
    """Diffraction envelope on the window coordinate ``x`` in [-pi, pi].

    ``raised-cosine`` is (1 + cos x)/2.  ``extended`` adds A (cos 2x - 1)/2,
    which goes negative near the edges once A > 0.25; callers that need a
    physical intensity clamp it (see :func:`synthesize_trace`). ``flat`` is
    identically 1, the no-diffraction limit.
    """
    x = np.asarray(x, dtype=float)
    if model == "raised-cosine":
        return (1 + np.cos(x)) / 2
    if model == "extended":
        a0, a1, a2 = envelope_coefficients(A)
        return a0 + a1 * np.cos(x) + a2 * np.cos(2 * x)
    if model == "exact-sinc2":
        return np.sinc(x / np.pi) ** 2
    if model == "flat":
        return np.ones_like(x)
    raise DomainError(f"unknown envelope {model!r}")


def window_coordinate(n_pixels: int, center_pixel: float | None = None) -> np.ndarray:
    center = n_pixels / 2 if center_pixel is None else center_pixel
    return 2 * np.pi * (np.arange(n_pixels) - center) / n_pixels


def raised_cosine_expansion(I0: float, V: float, I_DC: float, K: float, x):
    """Five-term cosine sum equal to the raised-cosine window model."""
    x = np.asarray(x, dtype=float)
    return (
        (I0 / 2 + I_DC)
        + I0 * np.cos(x) / 2
        + I0 * V * np.cos(K * x) / 2
        + I0 * V * np.cos((K + 1) * x) / 4
        + I0 * V * np.cos((K - 1) * x) / 4
    )


def synthesize_trace(
    params: SynthesisParams,
    n_pixels: int = 3000,
    pixel_pitch: float = 7e-6,
    center_pixel: float | None = None,
) -> Trace:
    """Sample the window model ``F(x) I0 (1 + V cos Kx) + I_DC``."""
    if n_pixels < 16:
        raise DomainError("n_pixels must be >= 16")
    center = n_pixels / 2 if center_pixel is None else center_pixel
    x = window_coordinate(n_pixels, center)
    env = np.clip(envelope(params.envelope, x, params.A), 0.0, None)
    samples = env * params.I0 * (1 + params.V * np.cos(params.K * x)) + params.I_DC
    samples = _add_noise(samples, params.noise_sigma, params.rng_seed)
    return Trace(samples, pixel_pitch, center)


def _add_noise(samples: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    if sigma <= 0:
        return samples
    rng = np.random.default_rng(seed)
    return np.clip(samples + rng.normal(0.0, sigma, size=samples.shape), 0.0, None)


def apply_defects(
    trace: Trace,
    tilt_skew: float = 0.0,
    dead_pixels: Iterable[int] = (),
    apodization_strength: float = 0.0,
    floor: float | None = None,
) -> Trace:
    """Degrade a trace the way a real recording might be degraded.

    ``apodization_strength`` multiplies the pattern by exp(-s u^2) and
    ``tilt_skew`` by (1 + t u), where u runs from -1 to 1 across the window
    about the trace centre.  Pixels in ``dead_pixels`` are clamped to
    ``floor`` (the trace minimum by default).
    """
    samples = trace.samples.copy()
    n = len(samples)
    dead = np.fromiter(dead_pixels, dtype=int)
    if dead.size and (dead.min() < 0 or dead.max() >= n):
        raise IndexError(f"dead pixel index out of range [0, {n})")
    u = (np.arange(n) - trace.center_pixel) / (n / 2)
    if apodization_strength:
        samples *= np.exp(-apodization_strength * u**2)
    if tilt_skew:
        samples *= np.clip(1 + tilt_skew * u, 0.0, None)
    if dead.size:
        samples[dead] = samples.min() if floor is None else floor
    return Trace(samples, trace.pixel_pitch, trace.center_pixel, trace.unit)
