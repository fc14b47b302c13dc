"""Closed-form Fraunhofer predictions for a two-slit apparatus.

All lengths are SI metres, powers are watts and angles radians.  Pixel
quantities are real-valued offsets measured in units of the camera pitch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from scipy import constants

# First side lobe of the single-slit sinc^2 envelope, rounded as in the
# classic textbook tables.  The exact root of tan(b) = b gives 1.4303 / 0.0472.
SECONDARY_MAX_FACTOR = 1.45
SECONDARY_MAX_REL_HEIGHT = 0.047
SECONDARY_MAX_FACTOR_EXACT = 1.4303
SECONDARY_MAX_REL_HEIGHT_EXACT = 0.0472

FRAUNHOFER_THRESHOLD = 0.01
INTEGRAL_TOL = 1e-9

# Long dimension of each slit; only used for the photon-flux estimate.
DEFAULT_SLIT_LENGTH = 200e-6


class DomainError(ValueError):
    """Raised when inputs fall outside the domain of a formula."""


@dataclass(frozen=True)
class ApparatusConfig:
    """Physical description of the laser, the slit pair and the line camera."""

    wavelength: float
    slit_width_a: float
    slit_separation_d: float
    screen_distance_D: float
    pixel_pitch: float = 7e-6
    pixel_count: int = 3000
    beam_power: float = 0.5e-3
    beam_diameter: float = 0.8e-3
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lengths = {
            "wavelength": self.wavelength,
            "slit_width_a": self.slit_width_a,
            "slit_separation_d": self.slit_separation_d,
            "screen_distance_D": self.screen_distance_D,
            "pixel_pitch": self.pixel_pitch,
            "beam_power": self.beam_power,
            "beam_diameter": self.beam_diameter,
        }
        for name, value in lengths.items():
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be strictly positive, got {value!r}")
        if self.slit_separation_d <= self.slit_width_a:
            raise DomainError("slit separation must exceed slit width")
        if int(self.pixel_count) != self.pixel_count or self.pixel_count < 16:
            raise DomainError(f"pixel_count must be an integer >= 16, got {self.pixel_count!r}")

    @property
    def center_pixel(self) -> float:
        return self.pixel_count / 2

    def replace(self, **changes) -> "ApparatusConfig":
        return replace(self, **changes)


REFERENCE_CONFIG = ApparatusConfig(
    wavelength=632.8e-9,
    slit_width_a=10e-6,
    slit_separation_d=200e-6,
    screen_distance_D=0.104,
    pixel_pitch=7e-6,
    pixel_count=3000,
    beam_power=0.5e-3,
    beam_diameter=0.8e-3,
)


@dataclass(frozen=True)
class Offset:
    """An angular position on the camera expressed three ways."""

    theta: float
    length: float
    pixels: float


@dataclass(frozen=True)
class SecondaryMax:
    theta: float
    length: float
    pixels: float
    absolute_pixel: float
    rel_height: float
    in_view: bool


@dataclass(frozen=True)
class PhotonFlux:
    photon_energy: float
    total_rate: float
    per_slit_rate: float
    transit_time: float


@dataclass(frozen=True)
class FringePrediction:
    """Every pattern feature that follows from an apparatus description."""

    missing_order: float
    fringe_count: int | None
    fringe_spacing: float
    fringe_spacing_px: float
    half_angle_theta: float
    principal_half_width: float
    principal_half_width_px: float
    secondary_max_offset: float
    secondary_max_offset_px: float
    secondary_max_pixel: float
    secondary_max_in_view: bool
    secondary_max_rel_height: float
    fraunhofer_number: float

    @property
    def principal_width_px(self) -> float:
        return 2 * self.principal_half_width_px


def _positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value!r}")


def missing_order(d: float, a: float) -> float:
    """Interference order suppressed by the single-slit envelope zero, d/a."""
    _positive(d=d, a=a)
    if d <= a:
        raise DomainError("slit separation must exceed slit width")
    return d / a


def is_integral(value: float, tol: float = INTEGRAL_TOL) -> bool:
    return abs(value - round(value)) <= tol


def fringe_count(missing: int) -> int:
    """Number of fringes inside the principal maximum: 2(m - 1) + 1."""
    if int(missing) != missing or missing < 1:
        raise DomainError(f"missing order must be an integer >= 1, got {missing!r}")
    return 2 * (int(missing) - 1) + 1


def observed_fringe_count(missing_left: int, missing_right: int) -> int:
    """Fringe count for an asymmetric pattern, e.g. 17 left / 16 right gives 32."""
    if missing_left < 1 or missing_right < 1:
        raise DomainError("missing orders must be >= 1")
    return (missing_left - 1) + (missing_right - 1) + 1


def fringe_spacing(config: ApparatusConfig) -> tuple[float, float]:
    """Fringe spacing w = D*lambda/d, in metres and in pixels."""
    w = config.screen_distance_D * config.wavelength / config.slit_separation_d
    return w, w / config.pixel_pitch


def _angle_to_offset(config: ApparatusConfig, sin_theta: float) -> Offset:
    theta = math.asin(sin_theta)
    length = config.screen_distance_D * math.tan(theta)
    return Offset(theta, length, length / config.pixel_pitch)


def principal_half_width(config: ApparatusConfig) -> Offset:
    """Half width X of the central lobe, from sin(theta) = lambda/a.

    The full lobe width on the camera is ``2 * X``.
    """
    ratio = config.wavelength / config.slit_width_a
    if ratio >= 1:
        raise DomainError("wavelength must be smaller than the slit width")
    return _angle_to_offset(config, ratio)


def secondary_max_geometry(
    config: ApparatusConfig,
    factor: float = SECONDARY_MAX_FACTOR,
    rel_height: float = SECONDARY_MAX_REL_HEIGHT,
    center_pixel: float | None = None,
) -> SecondaryMax:
    """Position and relative height of the first secondary maximum."""
    s = factor * config.wavelength / config.slit_width_a
    if s >= 1:
        raise DomainError(f"{factor} * lambda / a must be < 1, got {s}")
    off = _angle_to_offset(config, s)
    center = config.center_pixel if center_pixel is None else center_pixel
    absolute = center + off.pixels
    in_view = 0 <= absolute <= config.pixel_count - 1
    return SecondaryMax(off.theta, off.length, off.pixels, absolute, rel_height, in_view)


def fraunhofer_number(config: ApparatusConfig) -> float:
    """a^2 / (D lambda); far-field formulas hold when this is well below 1."""
    return config.slit_width_a**2 / (config.screen_distance_D * config.wavelength)


def fraunhofer_satisfied(config: ApparatusConfig, threshold: float = FRAUNHOFER_THRESHOLD) -> bool:
    return fraunhofer_number(config) < threshold


def infer_distance_from_width(observed_half_width: float, a: float, wavelength: float) -> float:
    """Screen distance that would put the envelope zero at ``observed_half_width``."""
    _positive(observed_half_width=observed_half_width, a=a, wavelength=wavelength)
    if wavelength >= a:
        raise DomainError("wavelength must be smaller than the slit width")
    return observed_half_width / math.tan(math.asin(wavelength / a))


def infer_distance_from_spacing(
    observed_spacing_px: float, pitch: float, d: float, wavelength: float
) -> float:
    """Screen distance implied by a fringe spacing measured in pixels."""
    _positive(observed_spacing_px=observed_spacing_px, pitch=pitch, d=d, wavelength=wavelength)
    return observed_spacing_px * pitch * d / wavelength


def photon_flux_per_slit(
    config: ApparatusConfig, slit_length: float = DEFAULT_SLIT_LENGTH
) -> PhotonFlux:
    """Photon energy, beam photon rate, rate through one slit and slit-to-camera transit time.

    The beam is treated as a uniform disk of ``config.beam_diameter``; the
    fraction intercepted by one slit is its area over the disk area.
    """
    energy = constants.h * constants.c / config.wavelength
    total = config.beam_power / energy
    beam_area = math.pi * (config.beam_diameter / 2) ** 2
    fraction = min(1.0, config.slit_width_a * slit_length / beam_area)
    return PhotonFlux(
        photon_energy=energy,
        total_rate=total,
        per_slit_rate=total * fraction,
        transit_time=config.screen_distance_D / constants.c,
    )


def predict(config: ApparatusConfig) -> FringePrediction:
    """Collect every geometric prediction for ``config``."""
    m = missing_order(config.slit_separation_d, config.slit_width_a)
    count = fringe_count(round(m)) if is_integral(m) else None
    w, w_px = fringe_spacing(config)
    half = principal_half_width(config)
    sec = secondary_max_geometry(config)
    return FringePrediction(
        missing_order=m,
        fringe_count=count,
        fringe_spacing=w,
        fringe_spacing_px=w_px,
        half_angle_theta=half.theta,
        principal_half_width=half.length,
        principal_half_width_px=half.pixels,
        secondary_max_offset=sec.length,
        secondary_max_offset_px=sec.pixels,
        secondary_max_pixel=sec.absolute_pixel,
        secondary_max_in_view=sec.in_view,
        secondary_max_rel_height=sec.rel_height,
        fraunhofer_number=fraunhofer_number(config),
    )
