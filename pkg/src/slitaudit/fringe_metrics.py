"""Fringe visibility and path distinguishability."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from slitaudit.geometry import DomainError
from slitaudit.synthesis import envelope_coefficients

SATISFIED_TOL = 1e-12
SATURATED_TOL = 1e-9


@dataclass
class VisibilityEstimate:
    value: float
    method: str
    inputs: dict = field(default_factory=dict)
    clamped: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _estimate(raw: float, method: str, **inputs) -> VisibilityEstimate:
    # noisy readings can overshoot [0, 1] slightly; clamp and flag instead of raising
    value = min(max(raw, 0.0), 1.0)
    return VisibilityEstimate(value, method, inputs, clamped=value != raw)


def visibility_extrema(i_max: float, i_min: float) -> VisibilityEstimate:
    """(I_max - I_min) / (I_max + I_min)."""
    if i_max < i_min:
        raise DomainError("i_max must not be below i_min (arguments swapped?)")
    if i_min < 0 or not i_max > 0:
        raise DomainError("need i_max > 0 and i_min >= 0")
    return _estimate((i_max - i_min) / (i_max + i_min), "extrema", i_max=i_max, i_min=i_min)


def visibility_elevation_corrected(i_max: float, i_min: float, i_elev: float) -> VisibilityEstimate:
    """Visibility after subtracting the baseline elevation from both extrema."""
    if i_elev < 0 or not i_max > i_elev:
        raise DomainError("need i_max > i_elev >= 0")
    if i_min < i_elev:
        raise DomainError("i_min lies below the elevation; inconsistent baseline")
    top, bottom = i_max - i_elev, i_min - i_elev
    return _estimate(
        (top - bottom) / (top + bottom),
        "elevation-corrected",
        i_max=i_max,
        i_min=i_min,
        i_elev=i_elev,
    )


def visibility_from_r(r: float) -> VisibilityEstimate:
    """V = sqrt(R) for the raised-cosine envelope; R > 1 is clamped and flagged."""
    if r < 0:
        raise DomainError("R must be non-negative")
    return _estimate(math.sqrt(r), "from-R", r=r)


def visibility_from_r_envelope(r: float, A: float) -> VisibilityEstimate:
    """Invert R = V^2 (a0/a1)^2 for the extended envelope, i.e. V = sqrt(R)/(1 - A)."""
    if r < 0:
        raise DomainError("R must be non-negative")
    a0, a1, _ = envelope_coefficients(A)
    return _estimate(math.sqrt(r) * a1 / a0, "from-R-envelope", r=r, A=A)


def visibility_from_coherence(i1: float, i2: float, gamma: float) -> VisibilityEstimate:
    """2 sqrt(I1 I2)/(I1 + I2) * |gamma_12|.

    ``gamma`` is the modulus of the complex degree of coherence at the
    relevant path delay; the delay itself is not modelled.
    """
    if not (i1 > 0 and i2 > 0):
        raise DomainError("beam intensities must be positive")
    if not 0 <= gamma <= 1:
        raise DomainError("|gamma| must lie in [0, 1]")
    return _estimate(
        2 * math.sqrt(i1 * i2) / (i1 + i2) * gamma, "coherence", i1=i1, i2=i2, gamma=gamma
    )


def distinguishability_balanced(i1: float, i2: float) -> float:
    """Predictability |I1 - I2|/(I1 + I2) of unbalanced beams.

    An extension: this is the usual predictability of an unbalanced two-path
    source, so the saturation case of P^2 + V^2 <= 1 can be exercised.
    """
    if i1 < 0 or i2 < 0:
        raise DomainError("beam intensities must be non-negative")
    if i1 == 0 and i2 == 0:
        raise DomainError("at least one beam must carry light")
    return abs(i1 - i2) / (i1 + i2)


@dataclass(frozen=True)
class Complementarity:
    lhs: float
    satisfied: bool
    saturated: bool


def complementarity_check(p: float, v: float) -> Complementarity:
    """Evaluate P^2 + V^2 against the duality bound of 1."""
    for name, value in (("p", p), ("v", v)):
        if not 0 <= value <= 1:
            raise DomainError(f"{name} must lie in [0, 1], got {value}")
    lhs = p * p + v * v
    return Complementarity(lhs, lhs <= 1 + SATISFIED_TOL, abs(lhs - 1) <= SATURATED_TOL)
