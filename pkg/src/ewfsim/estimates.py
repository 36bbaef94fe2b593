"""Order-of-magnitude numbers for a cat-sized superposition in a gravitational field."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34  # J s
    G: float = 6.67430e-11  # m^3 kg^-1 s^-2


CODATA = PhysicalConstants()

# worked example: a 4 kg cat split over 10 cm for 1 s
CAT_MASS = 4.0
CAT_SEPARATION = 0.1
CAT_TIME = 1.0


def _finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


def accumulated_phase(m: float, g: float, dx: float, t: float, constants: PhysicalConstants = CODATA) -> float:
    """Relative phase m g dx t / hbar between the two arms after time t."""
    _finite(m=m, g=g, dx=dx, t=t)
    for name, v in (("m", m), ("dx", dx), ("t", t)):
        if v < 0:
            raise ValueError(f"{name} must be non-negative, got {v!r}")
    return m * g * dx * t / constants.hbar


def delta_g_for_pi(m: float, dx: float, t: float, constants: PhysicalConstants = CODATA) -> float:
    """Change in g that shifts the accumulated phase by pi."""
    _finite(m=m, dx=dx, t=t)
    for name, v in (("m", m), ("dx", dx), ("t", t)):
        if v <= 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    return math.pi * constants.hbar / (m * dx * t)


def gravitational_acceleration(m: float, r: float, constants: PhysicalConstants = CODATA) -> float:
    """Newtonian field G m / r^2 of a point mass."""
    _finite(m=m, r=r)
    if m < 0:
        raise ValueError(f"mass must be non-negative, got {m!r}")
    if r <= 0:
        raise ValueError(f"distance must be positive, got {r!r}")
    return constants.G * m / r ** 2
