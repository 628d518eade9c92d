"""Discrete baths sampled from a continuous spectral density J(omega)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BathSpec


@dataclass(frozen=True)
class Ohmic:
    """J(w) = gamma w exp(-w / omega_c)."""

    gamma: float
    omega_c: float

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self.gamma * w * np.exp(-w / self.omega_c)


@dataclass(frozen=True)
class Lorentzian:
    """J(w) = amplitude width^2 / ((w - center)^2 + width^2)."""

    amplitude: float
    center: float
    width: float

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self.amplitude * self.width**2 / ((w - self.center) ** 2 + self.width**2)


SHAPES = {"ohmic": Ohmic, "lorentzian": Lorentzian}


def midpoint_grid(n: int, omega_range: tuple[float, float]) -> tuple[np.ndarray, float]:
    lo, hi = map(float, omega_range)
    if n < 1:
        raise ValueError("need at least one mode")
    if not 0 < lo < hi:
        raise ValueError("omega_range must satisfy 0 < lo < hi")
    dw = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * dw, dw


def discretize(density, n: int, omega_range: tuple[float, float]) -> BathSpec:
    """N modes on a uniform midpoint grid with real couplings f_j = sqrt(J(w_j) dw)."""
    omegas, dw = midpoint_grid(n, omega_range)
    return BathSpec.from_arrays(omegas, np.sqrt(density(omegas) * dw))
