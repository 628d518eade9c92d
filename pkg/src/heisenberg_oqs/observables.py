"""Expectation values from Heisenberg-picture second moments.

Everything here is a trace of a quadratic form in a(t), b_j(t) against
rho_S(0) x rho_R(0), so only the first and second initial moments enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BathSpec, InitialOscState, NumberState, OscillatorSpec, thermal_occupation
from .reduced_density import InitialMoments


@dataclass(frozen=True, eq=False)
class HeatStats:
    t: float
    mean_Q: float
    per_mode_contributions: np.ndarray


def _moments(initial) -> InitialMoments:
    return initial if isinstance(initial, InitialMoments) else InitialMoments(initial)


def mean_number(coeffs, initial: InitialOscState) -> float:
    """<a^dag a>_t for any initial oscillator state."""
    mu = _moments(initial)
    G, zeta, eta = complex(coeffs.G), complex(coeffs.zeta), float(coeffs.eta)
    n0 = mu(1, 1).real
    # cross term between the coherent part of a(0) and the drive displacement
    cross = 2.0 * (G.conjugate() * mu(1, 0) * (-1j * zeta)).real
    return abs(G) ** 2 * n0 + cross + abs(zeta) ** 2 + eta


def energy(coeffs, initial: InitialOscState, oscillator: OscillatorSpec) -> float:
    """hbar omega0 (<a^dag a>_t + 1/2)."""
    return oscillator.hbar * oscillator.omega0 * (mean_number(coeffs, initial) + 0.5)


def energy_as_printed(coeffs, initial: NumberState, oscillator: OscillatorSpec, bath: BathSpec, beta: float) -> float:
    """Uncorrected variant for diagnostics; dimensionally inconsistent when hbar w0 != 1.

    hbar w0 |G|^2 (n + 1/2) + |zeta|^2 + sum_j |M_j|^2 coth(beta hbar w_j / 2)
    """
    n = initial.k
    hb = oscillator.hbar
    if bath.n_modes:
        x = beta * hb * bath.omegas / 2.0
        coth = np.ones_like(x) if math.isinf(beta) else 1.0 / np.tanh(x)
        bath_part = float(np.sum(np.abs(coeffs.M) ** 2 * coth))
    else:
        bath_part = 0.0
    return hb * oscillator.omega0 * abs(coeffs.G) ** 2 * (n + 0.5) + abs(coeffs.zeta) ** 2 + bath_part


def bath_occupations(coeffs, bath: BathSpec, beta: float, initial, hbar: float = 1.0) -> np.ndarray:
    """<b_j^dag(t) b_j(t)> for every bath mode."""
    mu = _moments(initial)
    nbar = thermal_occupation(bath.omegas, beta, hbar)
    Lam, Gam, Om = coeffs.Lambda, coeffs.Gamma, coeffs.OmegaVec
    thermal = (np.abs(Lam) ** 2) @ nbar
    cross = 2.0 * (Om.conj() * Gam * mu(0, 1)).real
    return thermal + np.abs(Gam) ** 2 * mu(1, 1).real + cross + np.abs(Om) ** 2


def mean_heat(coeffs, bath: BathSpec, beta: float, initial, hbar: float = 1.0, as_printed: bool = False) -> HeatStats:
    """Mean heat delivered to the bath, <H_R(t)> - <H_R(0)>.

    The initial bath energy sum_j hbar w_j nbar_j is subtracted, so the heat
    is zero at t = 0 and whenever every f_j = 0. ``as_printed`` leaves that
    subtraction out, giving the uncorrected diagnostic variant.
    """
    if bath.n_modes == 0:
        return HeatStats(float(coeffs.t), 0.0, np.zeros(0))
    occ = bath_occupations(coeffs, bath, beta, initial, hbar)
    if not as_printed:
        occ = occ - thermal_occupation(bath.omegas, beta, hbar)
    per_mode = hbar * bath.omegas * occ
    if not as_printed:
        # an uncoupled mode only picks up a phase; pin it to zero instead of |e^{-iwt}|^2 - 1 roundoff
        per_mode = np.where(bath.couplings == 0, 0.0, per_mode)
    return HeatStats(float(coeffs.t), math.fsum(per_mode), per_mode)
