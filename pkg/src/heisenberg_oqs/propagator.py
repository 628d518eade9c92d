"""Time-dependent c-number coefficients of the Heisenberg solution.

The oscillator and bath ladder operators obey a closed linear system

    d/dt (a, b_1, ..., b_N) = -i h (a, b_1, ..., b_N) - i (K(t), 0, ..., 0)

with ``h`` the (N+1)x(N+1) one-particle matrix. Every coefficient is a block of
``U1(t) = exp(-i h t)`` or of the inhomogeneous solution driven by K(t):

    a(t)   = G a(0) - i zeta - i sum_j M_j b_j(0)
    b_j(t) = sum_k Lambda_jk b_k(0) + Gamma_j a(0) + Omega_j

``h`` is hermitian, so it is diagonalised once with ``eigh``. Degenerate
eigenvalues need no special treatment because a hermitian matrix is always
diagonalisable by a unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad_vec

from .errors import EigendecompositionFailure, QuadratureNonConvergence
from .model import (
    BathSpec,
    ConstantDrive,
    DriveSpec,
    GaussianPulse,
    HarmonicDrive,
    OscillatorSpec,
    PiecewiseConstantDrive,
    Scenario,
    ThermalBathState,
    ZeroDrive,
    drive_value,
    thermal_occupation,
)


@dataclass(frozen=True, eq=False)
class OneParticleHamiltonian:
    """Row/column 0 is the oscillator, 1..N the bath modes (angular frequency units)."""

    h: np.ndarray

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @cached_property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        herm = np.max(np.abs(self.h - self.h.conj().T)) if self.h.size else 0.0
        if herm > 1e-12:
            raise EigendecompositionFailure(f"one-particle matrix not hermitian ({herm:.2e})")
        try:
            return np.linalg.eigh(self.h)
        except np.linalg.LinAlgError as exc:
            raise EigendecompositionFailure(str(exc)) from exc

    def unitary(self, t: float) -> np.ndarray:
        if t == 0:
            return np.eye(self.dim, dtype=complex)
        lam, vecs = self.eig
        return (vecs * np.exp(-1j * lam * t)) @ vecs.conj().T


def assemble_one_particle(oscillator: OscillatorSpec, bath: BathSpec) -> OneParticleHamiltonian:
    n = bath.n_modes
    h = np.zeros((n + 1, n + 1), dtype=complex)
    h[0, 0] = oscillator.omega0
    for j, mode in enumerate(bath.modes, start=1):
        h[j, j] = mode.omega
        h[0, j] = mode.f
        h[j, 0] = np.conj(mode.f)
    h.setflags(write=False)
    return OneParticleHamiltonian(h)


def homogeneous_coefficients(h: OneParticleHamiltonian, t: float):
    """Return ``(G, M, Gamma, Lambda)`` at time ``t``."""
    u = h.unitary(t)
    G = complex(u[0, 0])
    M = 1j * u[0, 1:]
    Gamma = u[1:, 0].copy()
    Lambda = u[1:, 1:].copy()
    return G, M, Gamma, Lambda


def _phi1(z: np.ndarray) -> np.ndarray:
    """(exp(z) - 1)/z, finite at z = 0."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-4
    zs = z[small]
    out[small] = 1.0 + zs / 2.0 + zs * zs / 6.0 + zs**3 / 24.0
    zb = z[~small]
    out[~small] = np.expm1(zb) / zb
    return out


def _mode_integrals(lam: np.ndarray, drive: DriveSpec, t: float, quad_tol: float) -> np.ndarray:
    """I_k(t) = int_0^t exp(i lam_k t') K(t') dt' for every eigenfrequency lam_k."""
    if t == 0 or isinstance(drive, ZeroDrive):
        return np.zeros_like(lam, dtype=complex)
    if isinstance(drive, ConstantDrive):
        return complex(drive.K0) * t * _phi1(1j * lam * t)
    if isinstance(drive, HarmonicDrive):
        amp = complex(drive.K0) * np.exp(-1j * drive.phase)
        return amp * t * _phi1(1j * (lam - drive.Omega) * t)
    if isinstance(drive, PiecewiseConstantDrive):
        total = np.zeros_like(lam, dtype=complex)
        table = drive.table
        for i, (start, k) in enumerate(table):
            if start >= t:
                break
            stop = table[i + 1][0] if i + 1 < len(table) else t
            stop = min(stop, t)
            width = stop - start
            if k != 0 and width > 0:
                total += k * np.exp(1j * lam * start) * width * _phi1(1j * lam * width)
        return total
    if isinstance(drive, GaussianPulse):
        def integrand(tp):
            return np.exp(1j * lam * tp) * drive_value(drive, tp)

        points = [drive.t0] if 0 < drive.t0 < t else None
        res, err, info = quad_vec(
            integrand, 0.0, t, epsabs=quad_tol, epsrel=0.0, norm="max",
            points=points, limit=20000, full_output=True,
        )
        if info.status != 0 or not err <= quad_tol:
            raise QuadratureNonConvergence("gaussian pulse response", err)
        return np.asarray(res, dtype=complex)
    raise TypeError(f"unknown drive type {type(drive).__name__}")


def drive_response(h: OneParticleHamiltonian, drive: DriveSpec, t: float, quad_tol: float = 1e-10):
    """Return ``(zeta, Omega)`` for the drive over ``[0, t]``.

    v(t) = -i int_0^t U1(t - t') (K(t'), 0, ..., 0) dt',  zeta = i v[0],  Omega_j = v[j].
    """
    lam, vecs = h.eig
    n = h.dim
    if isinstance(drive, ZeroDrive) or t == 0:
        return 0j, np.zeros(n - 1, dtype=complex)
    # spread the tolerance over the eigenmode sum
    ints = _mode_integrals(lam, drive, t, quad_tol / max(n, 1))
    weights = np.exp(-1j * lam * t) * ints * vecs[0, :].conj()
    v = -1j * (vecs @ weights)
    return complex(1j * v[0]), v[1:].copy()


def thermal_eta(M: np.ndarray, bath: BathSpec, beta: float, hbar: float = 1.0) -> float:
    """Thermal photon number injected into the oscillator: sum_j |M_j|^2 nbar_j."""
    if bath.n_modes == 0 or math.isinf(beta):
        return 0.0
    nbar = thermal_occupation(bath.omegas, beta, hbar)
    return float(np.sum(np.abs(M) ** 2 * nbar))


def memory_kernel(bath: BathSpec, t: float) -> complex:
    """chi(t) = sum_j |f_j|^2 exp(-i omega_j t)."""
    if bath.n_modes == 0:
        return 0j
    return complex(np.sum(np.abs(bath.couplings) ** 2 * np.exp(-1j * bath.omegas * t)))


def memory_kernel_laplace(bath: BathSpec, s: complex) -> complex:
    """Diagnostic only: int_0^inf exp(-s t) chi(t) dt = sum_j |f_j|^2 / (s + i omega_j), Re s > 0."""
    if bath.n_modes == 0:
        return 0j
    return complex(np.sum(np.abs(bath.couplings) ** 2 / (s + 1j * bath.omegas)))


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    t: float
    G: complex
    M: np.ndarray
    Lambda: np.ndarray
    Gamma: np.ndarray
    zeta: complex
    OmegaVec: np.ndarray
    eta: float
    chi_kernel: complex

    @property
    def sum_rule_defect(self) -> float:
        """| |G|^2 + sum |M_j|^2 - 1 |"""
        return abs(abs(self.G) ** 2 + float(np.sum(np.abs(self.M) ** 2)) - 1.0)

    @property
    def bath_sum_rule_defect(self) -> float:
        """max_j | (Lambda Lambda^dag)_jj + |Gamma_j|^2 - 1 |"""
        if self.M.size == 0:
            return 0.0
        diag = np.einsum("jk,jk->j", self.Lambda, self.Lambda.conj()).real
        return float(np.max(np.abs(diag + np.abs(self.Gamma) ** 2 - 1.0)))


class Propagator:
    """Coefficient evaluator for one (oscillator, bath, drive, temperature) setup.

    The eigendecomposition is done once; ``coefficients(t)`` is pure in ``t``.
    """

    def __init__(
        self,
        oscillator: OscillatorSpec,
        bath: BathSpec,
        drive: DriveSpec | None = None,
        bath_state: ThermalBathState | None = None,
        quadrature_tol: float = 1e-10,
    ):
        self.oscillator = oscillator
        self.bath = bath
        self.drive = drive if drive is not None else ZeroDrive()
        self.bath_state = bath_state if bath_state is not None else ThermalBathState()
        self.quadrature_tol = quadrature_tol
        self.h = assemble_one_particle(oscillator, bath)

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "Propagator":
        return cls(
            scenario.oscillator,
            scenario.bath,
            scenario.drive,
            scenario.bath_state,
            scenario.numerics.quadrature_tol,
        )

    def coefficients(self, t: float) -> CoefficientSet:
        if t < 0:
            raise ValueError("t must be >= 0")
        G, M, Gamma, Lambda = homogeneous_coefficients(self.h, t)
        zeta, omega_vec = drive_response(self.h, self.drive, t, self.quadrature_tol)
        eta = thermal_eta(M, self.bath, self.bath_state.beta, self.oscillator.hbar)
        return CoefficientSet(
            t=float(t),
            G=G,
            M=M,
            Lambda=Lambda,
            Gamma=Gamma,
            zeta=zeta,
            OmegaVec=omega_vec,
            eta=eta,
            chi_kernel=memory_kernel(self.bath, t),
        )
