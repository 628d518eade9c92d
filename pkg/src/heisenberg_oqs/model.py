"""Problem description types: oscillator, bath, drive, initial state, numerics.

All frequencies are angular. ``hbar`` defaults to 1, so energies come out as
multiples of ``hbar * omega``. A zero-temperature bath is ``beta = math.inf``,
never a large finite number.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ValidationError

# Violation codes
NON_POSITIVE_FREQUENCY = "NonPositiveFrequency"
NON_NORMALIZED_INITIAL_STATE = "NonNormalizedInitialState"
NON_HERMITIAN_INITIAL_STATE = "NonHermitianInitialState"
BAD_PIECEWISE_TABLE = "BadPiecewiseTable"
BAD_PARAMETER = "BadParameter"


@dataclass(frozen=True)
class OscillatorSpec:
    omega0: float
    hbar: float = 1.0


@dataclass(frozen=True)
class BathMode:
    omega: float
    f: complex


@dataclass(frozen=True)
class BathSpec:
    """Discrete bath. ``f`` enters as ``hbar f b a^dag + hbar conj(f) b^dag a``."""

    modes: tuple[BathMode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    @classmethod
    def from_arrays(cls, omegas, couplings) -> "BathSpec":
        return cls(tuple(BathMode(float(w), complex(f)) for w, f in zip(omegas, couplings)))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes], dtype=float)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([m.f for m in self.modes], dtype=complex)


# --- drives -----------------------------------------------------------------


@dataclass(frozen=True)
class ZeroDrive:
    pass


@dataclass(frozen=True)
class ConstantDrive:
    K0: complex


@dataclass(frozen=True)
class HarmonicDrive:
    """K(t) = K0 exp(-i (Omega t + phase))."""

    K0: complex
    Omega: float
    phase: float = 0.0


@dataclass(frozen=True)
class GaussianPulse:
    """K(t) = K0 exp(-(t - t0)^2 / (2 sigma^2)) exp(-i Omega t)."""

    K0: complex
    t0: float
    sigma: float
    Omega: float = 0.0


@dataclass(frozen=True)
class PiecewiseConstantDrive:
    """Segments ``(t_start, K)``; each value holds until the next start."""

    table: tuple[tuple[float, complex], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "table", tuple((float(t), complex(k)) for t, k in self.table)
        )


DriveSpec = Union[ZeroDrive, ConstantDrive, HarmonicDrive, GaussianPulse, PiecewiseConstantDrive]


def drive_value(drive: DriveSpec, t: float) -> complex:
    """Instantaneous source amplitude K(t)."""
    if isinstance(drive, ZeroDrive):
        return 0j
    if isinstance(drive, ConstantDrive):
        return complex(drive.K0)
    if isinstance(drive, HarmonicDrive):
        return complex(drive.K0) * cmath.exp(-1j * (drive.Omega * t + drive.phase))
    if isinstance(drive, GaussianPulse):
        envelope = math.exp(-((t - drive.t0) ** 2) / (2.0 * drive.sigma**2))
        return complex(drive.K0) * envelope * cmath.exp(-1j * drive.Omega * t)
    if isinstance(drive, PiecewiseConstantDrive):
        value = 0j
        for start, k in drive.table:
            if t >= start:
                value = k
            else:
                break
        return value
    raise TypeError(f"unknown drive type {type(drive).__name__}")


def drive_is_zero(drive: DriveSpec) -> bool:
    if isinstance(drive, ZeroDrive):
        return True
    if isinstance(drive, PiecewiseConstantDrive):
        return all(k == 0 for _, k in drive.table)
    return complex(drive.K0) == 0


# --- initial oscillator states ------------------------------------------------


@dataclass(frozen=True)
class NumberState:
    k: int


@dataclass(frozen=True)
class CoherentState:
    alpha: complex


@dataclass(frozen=True, eq=False)
class FockMatrixState:
    rho0: np.ndarray

    def __post_init__(self):
        arr = np.array(self.rho0, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "rho0", arr)

    def __eq__(self, other):
        return isinstance(other, FockMatrixState) and np.array_equal(self.rho0, other.rho0)

    def __hash__(self):
        return hash(self.rho0.tobytes())


InitialOscState = Union[NumberState, CoherentState, FockMatrixState]


@dataclass(frozen=True)
class ThermalBathState:
    beta: float = math.inf

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta)


def thermal_occupation(omega, beta: float, hbar: float = 1.0):
    """Bose-Einstein occupation 1/(exp(beta hbar omega) - 1); exactly 0 at beta = inf."""
    omega = np.asarray(omega, dtype=float)
    if math.isinf(beta):
        return np.zeros_like(omega)
    return 1.0 / np.expm1(beta * hbar * omega)


@dataclass(frozen=True)
class Numerics:
    fock_cutoff_osc: int = 16
    series_tol: float = 1e-13
    series_smax: int = 400
    quadrature_tol: float = 1e-10


@dataclass(frozen=True)
class Scenario:
    oscillator: OscillatorSpec
    bath: BathSpec = field(default_factory=BathSpec)
    drive: DriveSpec = field(default_factory=ZeroDrive)
    initial_osc: InitialOscState = field(default_factory=lambda: NumberState(0))
    bath_state: ThermalBathState = field(default_factory=ThermalBathState)
    numerics: Numerics = field(default_factory=Numerics)

    @property
    def hbar(self) -> float:
        return self.oscillator.hbar


@dataclass(frozen=True)
class SyntheticCoefficients:
    """Direct (G, zeta, eta) injection that bypasses the dynamics."""

    G: complex
    zeta: complex = 0j
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "G", complex(self.G))
        object.__setattr__(self, "zeta", complex(self.zeta))
        object.__setattr__(self, "eta", float(self.eta))
        problems = []
        if abs(self.G) > 1.0 + 1e-12:
            problems.append(Violation(BAD_PARAMETER, "G", f"|G| = {abs(self.G)} > 1"))
        if not self.eta >= 0.0:
            problems.append(Violation(BAD_PARAMETER, "eta", f"eta = {self.eta} < 0"))
        if problems:
            raise ValidationError(problems)


# --- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    field: str
    message: str


def _check_fock_matrix(rho, where: str) -> list[Violation]:
    out = []
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        return [Violation(NON_HERMITIAN_INITIAL_STATE, where, f"shape {rho.shape} is not square")]
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > 1e-12:
        out.append(Violation(NON_HERMITIAN_INITIAL_STATE, where, f"hermiticity defect {herm:.3e}"))
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-12:
        out.append(Violation(NON_NORMALIZED_INITIAL_STATE, where, f"trace {tr.real:.15g}"))
    if herm <= 1e-12:
        lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
        if lo < -1e-12:
            out.append(
                Violation(NON_NORMALIZED_INITIAL_STATE, where, f"negative eigenvalue {lo:.3e}")
            )
    return out


def _check_drive(drive) -> list[Violation]:
    out = []
    if isinstance(drive, HarmonicDrive):
        if not (math.isfinite(drive.Omega) and math.isfinite(drive.phase)):
            out.append(Violation(BAD_PARAMETER, "drive", "non-finite Omega or phase"))
    elif isinstance(drive, GaussianPulse):
        if not drive.sigma > 0:
            out.append(Violation(BAD_PARAMETER, "drive.sigma", f"sigma = {drive.sigma} <= 0"))
    elif isinstance(drive, PiecewiseConstantDrive):
        starts = [t for t, _ in drive.table]
        if not starts or starts[0] != 0.0:
            out.append(Violation(BAD_PIECEWISE_TABLE, "drive.table", "table must start at t = 0"))
        if any(b <= a for a, b in zip(starts, starts[1:])):
            out.append(
                Violation(BAD_PIECEWISE_TABLE, "drive.table", "t_start not strictly increasing")
            )
    elif not isinstance(drive, (ZeroDrive, ConstantDrive)):
        out.append(Violation(BAD_PARAMETER, "drive", f"unknown drive {type(drive).__name__}"))
    return out


def find_violations(scenario: Scenario) -> list[Violation]:
    out: list[Violation] = []
    osc = scenario.oscillator
    if not osc.omega0 > 0:
        out.append(Violation(NON_POSITIVE_FREQUENCY, "oscillator.omega0", f"omega0 = {osc.omega0}"))
    if not osc.hbar > 0:
        out.append(Violation(BAD_PARAMETER, "oscillator.hbar", f"hbar = {osc.hbar}"))
    for j, mode in enumerate(scenario.bath.modes):
        if not mode.omega > 0:
            out.append(
                Violation(NON_POSITIVE_FREQUENCY, f"bath.modes[{j}].omega", f"omega = {mode.omega}")
            )
        if not cmath.isfinite(mode.f):
            out.append(Violation(BAD_PARAMETER, f"bath.modes[{j}].f", "non-finite coupling"))
    out.extend(_check_drive(scenario.drive))

    init = scenario.initial_osc
    if isinstance(init, NumberState):
        if int(init.k) != init.k or init.k < 0:
            out.append(Violation(BAD_PARAMETER, "initial_osc.k", f"k = {init.k}"))
    elif isinstance(init, CoherentState):
        if not cmath.isfinite(complex(init.alpha)):
            out.append(Violation(BAD_PARAMETER, "initial_osc.alpha", "non-finite amplitude"))
    elif isinstance(init, FockMatrixState):
        out.extend(_check_fock_matrix(init.rho0, "initial_osc.rho0"))
    else:
        out.append(Violation(BAD_PARAMETER, "initial_osc", f"unknown state {type(init).__name__}"))

    if not scenario.bath_state.beta > 0:
        out.append(Violation(BAD_PARAMETER, "bath_state.beta", f"beta = {scenario.bath_state.beta}"))

    num = scenario.numerics
    if num.fock_cutoff_osc < 1:
        out.append(Violation(BAD_PARAMETER, "numerics.fock_cutoff_osc", "must be >= 1"))
    for name in ("series_tol", "quadrature_tol"):
        if not getattr(num, name) > 0:
            out.append(Violation(BAD_PARAMETER, f"numerics.{name}", "must be > 0"))
    if num.series_smax < 1:
        out.append(Violation(BAD_PARAMETER, "numerics.series_smax", "must be >= 1"))
    return out


def validate(scenario: Scenario) -> Scenario:
    """Return ``scenario`` unchanged if every invariant holds, else raise ValidationError."""
    problems = find_violations(scenario)
    if problems:
        raise ValidationError(problems)
    return scenario
