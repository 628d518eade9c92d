"""Brute-force reference: the full oscillator x bath Fock space, truncated in a box.

Nothing here shares code with the analytic route beyond the problem types and
the DensityMatrix container. Evolution is a product of exact exponentials
with the drive frozen at each step's midpoint. Every dense matrix exponential
goes through ``scipy.linalg.expm``, not an eigendecomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm

from .errors import DimensionOverflow, NumericalError
from .model import (
    BathSpec,
    CoherentState,
    ConstantDrive,
    FockMatrixState,
    NumberState,
    Scenario,
    ZeroDrive,
    drive_value,
)
from .reduced_density import DensityMatrix

DIMENSION_CAP = 20_000


class CutoffNotCertified(NumericalError):
    def __init__(self, change, tol):
        self.change = change
        super().__init__(f"cutoff change {change:.3e} exceeds tolerance {tol:.3e}")


def destroy(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)


@dataclass(frozen=True)
class FockSpace:
    cutoffs: tuple[int, ...]  # (d_osc, d_1, ..., d_N)
    cap: int = DIMENSION_CAP

    def __post_init__(self):
        object.__setattr__(self, "cutoffs", tuple(int(c) for c in self.cutoffs))
        if self.dim > self.cap:
            raise DimensionOverflow(self.dim, self.cap)

    @classmethod
    def for_scenario(cls, scenario: Scenario, d_osc: int = 8, d_bath: int = 5, cap: int = DIMENSION_CAP) -> "FockSpace":
        return cls((d_osc,) + (d_bath,) * scenario.bath.n_modes, cap)

    @property
    def dim(self) -> int:
        return math.prod(self.cutoffs)

    @property
    def d_osc(self) -> int:
        return self.cutoffs[0]

    @property
    def bath_cutoffs(self) -> tuple[int, ...]:
        return self.cutoffs[1:]

    @property
    def bath_dim(self) -> int:
        return math.prod(self.bath_cutoffs)

    def index(self, occupations) -> int:
        return int(np.ravel_multi_index(tuple(occupations), self.cutoffs))

    def occupations(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.cutoffs))

    def enlarged(self, step: int = 2) -> "FockSpace":
        return FockSpace(tuple(c + step for c in self.cutoffs), self.cap)

    def local_operator(self, site: int, op: np.ndarray) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for k, d in enumerate(self.cutoffs):
            out = np.kron(out, op if k == site else np.eye(d))
        return out

    @cached_property
    def a(self) -> np.ndarray:
        return self.local_operator(0, destroy(self.d_osc))

    def b(self, j: int) -> np.ndarray:
        return self.local_operator(j + 1, destroy(self.cutoffs[j + 1]))

    @cached_property
    def bath_numbers(self) -> np.ndarray:
        """Occupations of every bath mode for every flat index, shape (D, N)."""
        idx = np.indices(self.cutoffs).reshape(len(self.cutoffs), -1).T
        return idx[:, 1:]


@dataclass(frozen=True, eq=False)
class FullState:
    rho: np.ndarray
    space: FockSpace
    t: float = 0.0
    step_error: float = 0.0

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)


def build_hamiltonian(scenario: Scenario, space: FockSpace, K_value: complex = 0j) -> np.ndarray:
    """Full Hamiltonian (energy units) with the drive frozen at ``K_value``."""
    hb = scenario.oscillator.hbar
    a = space.a
    ad = a.conj().T
    H = scenario.oscillator.omega0 * (ad @ a)
    for j, mode in enumerate(scenario.bath.modes):
        b = space.b(j)
        H = H + mode.omega * (b.conj().T @ b)
        H = H + mode.f * (b @ ad) + np.conj(mode.f) * (b.conj().T @ a)
    H = H + K_value * ad + np.conj(K_value) * a
    return hb * H


def bath_energies(scenario: Scenario, space: FockSpace) -> np.ndarray:
    """H_R eigenvalue of every flat basis index."""
    if scenario.bath.n_modes == 0:
        return np.zeros(space.dim)
    return scenario.oscillator.hbar * space.bath_numbers @ scenario.bath.omegas


def truncated_osc_state(scenario: Scenario, d: int) -> np.ndarray:
    init = scenario.initial_osc
    if isinstance(init, NumberState):
        if init.k >= d:
            raise ValueError(f"number state {init.k} does not fit in cutoff {d}")
        rho = np.zeros((d, d), dtype=complex)
        rho[init.k, init.k] = 1.0
        return rho
    if isinstance(init, CoherentState):
        alpha = complex(init.alpha)
        n = np.arange(d)
        logs = np.array([-0.5 * math.lgamma(k + 1) for k in n])
        psi = np.exp(logs) * alpha**n * np.exp(-0.5 * abs(alpha) ** 2)
        psi = psi / np.linalg.norm(psi)
        return np.outer(psi, psi.conj())
    if isinstance(init, FockMatrixState):
        src = init.rho0
        rho = np.zeros((d, d), dtype=complex)
        k = min(d, src.shape[0])
        rho[:k, :k] = src[:k, :k]
        return rho / np.trace(rho)
    raise TypeError(f"unknown initial state {type(init).__name__}")


def thermal_bath_weights(scenario: Scenario, space: FockSpace) -> np.ndarray:
    """Truncated, renormalised thermal weights over the bath product basis."""
    return _thermal_weights(scenario.bath, scenario.bath_state.beta, scenario.oscillator.hbar, space.bath_cutoffs)


def _thermal_weights(bath: BathSpec, beta: float, hbar: float, cutoffs) -> np.ndarray:
    if bath.n_modes == 0:
        return np.ones(1)
    numbers = np.indices(cutoffs).reshape(len(cutoffs), -1).T
    if math.isinf(beta):
        w = np.all(numbers == 0, axis=1).astype(float)
    else:
        e = hbar * numbers @ bath.omegas
        w = np.exp(-beta * (e - e.min()))
    return w / w.sum()


def initial_state(scenario: Scenario, space: FockSpace) -> FullState:
    rho_s = truncated_osc_state(scenario, space.d_osc)
    rho_r = np.diag(thermal_bath_weights(scenario, space)).astype(complex)
    return FullState(np.kron(rho_s, rho_r), space, 0.0)


def evolution_operator(scenario: Scenario, space: FockSpace, t: float, n_steps: int = 1) -> np.ndarray:
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    hb = scenario.oscillator.hbar
    drive = scenario.drive
    if t == 0:
        return np.eye(space.dim, dtype=complex)
    if isinstance(drive, (ZeroDrive, ConstantDrive)):
        H = build_hamiltonian(scenario, space, drive_value(drive, 0.0))
        return expm(-1j * H * t / hb)
    dt = t / n_steps
    H0 = build_hamiltonian(scenario, space, 0j)
    ad = space.a.conj().T
    a = space.a
    U = np.eye(space.dim, dtype=complex)
    for k in range(n_steps):
        K = drive_value(drive, (k + 0.5) * dt)
        H = H0 + hb * (K * ad + np.conj(K) * a)
        U = expm(-1j * H * dt / hb) @ U
    return U


def evolve(rho0: FullState, scenario: Scenario, t: float, n_steps: int = 1, check_steps: bool = False) -> FullState:
    """Conjugate the full state by the stepwise propagator.

    With ``check_steps`` the evolution is repeated at 2 n_steps and the largest
    elementwise change is reported as ``step_error``.
    """
    U = evolution_operator(scenario, rho0.space, t, n_steps)
    rho = U @ rho0.rho @ U.conj().T
    err = 0.0
    if check_steps:
        U2 = evolution_operator(scenario, rho0.space, t, 2 * n_steps)
        rho2 = U2 @ rho0.rho @ U2.conj().T
        err = float(np.max(np.abs(rho2 - rho)))
        rho = rho2
    return FullState(rho, rho0.space, rho0.t + t, err)


def partial_trace_osc(state: FullState) -> DensityMatrix:
    d0 = state.space.d_osc
    dr = state.space.bath_dim
    r = state.rho.reshape(d0, dr, d0, dr)
    return DensityMatrix.from_array(np.trace(r, axis1=1, axis2=3), state.step_error)


def reduced_density(scenario: Scenario, t: float, space: FockSpace, n_steps: int = 1, check_steps: bool = False) -> DensityMatrix:
    return partial_trace_osc(evolve(initial_state(scenario, space), scenario, t, n_steps, check_steps))


def certify_reduced_density(scenario: Scenario, t: float, space: FockSpace, tol: float, n_steps: int = 1) -> DensityMatrix:
    """Reduced state whose elements move by less than ``tol`` when every cutoff grows by 2."""
    base = reduced_density(scenario, t, space, n_steps, check_steps=n_steps > 1)
    big = reduced_density(scenario, t, space.enlarged(2), n_steps)
    d = space.d_osc
    change = float(np.max(np.abs(big.elems[:d, :d] - base.elems)))
    if change > tol or base.max_error_estimate > tol:
        raise CutoffNotCertified(max(change, base.max_error_estimate), tol)
    return base


def converged_reduced_density(
    scenario: Scenario, t: float, space: FockSpace, tol: float, n_steps: int = 1, max_rounds: int = 6
) -> tuple[DensityMatrix, FockSpace]:
    """Grow every cutoff by 2 until the reduced state moves by less than ``tol``.

    Returns the reduced state at the larger of the last two boxes, with the
    last change stored as its error estimate.
    """
    prev = reduced_density(scenario, t, space, n_steps, check_steps=n_steps > 1)
    for _ in range(max_rounds):
        bigger = space.enlarged(2)
        cur = reduced_density(scenario, t, bigger, n_steps, check_steps=n_steps > 1)
        d = space.d_osc
        change = max(float(np.max(np.abs(cur.elems[:d, :d] - prev.elems))), cur.max_error_estimate)
        space, prev = bigger, cur
        if change < tol:
            return DensityMatrix.from_array(cur.elems, change), space
    raise CutoffNotCertified(change, tol)


def converged_value(quantity, scenario: Scenario, t: float, space: FockSpace, tol: float, n_steps: int = 1, max_rounds: int = 6) -> tuple[float, FockSpace]:
    """Scalar analogue of :func:`converged_reduced_density` for ``quantity(scenario, t, space, n_steps)``."""
    prev = quantity(scenario, t, space, n_steps)
    for _ in range(max_rounds):
        space = space.enlarged(2)
        cur = quantity(scenario, t, space, n_steps)
        change = abs(cur - prev)
        prev = cur
        if change < tol:
            return cur, space
    raise CutoffNotCertified(change, tol)


def expectation(state: FullState, op: np.ndarray) -> complex:
    return complex(np.trace(op @ state.rho))


def mean_number(scenario: Scenario, t: float, space: FockSpace, n_steps: int = 1) -> float:
    st = evolve(initial_state(scenario, space), scenario, t, n_steps)
    return expectation(st, space.a.conj().T @ space.a).real


def mean_heat(scenario: Scenario, t: float, space: FockSpace, n_steps: int = 1) -> float:
    """<H_R(t)> - <H_R(0)> from the evolved full state."""
    st0 = initial_state(scenario, space)
    st = evolve(st0, scenario, t, n_steps)
    e = bath_energies(scenario, space)
    return float(np.real(np.diag(st.rho)) @ e - np.real(np.diag(st0.rho)) @ e)


@dataclass(frozen=True, eq=False)
class HeatDistribution:
    """Two-point-measurement heat statistics plus the propagator used to build them."""

    values: np.ndarray
    probabilities: np.ndarray
    t: float
    _unitary: np.ndarray
    _rho0: np.ndarray
    _energies: np.ndarray

    @property
    def mean(self) -> float:
        return math.fsum(self.values * self.probabilities)

    def characteristic(self, nu) -> np.ndarray:
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        return np.exp(1j * np.outer(nu, self.values)) @ self.probabilities

    def characteristic_trace(self, nu: float) -> complex:
        """Tr[U^dag e^{i nu H_R} U e^{-i nu H_R} rho(0)]."""
        ph = np.exp(1j * nu * self._energies)
        U = self._unitary
        inner = (U.conj().T * ph) @ U
        return complex(np.trace(inner * np.exp(-1j * nu * self._energies)[None, :] @ self._rho0))

    def moment_from_characteristic(self, h: float = 1e-4) -> float:
        g = self.characteristic([h, -h])
        return float((-1j * (g[0] - g[1]) / (2 * h)).real)


def heat_statistics(scenario: Scenario, space: FockSpace, t: float, n_steps: int = 1, decimals: int = 10) -> HeatDistribution:
    """Distribution of Q = E_R(t) - E_R(0) under the two-point measurement scheme.

    The bath energy basis is the product Fock basis. Degenerate energies are
    summed over product states.
    """
    U = evolution_operator(scenario, space, t, n_steps)
    rho_s = truncated_osc_state(scenario, space.d_osc)
    weights = thermal_bath_weights(scenario, space)
    d0, dr = space.d_osc, space.bath_dim
    e_bath = bath_energies(scenario, space)[:dr]  # first d_osc block holds every bath state
    osc_idx = np.arange(d0) * dr
    table: dict[float, list[float]] = {}
    for e1 in range(dr):
        if weights[e1] == 0.0:
            continue
        cols = U[:, osc_idx + e1]
        final = np.real(np.einsum("ra,ab,rb->r", cols, rho_s, cols.conj()))
        p_e2 = final.reshape(d0, dr).sum(axis=0) * weights[e1]
        for e2 in range(dr):
            if p_e2[e2] != 0.0:
                q = round(float(e_bath[e2] - e_bath[e1]), decimals)
                table.setdefault(q, []).append(float(p_e2[e2]))
    qs = np.array(sorted(table))
    ps = np.array([math.fsum(table[q]) for q in qs])
    rho0 = np.kron(rho_s, np.diag(weights))
    return HeatDistribution(qs, ps, float(t), U, rho0, bath_energies(scenario, space))


def bath_moment(u: int, v: int, coeffs, bath: BathSpec, beta: float, space: FockSpace, hbar: float = 1.0) -> complex:
    """Tr_R[(B^dag)^u B^v rho_R(0)] with B = sum_j M_j b_j built as explicit truncated operators."""
    if bath.n_modes == 0:
        return 1.0 + 0j if u == v == 0 else 0j
    bath_space = FockSpace(space.bath_cutoffs, space.cap)
    B = np.zeros((bath_space.dim, bath_space.dim), dtype=complex)
    for j in range(bath.n_modes):
        B += coeffs.M[j] * bath_space.local_operator(j, destroy(bath_space.cutoffs[j]))
    w = _thermal_weights(bath, beta, hbar, bath_space.cutoffs)
    Bu = np.linalg.matrix_power(B, u)
    Bv = np.linalg.matrix_power(B, v)
    # <e|B^dag^u B^v|e> = <B^u e|B^v e>; both factors only lower, so the box is exact
    vals = np.einsum("ie,ie->e", Bu.conj(), Bv)
    return complex(np.sum(w * vals))


def single_excitation_check(h, t: float):
    """(G, M, Gamma, Lambda) from a Pade scaling-and-squaring exponential of -i h t."""
    mat = h.h if hasattr(h, "h") else np.asarray(h)
    U = expm(-1j * mat * t)
    return complex(U[0, 0]), 1j * U[0, 1:], U[1:, 0].copy(), U[1:, 1:].copy()


def fine_step_propagator(gen, t: float, n_steps: int = 10_000, t0: float = 0.0) -> np.ndarray:
    """Time-ordered product of midpoint exponentials for a generator H(t)/hbar."""
    dt = (t - t0) / n_steps
    U = np.eye(gen.dim, dtype=complex)
    for k in range(n_steps):
        U = expm(-1j * gen(t0 + (k + 0.5) * dt) * dt) @ U
    return U
