"""Magnus-expansion propagators, orders 1 to 3, for time-dependent hermitian generators.

The generator returns H(t)/hbar, i.e. angular-frequency units. With A(t) = -i H(t):

    u1 = int_0^t A
    u2 = 1/2 int_{t2<t1} [A1, A2]
    u3 = 1/6 int_{t3<t2<t1} ([A1, [A2, A3]] + [A3, [A2, A1]])

Simplex integrals use the cube map t1 = h x1, t2 = h x1 x2, t3 = h x1 x2 x3, with
composite Gauss-Legendre panels on each axis. The panel count doubles until a
term changes by less than ``quad_tol`` in Frobenius norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureNonConvergence
from .model import BathSpec, OscillatorSpec, SyntheticCoefficients, thermal_occupation

_GL_ORDER = 8


@dataclass(frozen=True)
class GeneratorFunction:
    func: Callable[[float], np.ndarray]
    dim: int
    smooth: bool = True

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.func(t), dtype=complex)

    def batch(self, ts: np.ndarray) -> np.ndarray:
        flat = np.ravel(ts)
        out = np.array([self(t) for t in flat], dtype=complex)
        return out.reshape(np.shape(ts) + (self.dim, self.dim))


@dataclass(frozen=True, eq=False)
class MagnusTerms:
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    errors: tuple[float, float, float]
    t0: float
    t: float
    order: int

    @property
    def exponent(self) -> np.ndarray:
        return self.u1 + self.u2 + self.u3


def _composite_nodes(panels: int):
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    edges = np.linspace(0.0, 1.0, panels + 1)
    xs = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, :]).ravel()
    ws = (np.diff(edges)[:, None] * w[None, :]).ravel()
    return xs, ws


def _comm(a, b):
    return a @ b - b @ a


def _u1(gen, t0, h, panels):
    x, w = _composite_nodes(panels)
    H1 = gen.batch(t0 + h * x)
    return -1j * h * np.einsum("i,ijk->jk", w, H1)


def _u2(gen, t0, h, panels):
    x, w = _composite_nodes(panels)
    t1 = t0 + h * x
    t2 = t0 + h * np.outer(x, x)
    H1 = gen.batch(t1)[:, None]
    H2 = gen.batch(t2)
    weights = np.outer(w * x, w)
    # (-i)^2 / 2 = -1/2
    return -0.5 * h**2 * np.einsum("ij,ijkl->kl", weights, _comm(H1, H2))


def _u3(gen, t0, h, panels):
    x, w = _composite_nodes(panels)
    X1, X2, X3 = np.meshgrid(x, x, x, indexing="ij")
    H1 = gen.batch(t0 + h * x)[:, None, None]
    H2 = gen.batch(t0 + h * np.outer(x, x))[:, :, None]
    H3 = gen.batch(t0 + h * X1 * X2 * X3)
    weights = np.einsum("i,j,k->ijk", w * x * x, w * x, w)
    integrand = _comm(H1, _comm(H2, H3)) + _comm(H3, _comm(H2, H1))
    # (-i)^3 / 6 = i/6
    return (1j / 6.0) * h**3 * np.einsum("ijk,ijklm->lm", weights, integrand)


def _refine(fn, gen, t0, h, quad_tol, start, cap, name):
    panels = start
    prev = fn(gen, t0, h, panels)
    while True:
        panels *= 2
        cur = fn(gen, t0, h, panels)
        change = float(np.linalg.norm(cur - prev))
        if change < quad_tol:
            return cur, change
        if panels >= cap:
            raise QuadratureNonConvergence(f"Magnus term {name}", change)
        prev = cur


def magnus_terms(gen: GeneratorFunction, t: float, order: int = 3, quad_tol: float = 1e-12, t0: float = 0.0) -> MagnusTerms:
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if t < t0:
        raise ValueError("t must be >= t0")
    d = gen.dim
    zero = np.zeros((d, d), dtype=complex)
    h = t - t0
    if h == 0:
        return MagnusTerms(zero, zero, zero, (0.0, 0.0, 0.0), t0, t, order)
    start = 1 if gen.smooth else 4
    u1, e1 = _refine(_u1, gen, t0, h, quad_tol, start, 256, "u1")
    u2, e2 = (zero, 0.0) if order < 2 else _refine(_u2, gen, t0, h, quad_tol, start, 64, "u2")
    u3, e3 = (zero, 0.0) if order < 3 else _refine(_u3, gen, t0, h, quad_tol, start, 8, "u3")
    return MagnusTerms(u1, u2, u3, (e1, e2, e3), t0, t, order)


def _expm_antihermitian(u: np.ndarray) -> np.ndarray:
    # u = -i K with K hermitian; exponentiate through eigh so the result is unitary to roundoff
    K = 1j * u
    K = 0.5 * (K + K.conj().T)
    lam, vecs = np.linalg.eigh(K)
    return (vecs * np.exp(-1j * lam)) @ vecs.conj().T


def magnus_propagator(terms: MagnusTerms) -> np.ndarray:
    return _expm_antihermitian(terms.exponent)


def heisenberg_evolve(A0: np.ndarray, terms_or_unitary) -> np.ndarray:
    """U^dag A0 U."""
    U = magnus_propagator(terms_or_unitary) if isinstance(terms_or_unitary, MagnusTerms) else terms_or_unitary
    return U.conj().T @ np.asarray(A0) @ U


def _step_edges(gen, t0, t, max_step):
    # radius heuristic: keep int ||H|| dt <= 1 per substep
    probe = np.linspace(t0, t, 33)
    norm = max(np.linalg.norm(gen(s), 2) for s in probe)
    n = max(1, math.ceil(norm * (t - t0)))
    if max_step is not None:
        n = max(n, math.ceil((t - t0) / max_step - 1e-12))
    return np.linspace(t0, t, n + 1)


def magnus_evolve(
    gen: GeneratorFunction,
    t: float,
    order: int = 3,
    quad_tol: float = 1e-12,
    t0: float = 0.0,
    max_step: float | None = None,
) -> np.ndarray:
    """Propagator over [t0, t], composed from Magnus steps."""
    U = np.eye(gen.dim, dtype=complex)
    edges = _step_edges(gen, t0, t, max_step)
    for a, b in zip(edges[:-1], edges[1:]):
        U = magnus_propagator(magnus_terms(gen, b, order, quad_tol, a)) @ U
    return U


def unitarity_defect(U: np.ndarray) -> float:
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def one_particle_generator(oscillator: OscillatorSpec, bath: BathSpec, coupling_envelope=None) -> GeneratorFunction:
    """One-particle matrix as a generator, couplings optionally scaled by envelope(t)."""
    from .propagator import assemble_one_particle

    h = assemble_one_particle(oscillator, bath).h
    if coupling_envelope is None:
        return GeneratorFunction(lambda t: h, h.shape[0])
    diag = np.diag(np.diag(h))
    off = h - diag
    return GeneratorFunction(lambda t: diag + coupling_envelope(t) * off, h.shape[0])


def synthetic_from_unitary(U: np.ndarray, bath: BathSpec, beta: float, hbar: float = 1.0, zeta: complex = 0j) -> SyntheticCoefficients:
    """Read (G, eta) off a one-particle propagator so the series engine can consume it."""
    G = complex(U[0, 0])
    M = 1j * U[0, 1:]
    eta = 0.0
    if bath.n_modes and not math.isinf(beta):
        eta = float(np.sum(np.abs(M) ** 2 * thermal_occupation(bath.omegas, beta, hbar)))
    # clip roundoff so |G| <= 1 passes validation
    if abs(G) > 1.0:
        G /= abs(G)
    return SyntheticCoefficients(G, zeta, eta)
