"""Wigner quasi-distribution of the oscillator (mass m = 1).

Phase-space conventions: x = sqrt(hbar/(2 w0)) (a + a^dag), p = i sqrt(hbar w0/2) (a^dag - a),
so a coherent amplitude beta sits at (sqrt(2 hbar/w0) Re beta, sqrt(2 hbar w0) Im beta).
The Laguerre closed form is the fast evaluator. The defining integral over
position wavefunctions (``*_integral``) is kept as a slow independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ProbabilityVectorInvalid


@dataclass(frozen=True, eq=False)
class WignerGrid:
    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # shape (len(x_axis), len(p_axis))
    hbar: float = 1.0
    mass_convention: float = 1.0

    def normalization(self) -> float:
        inner = np.trapezoid(self.values, self.p_axis, axis=1)
        return float(np.trapezoid(inner, self.x_axis))

    @property
    def minimum(self) -> float:
        return float(self.values.min())


def _hamiltonian(x, p, omega0):
    return 0.5 * np.asarray(p) ** 2 + 0.5 * omega0**2 * np.asarray(x) ** 2


def wigner_number(n: int, x, p, hbar: float = 1.0, omega0: float = 1.0):
    """W_n(x, p) = (-1)^n/(pi hbar) L_n(4H/(hbar w0)) exp(-2H/(hbar w0))."""
    r = 2.0 * _hamiltonian(x, p, omega0) / (hbar * omega0)
    return (-1.0) ** n / (math.pi * hbar) * special.eval_laguerre(n, 2.0 * r) * np.exp(-r)


def hermite_functions(nmax: int, x, hbar: float = 1.0, omega0: float = 1.0) -> np.ndarray:
    """Normalised eigenfunctions psi_0..psi_nmax of the free oscillator, shape (nmax+1, *x.shape)."""
    x = np.asarray(x, dtype=float)
    scale = math.sqrt(omega0 / hbar)
    xi = x * scale
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * xi**2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, nmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out * math.sqrt(scale)


def wigner_number_integral(n: int, x: float, p: float, hbar: float = 1.0, omega0: float = 1.0) -> float:
    """W_n from its defining integral (slow)."""
    width = math.sqrt(hbar / omega0)
    span = abs(x) + (math.sqrt(2 * n + 1) + 12.0) * width

    def integrand(y):
        psi = hermite_functions(n, np.array([x + y, x - y]), hbar, omega0)[n]
        return psi[0] * psi[1] * math.cos(2.0 * p * y / hbar)

    # even integrand in y
    val, _ = integrate.quad(integrand, 0.0, span, epsabs=1e-14, epsrel=1e-13, limit=500)
    return 2.0 * val / (math.pi * hbar)


def wigner_from_rho_integral(rho: np.ndarray, x: float, p: float, hbar: float = 1.0, omega0: float = 1.0) -> float:
    """W(x, p) of a Fock-basis density matrix from the defining integral (slow)."""
    rho = np.asarray(rho, dtype=complex)
    nmax = rho.shape[0] - 1
    width = math.sqrt(hbar / omega0)
    span = abs(x) + (math.sqrt(2 * nmax + 1) + 12.0) * width

    def kernel(y):
        psi = hermite_functions(nmax, np.array([x + y, x - y]), hbar, omega0)
        return (psi[:, 0] @ rho @ psi[:, 1]) * np.exp(-2j * p * y / hbar)

    re, _ = integrate.quad(lambda y: kernel(y).real, -span, span, epsabs=1e-14, epsrel=1e-13, limit=500)
    im, _ = integrate.quad(lambda y: kernel(y).imag, -span, span, epsabs=1e-14, epsrel=1e-13, limit=500)
    if abs(im) > 1e-9:
        raise ValueError(f"Wigner function has imaginary part {im:.2e}; rho not hermitian?")
    return re / (math.pi * hbar)


def wigner_from_rho(rho: np.ndarray, x, p, hbar: float = 1.0, omega0: float = 1.0) -> np.ndarray:
    """W(x, p) of a Fock-basis density matrix, by the Laguerre recursion over |m><n| terms."""
    rho = np.asarray(rho, dtype=complex)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    A = (omega0 * x + 1j * p) / math.sqrt(2.0 * hbar * omega0)
    M = rho.shape[0]
    wl = [np.exp(-2.0 * np.abs(A) ** 2).astype(complex)]
    W = rho[0, 0].real * wl[0].real
    for n in range(1, M):
        wl.append(2.0 * A * wl[n - 1] / math.sqrt(n))
        W = W + 2.0 * (rho[0, n] * wl[n]).real
    for m in range(1, M):
        temp = wl[m].copy()
        wl[m] = (2.0 * np.conj(A) * temp - math.sqrt(m) * wl[m - 1]) / math.sqrt(m)
        W = W + (rho[m, m] * wl[m]).real
        for n in range(m + 1, M):
            temp2 = (2.0 * A * wl[n - 1] - math.sqrt(m) * temp) / math.sqrt(n)
            temp = wl[n].copy()
            wl[n] = temp2
            W = W + 2.0 * (rho[m, n] * wl[n]).real
    return W / (math.pi * hbar)


def default_axes(hbar=1.0, omega0=1.0, center=(0.0, 0.0), mean_number=0.0, widths=6.0, n_points=121):
    """Uniform axes spanning ``widths`` standard deviations around ``center``."""
    spread = math.sqrt(2.0 * mean_number + 1.0)
    sx = math.sqrt(hbar / (2.0 * omega0)) * spread
    sp = math.sqrt(hbar * omega0 / 2.0) * spread
    xs = np.linspace(center[0] - widths * sx, center[0] + widths * sx, n_points)
    ps = np.linspace(center[1] - widths * sp, center[1] + widths * sp, n_points)
    return xs, ps


def wigner_mixture(probabilities, x_axis, p_axis, hbar: float = 1.0, omega0: float = 1.0, tol: float = 1e-9) -> WignerGrid:
    """sum_n P_n W_n on the grid."""
    probs = np.asarray(probabilities, dtype=float)
    if np.any(probs < -tol):
        raise ProbabilityVectorInvalid(f"negative probability {probs.min():.3e}")
    if probs.sum() > 1.0 + 1e-6:
        raise ProbabilityVectorInvalid(f"probabilities sum to {probs.sum():.9f} > 1")
    X, P = np.meshgrid(np.asarray(x_axis, float), np.asarray(p_axis, float), indexing="ij")
    W = np.zeros_like(X)
    for n, pn in enumerate(probs):
        if pn != 0.0:
            W += pn * wigner_number(n, X, P, hbar, omega0)
    return WignerGrid(np.asarray(x_axis, float), np.asarray(p_axis, float), W, hbar)


def coherent_center(beta: complex, hbar: float = 1.0, omega0: float = 1.0) -> tuple[float, float]:
    beta = complex(beta)
    return math.sqrt(2.0 * hbar / omega0) * beta.real, math.sqrt(2.0 * hbar * omega0) * beta.imag


def wigner_coherent_evolved(alpha, G, zeta, x_axis, p_axis, hbar: float = 1.0, omega0: float = 1.0) -> WignerGrid:
    """Wigner function of the coherent state |alpha G - i zeta> (zero-temperature regime)."""
    beta = complex(alpha) * complex(G) - 1j * complex(zeta)
    xc, pc = coherent_center(beta, hbar, omega0)
    X, P = np.meshgrid(np.asarray(x_axis, float), np.asarray(p_axis, float), indexing="ij")
    W = np.exp(-omega0 * (X - xc) ** 2 / hbar - (P - pc) ** 2 / (hbar * omega0)) / (math.pi * hbar)
    return WignerGrid(np.asarray(x_axis, float), np.asarray(p_axis, float), W, hbar)


def wigner_grid_from_rho(rho, x_axis, p_axis, hbar: float = 1.0, omega0: float = 1.0) -> WignerGrid:
    X, P = np.meshgrid(np.asarray(x_axis, float), np.asarray(p_axis, float), indexing="ij")
    W = wigner_from_rho(rho, X, P, hbar, omega0)
    return WignerGrid(np.asarray(x_axis, float), np.asarray(p_axis, float), W, hbar)
