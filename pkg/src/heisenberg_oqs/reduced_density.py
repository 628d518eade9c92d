r"""Reduced density matrix of the oscillator in the Fock basis.

The starting point is the vacuum-projector expansion

    <n|rho_S(t)|m> = 1/sqrt(n! m!) sum_s (-1)^s/s! Tr[(a^dag(t))^(s+m) a(t)^(s+n) rho(0)]

expanded with a(t) = G a(0) - i zeta - i B, where B is the thermal bath
operator with <B^dag^u B^v> = delta_uv u! eta^u. Written out this is a
quadruple sum over (s, p, r, u). Taken literally, the s-sum only converges
while eta < 1. At eta >= 1 the thermal moments u! eta^u beat the 1/s!
suppression.

The primary engine regroups the same terms by the shell index d = s - u.
With y and x the powers of a^dag(0) and a(0), and e1 and e2 the powers of
conj(zeta) and zeta, a term belongs to shell d when y + e1 = d + m and
x + e2 = d + n. For fixed (x, y, e1, e2) the leftover sum over s is a Gauss
series 2F1(., .; d+1; -eta). A Pfaff transformation turns it into a
polynomial in eta/(1+eta) with at most min(m, n) + 1 terms. So every shell
is a finite sum, and the shell series converges for every eta >= 0.

At eta = 0 shell d is exactly the s = d term of the literal sum. The literal
engine is kept (``method="direct"``) to cross-check the regrouping wherever
it converges.

Conventions:
  * 0**0 = 1 for every coefficient. Factors with exponent 0 are skipped, so
    G = 0, zeta = 0 and eta = 0 limits are exact.
  * Term magnitudes are carried as logs (log-gamma for factorials) and only
    exponentiated per shell. Shells are accumulated with ``math.fsum``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SeriesNonConvergence
from .model import (
    CoherentState,
    FockMatrixState,
    InitialOscState,
    NumberState,
    Numerics,
    Scenario,
)
from .propagator import Propagator

_EPS = np.finfo(float).eps


# --- initial moments ------------------------------------------------------------


class InitialMoments:
    """Moments Tr_S[(a^dag)^p a^q rho_S(0)] of the initial oscillator state.

    ``max_order`` is the largest p (or q) with a nonzero moment (None when
    unbounded). ``diagonal`` marks states whose moments vanish unless p == q.
    """

    def __init__(self, state: InitialOscState):
        self.state = state
        self.diagonal = isinstance(state, NumberState)
        self.coherent_amplitude = None
        if isinstance(state, NumberState):
            self.max_order = int(state.k)
        elif isinstance(state, CoherentState):
            self.max_order = None
            self.coherent_amplitude = complex(state.alpha)
        elif isinstance(state, FockMatrixState):
            self.max_order = state.rho0.shape[0] - 1
        else:
            raise TypeError(f"unknown initial state {type(state).__name__}")
        self._cache = np.ones((1, 1), dtype=complex)

    def __call__(self, p: int, q: int) -> complex:
        if p < 0 or q < 0:
            raise ValueError("moment orders must be nonnegative")
        st = self.state
        if isinstance(st, NumberState):
            if p != q or p > st.k:
                return 0j
            return complex(math.perm(st.k, p))
        if isinstance(st, CoherentState):
            a = complex(st.alpha)
            return a.conjugate() ** p * a**q
        return complex(self._fock_moment(p, q))

    def _fock_moment(self, p: int, q: int) -> complex:
        rho = self.state.rho0
        d = rho.shape[0]
        total = []
        # Tr[a^dag^p a^q rho] = sum_i rho[i, j] sqrt(i!/(i-q)!) sqrt(j!/(j-p)!), j = i - q + p
        for i in range(q, d):
            j = i - q + p
            if j < p or j >= d:
                continue
            w = math.sqrt(math.perm(i, q) * math.perm(j, p))
            total.append(rho[i, j] * w)
        re = math.fsum(z.real for z in total)
        im = math.fsum(z.imag for z in total)
        return complex(re, im)

    def matrix(self, pmax: int, qmax: int) -> np.ndarray:
        """Array ``mu[p, q]`` for p <= pmax, q <= qmax (cached, grown on demand)."""
        have_p, have_q = self._cache.shape
        if pmax + 1 > have_p or qmax + 1 > have_q:
            P, Q = max(pmax + 1, have_p), max(qmax + 1, have_q)
            new = np.zeros((P, Q), dtype=complex)
            for p in range(P):
                for q in range(Q):
                    new[p, q] = self._cache[p, q] if (p < have_p and q < have_q) else self(p, q)
            self._cache = new
        return self._cache[: pmax + 1, : qmax + 1]


def initial_moments(state: InitialOscState) -> InitialMoments:
    return InitialMoments(state)


# --- density matrix container ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dim: int
    elems: np.ndarray
    trace_defect: float
    hermiticity_defect: float
    min_eigenvalue_estimate: float
    leakage: float
    max_error_estimate: float = 0.0

    @classmethod
    def from_array(cls, elems: np.ndarray, max_error_estimate: float = 0.0) -> "DensityMatrix":
        elems = np.array(elems, dtype=complex)
        tr = complex(np.trace(elems))
        herm = float(np.max(np.abs(elems - elems.conj().T))) if elems.size else 0.0
        lo = float(np.linalg.eigvalsh(0.5 * (elems + elems.conj().T)).min()) if elems.size else 0.0
        elems.setflags(write=False)
        return cls(
            dim=elems.shape[0],
            elems=elems,
            trace_defect=abs(1.0 - tr),
            hermiticity_defect=herm,
            min_eigenvalue_estimate=lo,
            leakage=1.0 - tr.real,
            max_error_estimate=max_error_estimate,
        )

    @property
    def trace(self) -> float:
        return float(np.trace(self.elems).real)

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.elems).real.copy()


# --- series engines -------------------------------------------------------------


class SeriesResult(NamedTuple):
    value: complex
    error: float
    terms: int


def _coeffs_gze(coeffs):
    return complex(coeffs.G), complex(coeffs.zeta), float(coeffs.eta)


def _log_abs(z: complex) -> float:
    a = abs(z)
    return math.log(a) if a > 0 else -math.inf


def _hyp_terminating(a: float, N: int, c: float, z: float) -> float:
    """2F1(a, -N; c; z) for integer N >= 0 (a polynomial of degree N)."""
    term = 1.0
    terms = [1.0]
    for k in range(N):
        term *= (a + k) * (k - N) / ((c + k) * (k + 1)) * z
        terms.append(term)
    return math.fsum(terms)


def _shell_weight(d: int, n: int, m: int, eta: float) -> tuple[float, float]:
    """(sign, log|w_d|) of the resummed s-sum for shell d.

    w_d = sum_{s - u = d} (-1)^s (s+m)! (s+n)! eta^u / (s! u! (d+m)! (d+n)!)
    """
    z = eta / (1.0 + eta)
    l1p = math.log1p(eta)
    if d >= 0:
        if m <= n:
            F = _hyp_terminating(d + n + 1, m, d + 1, z)
            logpow = -(d + n + 1) * l1p
        else:
            F = _hyp_terminating(d + m + 1, n, d + 1, z)
            logpow = -(d + m + 1) * l1p
        if F == 0.0:
            return 0.0, -math.inf
        sign = (-1.0) ** d * math.copysign(1.0, F)
        return sign, -math.lgamma(d + 1) + logpow + math.log(abs(F))
    D = -d
    if eta == 0.0:
        return 0.0, -math.inf
    if m - D <= n - D:
        F = _hyp_terminating(n + 1, m - D, D + 1, z)
        logpow = -(n + 1) * l1p
    else:
        F = _hyp_terminating(m + 1, n - D, D + 1, z)
        logpow = -(m + 1) * l1p
    if F == 0.0:
        return 0.0, -math.inf
    logw = (
        D * math.log(eta)
        + math.lgamma(m + 1)
        + math.lgamma(n + 1)
        - math.lgamma(D + 1)
        - math.lgamma(m - D + 1)
        - math.lgamma(n - D + 1)
        + logpow
        + math.log(abs(F))
    )
    return math.copysign(1.0, F), logw


def _binomial_vector(N: int, g: complex, w: complex, kmax: int | None):
    """Scaled vector v[k] = C(N, k) g^k w^(N-k) for k = 0..min(N, kmax).

    Returns ``(log_scale, v)`` with the true vector equal to exp(log_scale) * v.
    Zero bases contribute only through exponent 0.
    """
    top = N if kmax is None else min(N, kmax)
    if top < 0:
        return -math.inf, np.zeros(0, dtype=complex)
    ks = np.arange(top + 1)
    mask = np.ones(top + 1, dtype=bool)
    if g == 0:
        mask &= ks == 0
    if w == 0:
        mask &= ks == N
    if not mask.any():
        return -math.inf, np.zeros(top + 1, dtype=complex)
    lg = _log_abs(g) if g != 0 else 0.0
    lw = _log_abs(w) if w != 0 else 0.0
    lgam = np.array([math.lgamma(k + 1) for k in range(N + 1)])
    logs = np.full(top + 1, -np.inf)
    km = ks[mask]
    logs[mask] = lgam[N] - lgam[km] - lgam[N - km] + km * lg + (N - km) * lw
    scale = float(np.max(logs))
    phase = ks * (cmath.phase(g) if g != 0 else 0.0) + (N - ks) * (cmath.phase(w) if w != 0 else 0.0)
    v = np.where(mask, np.exp(logs - scale) * np.exp(1j * phase), 0.0)
    return scale, v


def _check_stop(shells: list[complex], partial: complex, tol: float) -> bool:
    if len(shells) < 3:
        return False
    bound = tol * max(1.0, abs(partial))
    return all(abs(s) < bound for s in shells[-3:])


def _fsum_complex(values) -> complex:
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def series_element(
    n: int,
    m: int,
    coeffs,
    moments: InitialMoments,
    numerics: Numerics | None = None,
) -> SeriesResult:
    """Resummed shell series for <n|rho_S(t)|m>; works for any eta >= 0."""
    numerics = numerics or Numerics()
    if n < 0 or m < 0:
        raise ValueError("n, m must be nonnegative")
    G, zeta, eta = _coeffs_gze(coeffs)
    tol = numerics.series_tol
    smax = numerics.series_smax
    lognorm = -0.5 * (math.lgamma(n + 1) + math.lgamma(m + 1))
    K = moments.max_order
    alpha = moments.coherent_amplitude

    # G = 0: only y = x = 0 survives; zeta = 0: only e1 = e2 = 0.
    if zeta == 0 and K is not None:
        d_last = K - max(m, n)  # needs y = d + m <= K and x = d + n <= K
    elif G == 0 and zeta == 0:
        d_last = -min(m, n)
    else:
        d_last = None

    if alpha is not None:
        X = alpha * G - 1j * zeta  # a(t) amplitude seen by the coherent part
        lX = _log_abs(X)
        phX = cmath.phase(X) if X != 0 else 0.0

    shells: list[complex] = []
    abs_mass = 0.0
    partials: list[complex] = []
    d = -min(m, n)
    check_from = 0 if K is None else max(0, K - min(m, n))
    exhausted = False
    while True:
        if d_last is not None and d > d_last:
            exhausted = True  # every remaining shell is identically zero
            break
        if d - (-min(m, n)) > smax:
            raise SeriesNonConvergence(
                f"shell cap {smax} reached", partials[-3:], location=(n, m)
            )
        sign, logw = _shell_weight(d, n, m, eta)
        N1, N2 = d + m, d + n
        if sign == 0.0:
            shell = 0j
            shell_abs = 0.0
        elif alpha is not None:
            # coherent moments factorise; the inner sums collapse by the binomial theorem
            if X == 0 and (N1 > 0 or N2 > 0):
                shell, shell_abs = 0j, 0.0
            else:
                # w_d * conj(X)^N1 * X^N2
                logmag = logw + lognorm + (N1 + N2) * (lX if X != 0 else 0.0)
                mag = math.exp(logmag) if logmag > -745 else 0.0
                shell = sign * mag * cmath.exp(1j * phX * (N2 - N1))
                shell_abs = mag
        else:
            la, va = _binomial_vector(N1, G.conjugate(), 1j * zeta.conjugate(), K)
            lb, vb = _binomial_vector(N2, G, -1j * zeta, K)
            if va.size == 0 or vb.size == 0 or not (math.isfinite(la) and math.isfinite(lb)):
                shell, shell_abs = 0j, 0.0
            else:
                # w_d already divides by (d+m)! (d+n)!, the binomial vectors carry the rest
                logmag = logw + lognorm + la + lb
                mag = math.exp(logmag) if logmag > -745 else 0.0
                if moments.diagonal:
                    L = min(va.size, vb.size)
                    mu = np.diag(moments.matrix(L - 1, L - 1))
                    inner = np.sum(va[:L] * mu * vb[:L])
                    inner_abs = np.sum(np.abs(va[:L]) * np.abs(mu) * np.abs(vb[:L]))
                else:
                    mu = moments.matrix(va.size - 1, vb.size - 1)
                    inner = va @ mu @ vb
                    inner_abs = np.abs(va) @ np.abs(mu) @ np.abs(vb)
                shell = complex(sign * mag * inner)
                shell_abs = float(mag * inner_abs)
        shells.append(shell)
        abs_mass += shell_abs
        partial = _fsum_complex(shells)
        partials.append(partial)
        if d >= check_from and _check_stop(shells, partial, tol):
            break
        d += 1

    value = _fsum_complex(shells)
    tail = 0.0 if exhausted or not shells else abs(shells[-1])
    err = tail + 8 * _EPS * (abs_mass + abs(value))
    return SeriesResult(value, err, len(shells))


def series_element_direct(
    n: int,
    m: int,
    coeffs,
    moments: InitialMoments,
    numerics: Numerics | None = None,
) -> SeriesResult:
    """Literal s-truncated quadruple sum. Diverges when eta >= 1."""
    numerics = numerics or Numerics()
    G, zeta, eta = _coeffs_gze(coeffs)
    tol = numerics.series_tol
    smax = min(numerics.series_smax, 160)
    Gc, zc = G.conjugate(), zeta.conjugate()
    norm = 1.0 / math.sqrt(math.factorial(n) * math.factorial(m))
    K = moments.max_order
    terms: list[complex] = []
    partials: list[complex] = []
    abs_mass = 0.0
    s = 0
    while True:
        if s > smax:
            raise SeriesNonConvergence(f"s cap {smax} reached", partials[-3:], location=(n, m))
        P, R = s + m, s + n
        acc = []
        for u in range(0, min(P, R) + 1):
            if u > 0 and eta == 0:
                break
            wu = math.exp(math.lgamma(u + 1) - math.lgamma(s + 1) + (u * math.log(eta) if u else 0.0))
            # a[y] with y = P - p, p >= u ; b[x] with x = R - r, r >= u
            a = np.zeros(P - u + 1, dtype=complex)
            for p in range(u, P + 1):
                y = P - p
                if K is not None and y > K:
                    continue
                a[y] = math.comb(P, p) * math.comb(p, u) * Gc**y * (1j * zc) ** (p - u)
            b = np.zeros(R - u + 1, dtype=complex)
            for r in range(u, R + 1):
                x = R - r
                if K is not None and x > K:
                    continue
                b[x] = math.comb(R, r) * math.comb(r, u) * G**x * (-1j * zeta) ** (r - u)
            mu = moments.matrix(a.size - 1, b.size - 1)
            acc.append(wu * (a @ mu @ b))
        term = (-1.0) ** s * norm * _fsum_complex(acc)
        terms.append(term)
        abs_mass += abs(term)
        partial = _fsum_complex(terms)
        partials.append(partial)
        if (K is None or s >= K) and _check_stop(terms, partial, tol):
            break
        s += 1
    value = _fsum_complex(terms)
    err = abs(terms[-1]) + 8 * _EPS * abs_mass
    return SeriesResult(value, err, len(terms))


def coherent_element_closed_form(n: int, m: int, alpha: complex, G: complex, zeta: complex) -> complex:
    """Zero-temperature coherent result: X^n conj(X)^m exp(-|X|^2)/sqrt(n! m!), X = alpha G - i zeta."""
    X = complex(alpha) * complex(G) - 1j * complex(zeta)
    if X == 0:
        return 1.0 + 0j if n == m == 0 else 0j
    logmag = (n + m) * math.log(abs(X)) - abs(X) ** 2 - 0.5 * (math.lgamma(n + 1) + math.lgamma(m + 1))
    return math.exp(logmag) * cmath.exp(1j * cmath.phase(X) * (n - m))


def rho_element(
    n: int,
    m: int,
    coeffs,
    moments: InitialMoments,
    numerics: Numerics | None = None,
    method: str = "auto",
) -> complex:
    """<n|rho_S(t)|m>.

    ``method``: ``"auto"`` uses the closed form for coherent states at eta = 0 and
    the resummed series otherwise; ``"series"`` forces the resummed series;
    ``"direct"`` runs the literal s-sum; ``"closed_form"`` requires the coherent
    eta = 0 regime.
    """
    return rho_element_estimate(n, m, coeffs, moments, numerics, method).value


def rho_element_estimate(n, m, coeffs, moments, numerics=None, method="auto") -> SeriesResult:
    if method == "direct":
        return series_element_direct(n, m, coeffs, moments, numerics)
    coherent_zero_T = moments.coherent_amplitude is not None and float(coeffs.eta) == 0.0
    if method == "closed_form" or (method == "auto" and coherent_zero_T):
        if not coherent_zero_T:
            raise ValueError("closed form needs a coherent initial state and eta = 0")
        v = coherent_element_closed_form(n, m, moments.coherent_amplitude, coeffs.G, coeffs.zeta)
        return SeriesResult(v, 4 * _EPS * max(1.0, abs(v)), 0)
    if method not in ("auto", "series"):
        raise ValueError(f"unknown method {method!r}")
    return series_element(n, m, coeffs, moments, numerics)


def transition_probability(k: int, n: int, coeffs, numerics: Numerics | None = None) -> float:
    """P_{k -> n}(t) for an oscillator prepared in the number state |k>."""
    res = series_element(n, n, coeffs, InitialMoments(NumberState(k)), numerics)
    return float(res.value.real)


def rho_matrix_from_coefficients(
    coeffs,
    moments: InitialMoments,
    dim: int,
    numerics: Numerics | None = None,
    method: str = "auto",
) -> DensityMatrix:
    numerics = numerics or Numerics()
    out = np.zeros((dim, dim), dtype=complex)
    worst = 0.0
    # number states with zeta = 0 stay diagonal
    diagonal_only = moments.diagonal and complex(coeffs.zeta) == 0
    for n in range(dim):
        for m in range(n, dim):
            if diagonal_only and n != m:
                continue
            try:
                res = rho_element_estimate(n, m, coeffs, moments, numerics, method)
            except SeriesNonConvergence as exc:
                raise SeriesNonConvergence(
                    "series did not converge", exc.partial_sums, location=(n, m)
                ) from exc
            out[n, m] = res.value
            worst = max(worst, res.error)
            if m != n:
                out[m, n] = res.value.conjugate()
            else:
                out[n, n] = res.value.real
    return DensityMatrix.from_array(out, worst)


def rho_matrix(scenario: Scenario, t: float, dim: int | None = None, method: str = "auto") -> DensityMatrix:
    dim = scenario.numerics.fock_cutoff_osc if dim is None else dim
    if dim > scenario.numerics.fock_cutoff_osc:
        raise ValueError(f"dim {dim} exceeds fock_cutoff_osc {scenario.numerics.fock_cutoff_osc}")
    coeffs = Propagator.from_scenario(scenario).coefficients(t)
    return rho_matrix_from_coefficients(
        coeffs, InitialMoments(scenario.initial_osc), dim, scenario.numerics, method
    )


def rho_matrix_auto(
    coeffs,
    moments: InitialMoments,
    numerics: Numerics | None = None,
    leak_target: float = 1e-6,
    start_dim: int = 4,
    max_dim: int = 80,
    method: str = "auto",
) -> DensityMatrix:
    """Grow the cutoff until the trace leakage drops below ``leak_target``."""
    dim = start_dim
    while True:
        rho = rho_matrix_from_coefficients(coeffs, moments, dim, numerics, method)
        if rho.leakage < leak_target or dim >= max_dim:
            return rho
        dim = min(max_dim, dim + max(2, dim // 2))
