import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisenberg_oqs import InitialMoments, NumberState, SyntheticCoefficients, transition_probability
from heisenberg_oqs.errors import ProbabilityVectorInvalid
from heisenberg_oqs.wigner import (
    coherent_center,
    default_axes,
    hermite_functions,
    wigner_coherent_evolved,
    wigner_from_rho,
    wigner_from_rho_integral,
    wigner_grid_from_rho,
    wigner_mixture,
    wigner_number,
    wigner_number_integral,
)


def test_peak_values():
    assert abs(wigner_number(0, 0.0, 0.0) - 1 / math.pi) < 1e-16
    assert abs(wigner_number(1, 0.0, 0.0) + 1 / math.pi) < 1e-16


# defining integral with Hermite functions, evaluated by adaptive quadrature
W2_AT_07_M03 = -0.11534475114940965


def test_second_level_against_frozen_integral():
    assert abs(wigner_number(2, 0.7, -0.3) - W2_AT_07_M03) < 1e-12


@pytest.mark.parametrize("hbar,omega0", [(1.0, 1.0), (0.5, 2.0)])
def test_laguerre_form_matches_defining_integral(hbar, omega0):
    rng = np.random.default_rng(7)
    scale_x, scale_p = math.sqrt(hbar / omega0), math.sqrt(hbar * omega0)
    for n in range(6):
        for x, p in rng.uniform(-2.0, 2.0, size=(5, 2)):
            x, p = x * scale_x, p * scale_p
            direct = wigner_number_integral(n, x, p, hbar, omega0)
            assert abs(wigner_number(n, x, p, hbar, omega0) - direct) < 1e-8


def test_hermite_functions_are_orthonormal():
    x = np.linspace(-12, 12, 4001)
    psi = hermite_functions(6, x, hbar=0.8, omega0=1.5)
    gram = np.trapezoid(psi[:, None, :] * psi[None, :, :], x, axis=2)
    assert np.max(np.abs(gram - np.eye(7))) < 1e-10


@given(st.integers(0, 8), st.floats(-4, 4), st.floats(-4, 4))
def test_number_state_parity_and_bound(n, x, p):
    w = wigner_number(n, x, p)
    assert w == wigner_number(n, -x, -p)
    assert abs(w) <= 1 / math.pi + 1e-9


@pytest.mark.parametrize("n", [0, 1, 4])
def test_position_marginal(n):
    x = np.linspace(-3, 3, 13)
    p = np.linspace(-14, 14, 4001)
    X, P = np.meshgrid(x, p, indexing="ij")
    marginal = np.trapezoid(wigner_number(n, X, P), p, axis=1)
    assert np.max(np.abs(marginal - hermite_functions(n, x)[n] ** 2)) < 1e-6


def test_grid_normalisation_and_mixture():
    xs, ps = default_axes(mean_number=3, n_points=161)
    grid = wigner_mixture([0.2, 0.5, 0.3], xs, ps)
    assert abs(grid.normalization() - 1.0) < 1e-3
    assert grid.minimum < 0  # odd-number admixture dips negative at the origin


def test_vacuum_mixture_is_ground_state():
    xs, ps = default_axes(n_points=41)
    grid = wigner_mixture([1.0, 0.0, 0.0], xs, ps)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    assert np.array_equal(grid.values, wigner_number(0, X, P))


def test_half_transmitted_photon_is_even_mixture():
    c = SyntheticCoefficients(G=math.sqrt(0.5))
    probs = [transition_probability(1, n, c) for n in range(3)]
    xs, ps = default_axes(n_points=31)
    grid = wigner_mixture(probs, xs, ps)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    expected = 0.5 * wigner_number(0, X, P) + 0.5 * wigner_number(1, X, P)
    assert np.max(np.abs(grid.values - expected)) < 1e-15


def test_mixture_rejects_bad_probabilities():
    xs, ps = default_axes(n_points=5)
    with pytest.raises(ProbabilityVectorInvalid):
        wigner_mixture([0.5, -0.1], xs, ps)
    with pytest.raises(ProbabilityVectorInvalid):
        wigner_mixture([0.7, 0.4], xs, ps)


def test_coherent_grid_centre_and_vacuum_limit():
    xs, ps = default_axes(n_points=41)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    vac = wigner_coherent_evolved(0.0, 0.3, 0.0, xs, ps)
    assert np.max(np.abs(vac.values - wigner_number(0, X, P))) < 1e-15
    # x = sqrt(2 hbar / w0) Re beta, p = sqrt(2 hbar w0) Im beta
    assert coherent_center(1 + 2j, hbar=1.0, omega0=0.5) == (2.0, 2.0)


def test_coherent_grid_equals_recursion_on_its_density_matrix():
    from heisenberg_oqs import CoherentState
    from heisenberg_oqs.reduced_density import rho_matrix_from_coefficients

    alpha, G, zeta = 0.7 - 0.2j, 0.6 * np.exp(0.4j), 0.3 + 0.1j
    beta = alpha * G - 1j * zeta
    xc, pc = coherent_center(beta)
    xs, ps = default_axes(center=(xc, pc), n_points=21)
    rho = rho_matrix_from_coefficients(SyntheticCoefficients(G, zeta), InitialMoments(CoherentState(alpha)), 24)
    a = wigner_coherent_evolved(alpha, G, zeta, xs, ps).values
    b = wigner_grid_from_rho(rho.elems, xs, ps).values
    assert np.max(np.abs(a - b)) < 1e-12


def test_recursion_matches_integral_for_random_state():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    for xv, pv in [(0.0, 0.0), (0.4, -1.1), (-1.3, 0.6)]:
        assert abs(wigner_from_rho(rho, xv, pv) - wigner_from_rho_integral(rho, xv, pv)) < 1e-9


def test_recursion_reproduces_number_states():
    xs = np.linspace(-2, 2, 7)
    for n in range(5):
        rho = np.zeros((5, 5))
        rho[n, n] = 1.0
        assert np.max(np.abs(wigner_from_rho(rho, xs, 0.3 * xs) - wigner_number(n, xs, 0.3 * xs))) < 1e-14


def test_integral_flags_non_hermitian_input():
    with pytest.raises(ValueError):
        wigner_from_rho_integral(np.array([[0.5, 0.5], [0.0, 0.5]]), 0.2, 0.3)
