import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisenberg_oqs import (
    BathSpec,
    CoherentState,
    ConstantDrive,
    FockMatrixState,
    HarmonicDrive,
    InitialMoments,
    NumberState,
    OscillatorSpec,
    Propagator,
    SyntheticCoefficients,
    ThermalBathState,
    ZeroDrive,
    energy,
    mean_heat,
    mean_number,
    rho_element,
)
from heisenberg_oqs.model import thermal_occupation
from heisenberg_oqs.observables import bath_occupations, energy_as_printed

from conftest import DESK_BATH, desk_scenario, random_bath

amplitudes = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


def coeffs(sc, t):
    return Propagator.from_scenario(sc).coefficients(t)


def test_number_state_at_t0():
    sc = desk_scenario(NumberState(3))
    assert mean_number(coeffs(sc, 0.0), sc.initial_osc) == 3


def test_coherent_zero_temperature_mean():
    sc = desk_scenario(CoherentState(0.6 + 0.2j), drive=HarmonicDrive(0.1, 1.1), beta=math.inf)
    c = coeffs(sc, 1.7)
    assert abs(mean_number(c, sc.initial_osc) - abs((0.6 + 0.2j) * c.G - 1j * c.zeta) ** 2) < 1e-14


# oracle <a^dag a>, cutoffs (12, 11, 11); change from (10, 9, 9) is 2e-7
DESK_COHERENT_MEAN_NUMBER_T2 = 0.4258883483934213


def test_dissipative_mean_number_matches_frozen_oracle(desk_coherent):
    assert abs(mean_number(coeffs(desk_coherent, 2.0), desk_coherent.initial_osc) - DESK_COHERENT_MEAN_NUMBER_T2) < 1e-6


states = st.one_of(
    st.builds(NumberState, st.integers(0, 4)),
    st.builds(CoherentState, amplitudes),
    st.integers(0, 500).map(
        lambda s: FockMatrixState(
            (lambda x: x @ x.conj().T / np.trace(x @ x.conj().T))(
                np.random.default_rng(s).normal(size=(4, 4)) + 1j * np.random.default_rng(s + 1).normal(size=(4, 4))
            )
        )
    ),
)


@given(states, st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False), amplitudes, st.floats(0, 2))
def test_mean_number_equals_first_moment_of_populations(state, G, zeta, eta):
    c = SyntheticCoefficients(G, zeta, eta)
    mu = InitialMoments(state)
    pops, n = [], 0
    while math.fsum(pops) < 1 - 1e-14 and n < 200:
        pops.append(rho_element(n, n, c, mu).real)
        n += 1
    assert abs(math.fsum(k * p for k, p in enumerate(pops)) - mean_number(c, state)) < 1e-8


def test_energy_at_t0_and_lower_bound():
    osc = OscillatorSpec(1.3, hbar=0.7)
    sc = desk_scenario(NumberState(2))
    c0 = coeffs(sc, 0.0)
    assert abs(energy(c0, NumberState(2), osc) - 0.7 * 1.3 * 2.5) < 1e-15
    for t in np.linspace(0, 10, 11):
        assert energy(coeffs(sc, t), sc.initial_osc, osc) >= 0.7 * 1.3 / 2


def test_uncoupled_coherent_energy():
    sc = desk_scenario(CoherentState(0.8), drive=ConstantDrive(0.2))
    sc = type(sc)(sc.oscillator, BathSpec.from_arrays([0.8, 1.3], [0.0, 0.0]), sc.drive, sc.initial_osc, sc.bath_state)
    t = 2.2
    c = coeffs(sc, t)
    expected = abs(0.8 * cmath.exp(-1j * t) - 1j * c.zeta) ** 2 + 0.5
    assert abs(energy(c, sc.initial_osc, sc.oscillator) - expected) < 1e-14


def test_printed_energy_keeps_its_own_form():
    sc = desk_scenario(NumberState(1))
    c = coeffs(sc, 1.5)
    x = 2.0 * DESK_BATH.omegas / 2
    by_hand = abs(c.G) ** 2 * 1.5 + abs(c.zeta) ** 2 + np.sum(np.abs(c.M) ** 2 / np.tanh(x))
    assert abs(energy_as_printed(c, NumberState(1), sc.oscillator, DESK_BATH, 2.0) - by_hand) < 1e-14


# --- heat -------------------------------------------------------------------


def test_heat_vanishes_at_t0():
    sc = desk_scenario(NumberState(2))
    assert abs(mean_heat(coeffs(sc, 0.0), DESK_BATH, 2.0, sc.initial_osc).mean_Q) < 1e-15


def test_uncoupled_bath_heat_is_exactly_zero():
    bath = BathSpec.from_arrays([0.8, 1.3], [0.0, 0.0])
    sc = desk_scenario(NumberState(2))
    sc = type(sc)(sc.oscillator, bath, sc.drive, sc.initial_osc, sc.bath_state)
    for t in (0.3, 2.0, 17.0):
        assert mean_heat(coeffs(sc, t), bath, 2.0, sc.initial_osc).mean_Q == 0.0


@pytest.mark.parametrize("n", [0, 1, 3])
def test_zero_temperature_heat(n):
    sc = desk_scenario(NumberState(n), drive=ZeroDrive(), beta=math.inf)
    for t in (0.5, 2.0, 9.0):
        c = coeffs(sc, t)
        expected = n * np.sum(DESK_BATH.omegas * np.abs(c.Gamma) ** 2)
        assert abs(mean_heat(c, DESK_BATH, math.inf, sc.initial_osc).mean_Q - expected) < 1e-12


def test_printed_heat_differs_by_initial_bath_energy():
    sc = desk_scenario(NumberState(1))
    c = coeffs(sc, 1.0)
    fixed = mean_heat(c, DESK_BATH, 2.0, sc.initial_osc).mean_Q
    printed = mean_heat(c, DESK_BATH, 2.0, sc.initial_osc, as_printed=True).mean_Q
    assert abs(printed - fixed - np.sum(DESK_BATH.omegas * thermal_occupation(DESK_BATH.omegas, 2.0))) < 1e-14


# oracle <H_R(2)> - <H_R(0)>, Number(1), zero drive, cutoffs (12, 11, 11)
DESK_NUMBER1_HEAT_T2 = 0.09537636274608613


def test_heat_matches_frozen_oracle():
    sc = desk_scenario(NumberState(1), drive=ZeroDrive())
    assert abs(mean_heat(coeffs(sc, 2.0), DESK_BATH, 2.0, sc.initial_osc).mean_Q - DESK_NUMBER1_HEAT_T2) < 1e-6


@given(st.permutations(range(4)), st.integers(0, 1000), st.floats(0.1, 15))
def test_heat_is_invariant_under_mode_relabelling(perm, seed, t):
    bath = random_bath(np.random.default_rng(seed), 4)
    shuffled = BathSpec(tuple(bath.modes[i] for i in perm))
    osc = OscillatorSpec(1.0)
    init = NumberState(2)
    a = mean_heat(Propagator(osc, bath, ConstantDrive(0.1), ThermalBathState(1.0)).coefficients(t), bath, 1.0, init)
    b = mean_heat(Propagator(osc, shuffled, ConstantDrive(0.1), ThermalBathState(1.0)).coefficients(t), shuffled, 1.0, init)
    assert abs(a.mean_Q - b.mean_Q) < 1e-12
    assert np.allclose(a.per_mode_contributions[list(perm)], b.per_mode_contributions, atol=1e-12)


def test_closed_system_conserves_excitations():
    """Without drive, total excitation number is conserved: <N> + sum_j <n_j> is constant."""
    sc = desk_scenario(NumberState(2), drive=ZeroDrive(), beta=1.0)
    nbar = thermal_occupation(DESK_BATH.omegas, 1.0)
    for t in (0.7, 4.0):
        c = coeffs(sc, t)
        total = mean_number(c, sc.initial_osc) + np.sum(bath_occupations(c, DESK_BATH, 1.0, sc.initial_osc))
        assert abs(total - (2 + np.sum(nbar))) < 1e-12
