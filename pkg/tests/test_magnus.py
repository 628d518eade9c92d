import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from heisenberg_oqs import BathSpec, OscillatorSpec, Propagator, ThermalBathState
from heisenberg_oqs.errors import QuadratureNonConvergence
from heisenberg_oqs.magnus import (
    GeneratorFunction,
    MagnusTerms,
    heisenberg_evolve,
    magnus_evolve,
    magnus_propagator,
    magnus_terms,
    one_particle_generator,
    synthetic_from_unitary,
    unitarity_defect,
)
from heisenberg_oqs.oracle import fine_step_propagator

from conftest import DESK_BATH

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])


def driven_qubit(lam=0.8, Omega=2.0):
    return GeneratorFunction(lambda t: 0.5 * SZ + lam * math.cos(Omega * t) * SX, 2)


def random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (x + x.conj().T)


def test_constant_generator_terms():
    H = random_hermitian(np.random.default_rng(0), 3)
    terms = magnus_terms(GeneratorFunction(lambda t: H, 3), 0.7)
    assert np.max(np.abs(terms.u1 + 1j * 0.7 * H)) < 1e-14
    assert np.max(np.abs(terms.u2)) < 1e-14
    assert np.max(np.abs(terms.u3)) < 1e-14


def test_order_one_is_exact_for_constant_generator():
    H = random_hermitian(np.random.default_rng(1), 4)
    U = magnus_propagator(magnus_terms(GeneratorFunction(lambda t: H, 4), 1.3, order=1))
    assert np.max(np.abs(U - expm(-1j * 1.3 * H))) < 1e-13


def test_commuting_family_collapses_orders():
    A = np.array([[0.0, 1.0 - 0.5j], [1.0 + 0.5j, 0.3]])
    gen = GeneratorFunction(lambda t: (1 + math.sin(3 * t)) * A, 2)
    terms = magnus_terms(gen, 1.1)
    assert np.max(np.abs(terms.u2)) < 1e-13 and np.max(np.abs(terms.u3)) < 1e-13
    U1, U3 = (magnus_propagator(magnus_terms(gen, 1.1, order=k)) for k in (1, 3))
    assert np.max(np.abs(U1 - U3)) < 1e-12


def test_zero_exponent_is_identity():
    z = np.zeros((3, 3), dtype=complex)
    terms = MagnusTerms(z, z, z, (0.0, 0.0, 0.0), 0.0, 0.0, 3)
    assert np.array_equal(magnus_propagator(terms), np.eye(3))
    assert np.array_equal(magnus_terms(driven_qubit(), 0.0).exponent, np.zeros((2, 2)))


def test_short_step_matches_fine_product():
    gen = driven_qubit()
    ref = fine_step_propagator(gen, 0.1, 10_000)
    errs = [np.linalg.norm(magnus_propagator(magnus_terms(gen, 0.1, order=k)) - ref, 2) for k in (1, 2, 3)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-8


def test_single_step_error_falls_faster_than_h4():
    gen = driven_qubit()
    hs = [0.2, 0.1, 0.05, 0.025]
    errs = [np.linalg.norm(magnus_propagator(magnus_terms(gen, h)) - fine_step_propagator(gen, h, 4000), 2) for h in hs]
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope > 4.5


@given(st.integers(0, 10_000), st.integers(1, 3), st.floats(0.01, 3.0), st.integers(2, 4))
def test_unitarity_at_every_order(seed, order, t, d):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(rng, d), random_hermitian(rng, d)
    gen = GeneratorFunction(lambda s: A + math.sin(2 * s) * B, d)
    assert unitarity_defect(magnus_evolve(gen, t, order, quad_tol=1e-10)) <= 1e-12


@given(st.integers(0, 10_000), st.floats(0.01, 2.0))
def test_conjugation_preserves_spectrum(seed, t):
    rng = np.random.default_rng(seed)
    A0 = random_hermitian(rng, 3)
    B = random_hermitian(rng, 3)
    gen = GeneratorFunction(lambda s: B * math.cos(s) + np.diag([0.0, 1.0, 2.0]), 3)
    out = heisenberg_evolve(A0, magnus_terms(gen, t, quad_tol=1e-10))
    assert np.max(np.abs(out - out.conj().T)) < 1e-12
    assert np.max(np.abs(np.linalg.eigvalsh(out) - np.linalg.eigvalsh(A0))) < 1e-10


def test_heisenberg_evolve_trivial_cases():
    H = random_hermitian(np.random.default_rng(4), 3)
    terms = magnus_terms(GeneratorFunction(lambda t: H, 3), 0.9)
    assert np.max(np.abs(heisenberg_evolve(np.eye(3), terms) - np.eye(3))) < 1e-14
    assert np.max(np.abs(heisenberg_evolve(H, terms) - H)) < 1e-13


def test_driven_sigma_z_against_fine_conjugation():
    gen = driven_qubit()
    ref = fine_step_propagator(gen, 0.05, 10_000)
    out = heisenberg_evolve(SZ, magnus_terms(gen, 0.05))
    assert np.max(np.abs(out - ref.conj().T @ SZ @ ref)) < 1e-9


def test_non_smooth_generator_can_exhaust_the_quadrature():
    gen = GeneratorFunction(lambda t: SZ if t < 1 / math.pi else SX, 2, smooth=False)
    with pytest.raises(QuadratureNonConvergence):
        magnus_terms(gen, 1.0, order=1, quad_tol=1e-14)


def test_bad_arguments():
    with pytest.raises(ValueError):
        magnus_terms(driven_qubit(), 1.0, order=4)
    with pytest.raises(ValueError):
        magnus_terms(driven_qubit(), 0.5, t0=1.0)


def test_one_particle_generator_reproduces_propagator():
    osc = OscillatorSpec(1.0)
    gen = one_particle_generator(osc, DESK_BATH)
    U = magnus_evolve(gen, 3.0, order=1)
    prop = Propagator(osc, DESK_BATH, bath_state=ThermalBathState(1.0))
    c = prop.coefficients(3.0)
    assert abs(U[0, 0] - c.G) < 1e-12
    syn = synthetic_from_unitary(U, DESK_BATH, 1.0)
    assert abs(syn.eta - c.eta) < 1e-12


def test_switched_coupling_leaves_oscillator_alone_until_switch_on():
    osc = OscillatorSpec(1.0)
    gen = one_particle_generator(osc, DESK_BATH, coupling_envelope=lambda t: 0.0)
    U = magnus_evolve(gen, 2.0)
    assert abs(U[0, 0] - np.exp(-2j)) < 1e-12
    assert synthetic_from_unitary(U, DESK_BATH, 2.0).eta < 1e-24
