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
    GaussianPulse,
    HarmonicDrive,
    NumberState,
    OscillatorSpec,
    PiecewiseConstantDrive,
    Scenario,
    SyntheticCoefficients,
    ThermalBathState,
    ValidationError,
    ZeroDrive,
    validate,
)
from heisenberg_oqs.model import drive_is_zero, drive_value, find_violations, thermal_occupation


def codes(scenario):
    return {v.code for v in find_violations(scenario)}


def test_minimal_scenario_is_valid():
    sc = Scenario(OscillatorSpec(1.0))
    assert validate(sc) is sc


def test_negative_frequency_is_reported_with_field():
    with pytest.raises(ValidationError) as info:
        validate(Scenario(OscillatorSpec(-1.0)))
    (v,) = info.value.violations
    assert v.code == "NonPositiveFrequency"
    assert v.field == "oscillator.omega0"


def test_bath_frequency_must_be_positive():
    sc = Scenario(OscillatorSpec(1.0), BathSpec.from_arrays([0.5, 0.0], [0.1, 0.1]))
    assert codes(sc) == {"NonPositiveFrequency"}


def test_fock_matrix_with_short_trace():
    sc = Scenario(OscillatorSpec(1.0), initial_osc=FockMatrixState(np.diag([0.5, 0.3])))
    assert "NonNormalizedInitialState" in codes(sc)


def test_fock_matrix_must_be_hermitian():
    rho = np.array([[0.5, 0.2], [0.1, 0.5]])
    assert "NonHermitianInitialState" in codes(Scenario(OscillatorSpec(1.0), initial_osc=FockMatrixState(rho)))


def test_piecewise_table_must_start_at_zero_and_increase():
    bad_start = PiecewiseConstantDrive(((0.5, 1.0),))
    unordered = PiecewiseConstantDrive(((0.0, 1.0), (2.0, 0.5), (1.0, 0.2)))
    for drive in (bad_start, unordered):
        assert codes(Scenario(OscillatorSpec(1.0), drive=drive)) == {"BadPiecewiseTable"}


def test_violations_accumulate():
    sc = Scenario(OscillatorSpec(0.0), drive=GaussianPulse(1.0, 0.0, -1.0), bath_state=ThermalBathState(-1.0))
    assert len(find_violations(sc)) == 3


def test_synthetic_coefficients_reject_gain_and_negative_eta():
    with pytest.raises(ValidationError):
        SyntheticCoefficients(G=1.1)
    with pytest.raises(ValidationError):
        SyntheticCoefficients(G=0.5, eta=-0.1)
    assert SyntheticCoefficients(G=1.0).eta == 0.0


def test_drive_values():
    assert drive_value(ZeroDrive(), 3.0) == 0
    assert drive_value(ConstantDrive(0.5), 7.0) == 0.5
    assert abs(drive_value(HarmonicDrive(1.0, 2.0), math.pi / 2) - (-1.0)) < 1e-15
    pulse = GaussianPulse(2.0, t0=1.0, sigma=0.5)
    assert drive_value(pulse, 1.0) == 2.0
    assert abs(drive_value(pulse, 1.5) - 2.0 * math.exp(-0.5)) < 1e-15


def test_piecewise_holds_each_value_until_next_start():
    drive = PiecewiseConstantDrive(((0.0, 1.0), (1.0, 2j), (3.0, 0.0)))
    assert [drive_value(drive, t) for t in (0.0, 0.99, 1.0, 2.5, 3.0, 9.0)] == [1, 1, 2j, 2j, 0, 0]


def test_drive_is_zero():
    assert drive_is_zero(ZeroDrive())
    assert drive_is_zero(ConstantDrive(0.0))
    assert drive_is_zero(PiecewiseConstantDrive(((0.0, 0.0), (1.0, 0.0))))
    assert not drive_is_zero(HarmonicDrive(0.1, 1.0))


def test_thermal_occupation_limits():
    assert thermal_occupation(1.0, math.inf) == 0.0
    # beta hbar omega = ln 2 gives 1/(2 - 1)
    assert abs(thermal_occupation(1.0, math.log(2.0)) - 1.0) < 1e-15


def test_fock_state_is_immutable_and_hashable():
    s = FockMatrixState(np.eye(2) / 2)
    with pytest.raises(ValueError):
        s.rho0[0, 0] = 1.0
    assert s == FockMatrixState(np.eye(2) / 2)
    assert hash(s) == hash(FockMatrixState(np.eye(2) / 2))


scenarios = st.builds(
    Scenario,
    oscillator=st.builds(OscillatorSpec, st.floats(-2, 3), st.floats(0.1, 2)),
    bath=st.builds(
        BathSpec.from_arrays,
        st.lists(st.floats(-1, 3), max_size=3),
        st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
    ),
    drive=st.one_of(st.just(ZeroDrive()), st.builds(ConstantDrive, st.floats(-1, 1))),
    initial_osc=st.one_of(st.builds(NumberState, st.integers(0, 5)), st.builds(CoherentState, st.floats(-2, 2))),
    bath_state=st.builds(ThermalBathState, st.one_of(st.just(math.inf), st.floats(-1, 5))),
)


@given(scenarios)
def test_validate_is_idempotent(sc):
    problems = find_violations(sc)
    if problems:
        with pytest.raises(ValidationError):
            validate(sc)
    else:
        assert validate(validate(sc)) == validate(sc)


@given(st.floats(0, 10), st.floats(0.01, 0.99))
def test_piecewise_drive_is_constant_inside_a_segment(t, frac):
    drive = PiecewiseConstantDrive(((0.0, 0.3), (2.0, -1j), (5.0, 0.7)))
    edges = [0.0, 2.0, 5.0, 12.0]
    k = max(i for i, e in enumerate(edges[:-1]) if e <= t)
    inside = edges[k] + frac * (edges[k + 1] - edges[k])
    assert drive_value(drive, t) == drive_value(drive, inside)
