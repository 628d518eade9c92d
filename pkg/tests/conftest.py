import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from heisenberg_oqs import (
    BathSpec,
    CoherentState,
    ConstantDrive,
    NumberState,
    OscillatorSpec,
    Scenario,
    ThermalBathState,
)

settings.register_profile("repo", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


DESK_BATH = BathSpec.from_arrays([0.8, 1.3], [0.15, 0.1])


def desk_scenario(initial, drive=None, beta=2.0):
    """Two-mode bath at beta = 2 used across the equivalence tests."""
    return Scenario(
        OscillatorSpec(1.0),
        DESK_BATH,
        ConstantDrive(0.05) if drive is None else drive,
        initial,
        ThermalBathState(beta),
    )


@pytest.fixture
def desk_coherent():
    return desk_scenario(CoherentState(0.6))


@pytest.fixture
def desk_number():
    return desk_scenario(NumberState(2))


def random_bath(rng: np.random.Generator, n: int) -> BathSpec:
    return BathSpec.from_arrays(rng.uniform(0.3, 2.5, n), rng.normal(0, 0.2, n) + 1j * rng.normal(0, 0.2, n))


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


PI = math.pi


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
