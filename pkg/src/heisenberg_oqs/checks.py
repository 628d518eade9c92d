"""Invariant suite run by ``heisenberg-oqs validate``.

Each check returns a CheckResult with the measured value and the bound it
was held to. Scenario-independent closed-form limits run every time. The
oracle comparison only runs when the Fock box fits under ``oracle_cap``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle
from .errors import DimensionOverflow
from .model import CoherentState, ConstantDrive, NumberState, Scenario, SyntheticCoefficients, ZeroDrive, find_violations
from .observables import mean_number
from .propagator import Propagator
from .reduced_density import (
    InitialMoments,
    coherent_element_closed_form,
    rho_element,
    rho_matrix_auto,
    rho_matrix_from_coefficients,
    transition_probability,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: {self.value:.3e} (bound {self.bound:.1e})"


def _le(name, value, bound) -> CheckResult:
    return CheckResult(name, bool(value <= bound), float(value), float(bound))


def closed_form_limits() -> list[CheckResult]:
    out = []
    half = SyntheticCoefficients(G=math.sqrt(0.5))
    out.append(_le("binomial P(2->1) at |G|^2 = 1/2", abs(transition_probability(2, 1, half) - 0.5), 1e-10))
    kick = SyntheticCoefficients(G=0.0, zeta=1.0)
    vac = InitialMoments(NumberState(0))
    err = max(abs(rho_element(n, n, kick, vac).real - math.exp(-1) / math.factorial(n)) for n in range(6))
    out.append(_le("Poisson P(0->n) at |zeta|^2 = 1", err, 1e-10))
    hot = SyntheticCoefficients(G=0.0, eta=1.0)
    err = max(abs(rho_element(n, n, hot, vac).real - 0.5 ** (n + 1)) for n in range(6))
    out.append(_le("geometric populations at eta = 1", err, 1e-10))
    return out


def scenario_checks(scenario: Scenario, times=None, oracle_cap: int = 2000) -> list[CheckResult]:
    times = np.linspace(0.0, 20.0, 50) if times is None else np.asarray(times, float)
    problems = find_violations(scenario)
    out = [CheckResult("scenario validation", not problems, float(len(problems)), 0.0)]
    if problems:
        return out

    prop = Propagator.from_scenario(scenario)
    coeffs = [prop.coefficients(t) for t in times]
    out.append(_le("oscillator sum rule", max(c.sum_rule_defect for c in coeffs), 1e-10))
    out.append(_le("bath sum rule", max(c.bath_sum_rule_defect for c in coeffs), 1e-10))

    worst = 0.0
    for c in coeffs[:: max(1, len(coeffs) // 5)]:
        G, M, Gam, Lam = oracle.single_excitation_check(prop.h, c.t)
        worst = max(worst, abs(G - c.G), *(np.abs(M - c.M)), *(np.abs(Gam - c.Gamma)), np.max(np.abs(Lam - c.Lambda), initial=0.0))
    out.append(_le("propagator vs dense exponential", worst, 1e-11))

    init = scenario.initial_osc
    moments = InitialMoments(init)
    probe = [t for t in (0.5, 2.0) if t <= times.max()] or [float(times[-1])]
    herm = deficit = excess = neg = ident = 0.0
    for t in probe:
        c = prop.coefficients(t)
        rho = rho_matrix_auto(c, moments, scenario.numerics, leak_target=1e-12, max_dim=80)
        herm = max(herm, rho.hermiticity_defect)
        deficit = max(deficit, 1.0 - rho.trace)
        excess = max(excess, rho.trace - 1.0)
        neg = max(neg, -rho.min_eigenvalue_estimate)
        ident = max(ident, abs(float(np.arange(rho.dim) @ rho.populations) - mean_number(c, init)))
    out.append(_le("hermiticity", herm, 1e-9))
    out.append(_le("trace deficit", deficit, 1e-6))
    out.append(_le("trace excess", excess, 1e-9))
    out.append(_le("negative eigenvalue", neg, 1e-8))
    out.append(_le("sum n rho_nn vs <a^dag a>", ident, 1e-8))

    if scenario.bath.n_modes == 0 and isinstance(init, CoherentState):
        err = 0.0
        for t in probe:
            c = prop.coefficients(t)
            for n in range(6):
                for m in range(6):
                    exact = coherent_element_closed_form(n, m, init.alpha, c.G, c.zeta)
                    err = max(err, abs(rho_element(n, m, c, moments, scenario.numerics, "series") - exact))
        out.append(_le("isolated coherent closed form", err, 1e-10))

    try:
        space = oracle.FockSpace.for_scenario(scenario, cap=oracle_cap)
    except DimensionOverflow:
        return out
    if isinstance(init, NumberState) and init.k >= space.d_osc:
        return out
    diff = 0.0
    for t in probe:
        ref, _ = oracle.converged_reduced_density(scenario, t, space, 1e-4, n_steps=1 if stepwise_free(scenario) else 64)
        mine = rho_matrix_from_coefficients(prop.coefficients(t), moments, ref.dim, scenario.numerics)
        diff = max(diff, float(np.max(np.abs(mine.elems - ref.elems))))
    out.append(_le("oracle equivalence", diff, 5e-4))
    return out


def stepwise_free(scenario: Scenario) -> bool:
    """True when the drive is constant in time, so one exponential is exact."""
    return isinstance(scenario.drive, (ZeroDrive, ConstantDrive))


def run_all(scenario: Scenario, **kwargs) -> list[CheckResult]:
    return scenario_checks(scenario, **kwargs) + closed_form_limits()
