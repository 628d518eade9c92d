"""Scenario <-> JSON document.

Layout::

    {
      "oscillator": {"omega0": 1.0, "hbar": 1.0},
      "bath": {"modes": [{"omega": 0.8, "f": [0.15, 0.0]}, ...]},
      "drive": {"kind": "constant", "K0": [0.05, 0.0]},
      "initial_osc": {"kind": "coherent", "alpha": [0.6, 0.0]},
      "bath_state": {"beta": 2.0},                  # or "inf"
      "numerics": {"fock_cutoff_osc": 16, "series_tol": 1e-13,
                   "series_smax": 400, "quadrature_tol": 1e-10}
    }

Drive kinds: ``zero``, ``constant`` (K0), ``harmonic`` (K0, Omega, phase),
``gaussian`` (K0, t0, sigma, Omega), ``piecewise`` (table of [t_start, [re, im]]).
Initial kinds: ``number`` (k), ``coherent`` (alpha), ``fock_matrix`` (rho0 as
nested [re, im] pairs). Complex numbers are always two-element arrays.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import (
    BAD_PARAMETER,
    BathMode,
    BathSpec,
    CoherentState,
    ConstantDrive,
    FockMatrixState,
    GaussianPulse,
    HarmonicDrive,
    NumberState,
    Numerics,
    OscillatorSpec,
    PiecewiseConstantDrive,
    Scenario,
    ThermalBathState,
    Violation,
    ZeroDrive,
)


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _z(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(float(re), float(im))


def _drive_to_dict(drive) -> dict:
    if isinstance(drive, ZeroDrive):
        return {"kind": "zero"}
    if isinstance(drive, ConstantDrive):
        return {"kind": "constant", "K0": _c(drive.K0)}
    if isinstance(drive, HarmonicDrive):
        return {"kind": "harmonic", "K0": _c(drive.K0), "Omega": drive.Omega, "phase": drive.phase}
    if isinstance(drive, GaussianPulse):
        return {"kind": "gaussian", "K0": _c(drive.K0), "t0": drive.t0, "sigma": drive.sigma, "Omega": drive.Omega}
    if isinstance(drive, PiecewiseConstantDrive):
        return {"kind": "piecewise", "table": [[t, _c(k)] for t, k in drive.table]}
    raise TypeError(f"cannot serialise drive {type(drive).__name__}")


def _drive_from_dict(d: dict):
    kind = d.get("kind", "zero")
    if kind == "zero":
        return ZeroDrive()
    if kind == "constant":
        return ConstantDrive(_z(d["K0"]))
    if kind == "harmonic":
        return HarmonicDrive(_z(d["K0"]), float(d["Omega"]), float(d.get("phase", 0.0)))
    if kind == "gaussian":
        return GaussianPulse(_z(d["K0"]), float(d["t0"]), float(d["sigma"]), float(d.get("Omega", 0.0)))
    if kind == "piecewise":
        return PiecewiseConstantDrive(tuple((float(t), _z(k)) for t, k in d["table"]))
    raise ValueError(f"unknown drive kind {kind!r}")


def _initial_to_dict(state) -> dict:
    if isinstance(state, NumberState):
        return {"kind": "number", "k": int(state.k)}
    if isinstance(state, CoherentState):
        return {"kind": "coherent", "alpha": _c(state.alpha)}
    if isinstance(state, FockMatrixState):
        return {"kind": "fock_matrix", "rho0": [[_c(v) for v in row] for row in state.rho0]}
    raise TypeError(f"cannot serialise initial state {type(state).__name__}")


def _initial_from_dict(d: dict):
    kind = d["kind"]
    if kind == "number":
        return NumberState(int(d["k"]))
    if kind == "coherent":
        return CoherentState(_z(d["alpha"]))
    if kind == "fock_matrix":
        return FockMatrixState(np.array([[_z(v) for v in row] for row in d["rho0"]], dtype=complex))
    raise ValueError(f"unknown initial_osc kind {kind!r}")


def scenario_to_dict(scenario: Scenario) -> dict:
    beta = scenario.bath_state.beta
    num = scenario.numerics
    return {
        "oscillator": {"omega0": scenario.oscillator.omega0, "hbar": scenario.oscillator.hbar},
        "bath": {"modes": [{"omega": m.omega, "f": _c(m.f)} for m in scenario.bath.modes]},
        "drive": _drive_to_dict(scenario.drive),
        "initial_osc": _initial_to_dict(scenario.initial_osc),
        "bath_state": {"beta": "inf" if math.isinf(beta) else beta},
        "numerics": {
            "fock_cutoff_osc": num.fock_cutoff_osc,
            "series_tol": num.series_tol,
            "series_smax": num.series_smax,
            "quadrature_tol": num.quadrature_tol,
        },
    }


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario; malformed documents raise ValidationError."""
    try:
        osc = doc["oscillator"]
        bath = doc.get("bath", {"modes": []})
        beta = doc.get("bath_state", {}).get("beta", "inf")
        num = doc.get("numerics", {})
        defaults = Numerics()
        return Scenario(
            oscillator=OscillatorSpec(float(osc["omega0"]), float(osc.get("hbar", 1.0))),
            bath=BathSpec(tuple(BathMode(float(m["omega"]), _z(m["f"])) for m in bath["modes"])),
            drive=_drive_from_dict(doc.get("drive", {"kind": "zero"})),
            initial_osc=_initial_from_dict(doc.get("initial_osc", {"kind": "number", "k": 0})),
            bath_state=ThermalBathState(math.inf if beta in ("inf", "Infinity") else float(beta)),
            numerics=Numerics(
                int(num.get("fock_cutoff_osc", defaults.fock_cutoff_osc)),
                float(num.get("series_tol", defaults.series_tol)),
                int(num.get("series_smax", defaults.series_smax)),
                float(num.get("quadrature_tol", defaults.quadrature_tol)),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError([Violation(BAD_PARAMETER, "document", f"malformed scenario: {exc!r}")]) from exc


def dumps(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2, allow_nan=False) + "\n"


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError([Violation(BAD_PARAMETER, "document", f"invalid JSON: {exc}")]) from exc
    return scenario_from_dict(doc)


def load(path) -> Scenario:
    return loads(Path(path).read_text())


def dump(scenario: Scenario, path) -> None:
    Path(path).write_text(dumps(scenario))
