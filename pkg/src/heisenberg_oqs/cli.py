"""Command-line front end: ``heisenberg-oqs <command> --scenario FILE ...``.

Exit codes: 0 success, 2 invalid scenario or request, 3 numerical
non-convergence or a failed check, 4 Fock-space dimension overflow.

CSV layout: ``# key=value`` metadata lines, one header row, then data rows.
Floats carry 17 significant digits. JSON output wraps the same table as
``{"command", "metadata", "columns", "rows"}``.

Columns per command:
  coefficients  t, re_G, im_G, abs_G2, sum_Mj2, leakage, eta, re_zeta, im_zeta
  rho           t, n, m, re, im
  probabilities t, n, p
  observables   t, mean_number, energy
  heat          t, mean_Q, then one heat_j column per bath mode
  wigner        x, p, w
  magnus-demo   order, step, error, unitarity_defect
  validate      check, passed, value, bound
With ``--oracle`` the brute-force value and the difference are appended as extra columns.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import checks, oracle, serialization
from .errors import DimensionOverflow, NumericalError, ProbabilityVectorInvalid, ValidationError
from .magnus import GeneratorFunction, magnus_evolve, unitarity_defect
from .model import (
    BAD_PARAMETER,
    NumberState,
    OscillatorSpec,
    Scenario,
    SyntheticCoefficients,
    Violation,
    validate,
)
from .observables import energy, energy_as_printed, mean_heat, mean_number
from .propagator import Propagator
from .reduced_density import InitialMoments, rho_element_estimate, rho_matrix_from_coefficients
from .spectral import SHAPES, discretize
from .wigner import default_axes, wigner_grid_from_rho

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_OVERFLOW = 0, 2, 3, 4


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


class Table:
    def __init__(self, command: str, columns: list[str], metadata: dict | None = None):
        self.command = command
        self.columns = columns
        self.metadata = {"version": _version(), **(metadata or {})}
        self.rows: list[list] = []

    def add(self, *values):
        self.rows.append([_plain(v) for v in values])

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}={_fmt(v)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"command": self.command, "metadata": self.metadata, "columns": self.columns, "rows": self.rows}
        return json.dumps(doc, indent=1) + "\n"


def _plain(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int, bool)):
        return v if isinstance(v, bool) else int(v)
    return v


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _request_error(message: str) -> ValidationError:
    return ValidationError([Violation(BAD_PARAMETER, "request", message)])


def _times(args) -> np.ndarray:
    if args.t is not None:
        if args.t < 0:
            raise _request_error("t must be >= 0")
        return np.array([args.t])
    if not (args.t1 >= args.t0 >= 0 and args.n >= 1):
        raise _request_error("need t1 >= t0 >= 0 and n >= 1")
    return np.linspace(args.t0, args.t1, args.n)


def _scenario(args) -> Scenario:
    if args.scenario is None:
        raise _request_error("--scenario is required for this command")
    return validate(serialization.load(args.scenario))


def _synthetic(args) -> SyntheticCoefficients | None:
    if not args.synthetic:
        return None
    try:
        g_re, g_im, z_re, z_im, eta = (float(v) for v in args.synthetic.split(","))
    except ValueError as exc:
        raise _request_error("--synthetic expects G_re,G_im,zeta_re,zeta_im,eta") from exc
    return SyntheticCoefficients(complex(g_re, g_im), complex(z_re, z_im), eta)


def _coefficient_stream(args, scenario):
    """(t, coeffs) pairs, from the dynamics or from --synthetic."""
    synth = _synthetic(args)
    if synth is not None:
        if args.oracle:
            raise _request_error("--oracle needs the dynamics; it cannot be combined with --synthetic")
        return [(float("nan"), synth)]
    prop = Propagator.from_scenario(scenario)
    return [(float(t), prop.coefficients(t)) for t in _times(args)]


def _numerics_meta(scenario) -> dict:
    num = scenario.numerics
    return {"series_tol": num.series_tol, "series_smax": num.series_smax, "quadrature_tol": num.quadrature_tol}


def _oracle_rho(scenario, t):
    space = oracle.FockSpace.for_scenario(scenario)
    n_steps = 1 if checks.stepwise_free(scenario) else 64
    ref, _ = oracle.converged_reduced_density(scenario, t, space, 1e-4, n_steps=n_steps)
    return ref


def cmd_coefficients(args) -> Table:
    sc = _scenario(args)
    if args.synthetic:
        raise _request_error("coefficients come from the dynamics; --synthetic is not supported")
    tab = Table("coefficients", ["t", "re_G", "im_G", "abs_G2", "sum_Mj2", "leakage", "eta", "re_zeta", "im_zeta"], _numerics_meta(sc))
    for t, c in _coefficient_stream(args, sc):
        m2 = math.fsum(np.abs(c.M) ** 2)
        tab.add(t, c.G.real, c.G.imag, abs(c.G) ** 2, m2, c.sum_rule_defect, c.eta, c.zeta.real, c.zeta.imag)
    return tab


def _parse_element(spec: str) -> tuple[int, int]:
    try:
        n, m = (int(v) for v in spec.split(","))
    except ValueError as exc:
        raise _request_error("--element expects n,m") from exc
    if n < 0 or m < 0:
        raise _request_error("element indices must be >= 0")
    return n, m


def cmd_rho(args) -> Table:
    sc = _scenario(args)
    dim = args.dim or sc.numerics.fock_cutoff_osc
    moments = InitialMoments(sc.initial_osc)
    cols = ["t", "n", "m", "re", "im"] + (["oracle_re", "oracle_im", "abs_diff"] if args.oracle else [])
    tab = Table("rho", cols, {**_numerics_meta(sc), "dim": dim})
    worst = 0.0
    for t, c in _coefficient_stream(args, sc):
        ref = _oracle_rho(sc, t) if args.oracle else None
        if args.element:
            n, m = _parse_element(args.element)
            res = rho_element_estimate(n, m, c, moments, sc.numerics)
            entries = [((n, m), res.value)]
            worst = max(worst, res.error)
        else:
            rho = rho_matrix_from_coefficients(c, moments, dim, sc.numerics)
            worst = max(worst, rho.max_error_estimate)
            entries = [((n, m), rho.elems[n, m]) for n in range(dim) for m in range(dim)]
        for (n, m), v in entries:
            row = [t, n, m, v.real, v.imag]
            if ref is not None:
                r = ref.elems[n, m] if max(n, m) < ref.dim else 0j
                row += [r.real, r.imag, abs(v - r)]
            tab.add(*row)
    tab.metadata["max_error_estimate"] = worst
    return tab


def cmd_probabilities(args) -> Table:
    sc = _scenario(args)
    dim = args.dim or sc.numerics.fock_cutoff_osc
    moments = InitialMoments(sc.initial_osc)
    tab = Table("probabilities", ["t", "n", "p"] + (["oracle_p", "abs_diff"] if args.oracle else []), {**_numerics_meta(sc), "dim": dim})
    leak = 0.0
    for t, c in _coefficient_stream(args, sc):
        rho = rho_matrix_from_coefficients(c, moments, dim, sc.numerics)
        leak = max(leak, rho.leakage)
        ref = _oracle_rho(sc, t) if args.oracle else None
        for n, p in enumerate(rho.populations):
            row = [t, n, p]
            if ref is not None:
                r = ref.populations[n] if n < ref.dim else 0.0
                row += [r, abs(p - r)]
            tab.add(*row)
    tab.metadata["max_leakage"] = leak
    return tab


def cmd_observables(args) -> Table:
    sc = _scenario(args)
    printed = args.as_printed
    if printed and not isinstance(sc.initial_osc, NumberState):
        raise _request_error("--as-printed energy is defined for number states only")
    cols = ["t", "mean_number", "energy"] + (["oracle_mean_number", "abs_diff"] if args.oracle else [])
    tab = Table("observables", cols, {**_numerics_meta(sc), "energy_form": "as_printed" if printed else "corrected"})
    space = oracle.FockSpace.for_scenario(sc) if args.oracle else None
    for t, c in _coefficient_stream(args, sc):
        n = mean_number(c, sc.initial_osc)
        if printed:
            e = energy_as_printed(c, sc.initial_osc, sc.oscillator, sc.bath, sc.bath_state.beta)
        else:
            e = energy(c, sc.initial_osc, sc.oscillator)
        row = [t, n, e]
        if space is not None:
            ref, _ = oracle.converged_value(oracle.mean_number, sc, t, space, 1e-5, 1 if checks.stepwise_free(sc) else 64)
            row += [ref, abs(n - ref)]
        tab.add(*row)
    return tab


def cmd_heat(args) -> Table:
    sc = _scenario(args)
    if args.synthetic:
        raise _request_error("heat needs the full bath coefficients; --synthetic is not supported")
    modes = [f"heat_{j}" for j in range(sc.bath.n_modes)]
    cols = ["t", "mean_Q"] + modes + (["oracle_mean_Q", "abs_diff"] if args.oracle else [])
    tab = Table("heat", cols, {**_numerics_meta(sc), "heat_form": "as_printed" if args.as_printed else "corrected"})
    space = oracle.FockSpace.for_scenario(sc) if args.oracle else None
    for t, c in _coefficient_stream(args, sc):
        hs = mean_heat(c, sc.bath, sc.bath_state.beta, sc.initial_osc, sc.hbar, as_printed=args.as_printed)
        row = [t, hs.mean_Q, *hs.per_mode_contributions]
        if space is not None:
            ref, _ = oracle.converged_value(oracle.mean_heat, sc, t, space, 1e-5, 1 if checks.stepwise_free(sc) else 64)
            row += [ref, abs(hs.mean_Q - ref)]
        tab.add(*row)
    return tab


def cmd_wigner(args) -> Table:
    sc = _scenario(args)
    ts = _times(args)
    if len(ts) != 1:
        raise _request_error("wigner takes a single time; use --t")
    dim = args.dim or sc.numerics.fock_cutoff_osc
    c = _synthetic(args) or Propagator.from_scenario(sc).coefficients(ts[0])
    moments = InitialMoments(sc.initial_osc)
    rho = rho_matrix_from_coefficients(c, moments, dim, sc.numerics)
    hb, w0 = sc.hbar, sc.oscillator.omega0
    # centre the grid on <a>_t
    a_mean = complex(c.G) * moments(0, 1) - 1j * complex(c.zeta)
    center = (math.sqrt(2 * hb / w0) * a_mean.real, math.sqrt(2 * hb * w0) * a_mean.imag)
    xs, ps = default_axes(hb, w0, center, mean_number(c, sc.initial_osc), n_points=args.points)
    grid = wigner_grid_from_rho(rho.elems, xs, ps, hb, w0)
    tab = Table("wigner", ["x", "p", "w"], {**_numerics_meta(sc), "t": float(ts[0]), "dim": dim, "leakage": rho.leakage, "normalization": grid.normalization()})
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            tab.add(float(x), float(p), float(grid.values[i, j]))
    return tab


def _two_level_demo():
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    return GeneratorFunction(lambda t: 0.5 * sz + 0.8 * math.cos(2.0 * t) * sx, 2)


def cmd_magnus_demo(args) -> Table:
    """Driven two-level generator; global error over a fixed horizon against a fine-step product."""
    gen = _two_level_demo()
    horizon = args.horizon
    ref = oracle.fine_step_propagator(gen, horizon, 20_000)
    steps = [horizon / 2**k for k in range(1, 5)]
    tab = Table("magnus-demo", ["order", "step", "error", "unitarity_defect"], {"horizon": horizon, "fine_steps": 20000})
    for order in (1, 2, 3):
        errs = []
        for h in steps:
            U = magnus_evolve(gen, horizon, order, max_step=h)
            errs.append(float(np.linalg.norm(U - ref, 2)))
            tab.add(order, h, errs[-1], unitarity_defect(U))
        tab.metadata[f"slope_order{order}"] = float(np.polyfit(np.log(steps), np.log(errs), 1)[0])
    return tab


def cmd_validate(args) -> Table:
    doc = serialization.load(args.scenario) if args.scenario else None
    if doc is None:
        raise _request_error("--scenario is required for this command")
    results = checks.run_all(doc, times=None if args.t is None else [args.t])
    tab = Table("validate", ["check", "passed", "value", "bound"])
    for r in results:
        tab.add(r.name, r.passed, r.value, r.bound)
    tab.metadata["all_passed"] = all(r.passed for r in results)
    return tab


def cmd_discretize(args) -> str:
    shape = SHAPES[args.shape]
    try:
        params = {k: float(v) for k, v in (item.split("=") for item in args.params.split(","))}
        lo, hi = (float(v) for v in args.range.split(","))
        bath = discretize(shape(**params), args.modes, (lo, hi))
    except (TypeError, ValueError) as exc:
        raise _request_error(f"bad discretize arguments: {exc}") from exc
    base = serialization.load(args.scenario) if args.scenario else Scenario(OscillatorSpec(args.omega0))
    return serialization.dumps(Scenario(base.oscillator, bath, base.drive, base.initial_osc, base.bath_state, base.numerics))


COMMANDS = {
    "coefficients": cmd_coefficients,
    "rho": cmd_rho,
    "probabilities": cmd_probabilities,
    "observables": cmd_observables,
    "heat": cmd_heat,
    "wigner": cmd_wigner,
    "magnus-demo": cmd_magnus_demo,
    "validate": cmd_validate,
    "discretize": cmd_discretize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heisenberg-oqs", description="Driven dissipative oscillator in a finite bosonic bath.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--t", type=float, help="single time (overrides the grid)")
    common.add_argument("--t0", type=float, default=0.0)
    common.add_argument("--t1", type=float, default=0.0)
    common.add_argument("--n", type=int, default=1, help="number of grid points")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--dim", type=int, help="Fock cutoff for the reported matrix")
    common.add_argument("--element", help="single element n,m")
    common.add_argument("--oracle", action="store_true", help="append a brute-force cross-check")
    common.add_argument("--as-printed", action="store_true", help="use the uncorrected diagnostic energy/heat forms")
    common.add_argument("--synthetic", help="G_re,G_im,zeta_re,zeta_im,eta instead of the dynamics")

    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "wigner":
            p.add_argument("--points", type=int, default=121)
        if name == "magnus-demo":
            p.add_argument("--horizon", type=float, default=0.4)
        if name == "discretize":
            p.add_argument("--shape", choices=sorted(SHAPES), required=True)
            p.add_argument("--params", required=True, help="e.g. gamma=0.05,omega_c=2")
            p.add_argument("--modes", type=int, required=True)
            p.add_argument("--range", required=True, help="lo,hi")
            p.add_argument("--omega0", type=float, default=1.0)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
        if isinstance(result, Table):
            _emit(result.to_json() if args.format == "json" else result.to_csv(), args.out)
            if args.command == "validate":
                for row in result.rows:
                    print(("PASS " if row[1] else "FAIL ") + f"{row[0]}: {row[2]:.3e} (bound {row[3]:.1e})", file=sys.stderr)
                if not result.metadata["all_passed"]:
                    return EXIT_NUMERICAL
        else:
            _emit(result, args.out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DimensionOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except (NumericalError, ProbabilityVectorInvalid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # reader went away (e.g. `| head`); silence the flush at interpreter exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
