"""Largest elementwise gap between the series reduced state and the brute-force oracle.

    python scripts/compare_oracle.py scenarios/desk_number.json --times 0.5 2 5
"""

import argparse
import time

import numpy as np

from heisenberg_oqs import oracle, serialization
from heisenberg_oqs.checks import stepwise_free
from heisenberg_oqs.propagator import Propagator
from heisenberg_oqs.reduced_density import InitialMoments, rho_matrix_from_coefficients


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenario")
    ap.add_argument("--times", type=float, nargs="+", default=[0.5, 2.0])
    ap.add_argument("--tol", type=float, default=1e-4, help="oracle cutoff-convergence tolerance")
    args = ap.parse_args()

    sc = serialization.load(args.scenario)
    prop = Propagator.from_scenario(sc)
    moments = InitialMoments(sc.initial_osc)
    n_steps = 1 if stepwise_free(sc) else 64
    print("t,max_abs_diff,oracle_cutoffs,oracle_error,seconds")
    for t in args.times:
        start = time.perf_counter()
        ref, space = oracle.converged_reduced_density(sc, t, oracle.FockSpace.for_scenario(sc), args.tol, n_steps)
        mine = rho_matrix_from_coefficients(prop.coefficients(t), moments, ref.dim, sc.numerics)
        gap = float(np.max(np.abs(mine.elems - ref.elems)))
        cut = "x".join(map(str, space.cutoffs))
        print(f"{t:g},{gap:.3e},{cut},{ref.max_error_estimate:.1e},{time.perf_counter() - start:.1f}")


if __name__ == "__main__":
    main()
