"""Oscillator relaxing into a dense ohmic bath, read off from <a^dag a>(t).

A bath of N discrete modes mimics a continuum only until the recurrence time
2 pi / d_omega. Before that the occupation should settle near the thermal
value at the oscillator frequency.

    python scripts/thermalization.py --modes 200 --beta 1.0 --t1 60
"""

import argparse
import math

import numpy as np

from heisenberg_oqs.model import NumberState, OscillatorSpec, ThermalBathState, thermal_occupation
from heisenberg_oqs.observables import mean_number
from heisenberg_oqs.propagator import Propagator
from heisenberg_oqs.reduced_density import InitialMoments, rho_matrix_auto
from heisenberg_oqs.spectral import Ohmic, discretize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, default=200)
    ap.add_argument("--gamma", type=float, default=0.02)
    ap.add_argument("--omega-c", type=float, default=3.0)
    ap.add_argument("--range", type=float, nargs=2, default=(0.01, 4.0))
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--initial", type=int, default=4, help="initial number state")
    ap.add_argument("--t1", type=float, default=60.0)
    ap.add_argument("--n", type=int, default=13)
    args = ap.parse_args()

    bath = discretize(Ohmic(args.gamma, args.omega_c), args.modes, tuple(args.range))
    osc = OscillatorSpec(1.0)
    prop = Propagator(osc, bath, bath_state=ThermalBathState(args.beta))
    init = NumberState(args.initial)
    moments = InitialMoments(init)
    d_omega = (args.range[1] - args.range[0]) / args.modes
    target = float(thermal_occupation(np.array([osc.omega0]), args.beta)[0])

    print(f"# recurrence time {2 * math.pi / d_omega:.1f}, thermal occupation {target:.6f}")
    print("t,abs_G2,eta,mean_number,p0,p_initial")
    for t in np.linspace(0.0, args.t1, args.n):
        c = prop.coefficients(t)
        rho = rho_matrix_auto(c, moments, leak_target=1e-8)
        p = rho.populations
        print(f"{t:g},{abs(c.G) ** 2:.6f},{c.eta:.6f},{mean_number(c, init):.6f},{p[0]:.6f},{p[args.initial]:.6f}")


if __name__ == "__main__":
    main()
