#!/usr/bin/env python3
"""Locate the blow-up time of the damped oscillator's solution family.

The oscillator's leaf sections share a denominator friction*shc + chx that
crosses zero at a finite time t* depending on (m, k, friction): there the
Legendrian leaf folds over the base and the section ceases to be a graph.
This script brackets the first root of the denominator by bisection, then
prints the equation residual of a registered section on a grid clipped to
the safe window, showing the family solves its equation up to the fold.

Usage:
    python3 scripts/oscillator_window.py [--friction 0.5] [--t-max 3.0]
"""

import argparse

import numpy as np

from cocontact.duals import chx, shc
from cocontact.hamilton_jacobi import hj_dependent_residual
from cocontact.systems import build_system


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--friction", type=float, default=0.2)
    ap.add_argument("--t-max", type=float, default=3.0)
    ap.add_argument("--lam", type=float, default=0.3)
    args = ap.parse_args()

    spec = build_system("damped_oscillator",
                        {"friction": args.friction}, self_test=False)
    m0, k = spec.params["m0"], spec.params["k"]
    delta = args.friction**2 - 4.0 * k * m0
    half = 0.5 / m0

    def denom(t: float) -> float:
        return args.friction * shc(delta, t * half) + chx(delta, t * half)

    # bracket the first sign change, then bisect
    ts = np.linspace(0.0, args.t_max, 1201)
    t_star = None
    for a, b in zip(ts, ts[1:]):
        if denom(float(a)) * denom(float(b)) < 0.0:
            lo, hi = float(a), float(b)
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if denom(lo) * denom(mid) <= 0.0:
                    hi = mid
                else:
                    lo = mid
            t_star = 0.5 * (lo + hi)
            break
    if t_star is None:
        print(f"no fold in [0, {args.t_max}]")
    else:
        print(f"first fold at t* = {t_star:.6f}  (friction={args.friction})")

    sol = spec.solutions[0]
    sec = sol.section((args.lam,))
    t_hi = (t_star - 0.05) if t_star is not None else args.t_max
    sup = 0.0
    for t in np.linspace(0.0, t_hi, 25):
        for q in np.linspace(-2.0, 2.0, 25):
            for z in (-1.0, 0.0, 1.0):
                r = hj_dependent_residual(sec, spec.H, float(t), (float(q),),
                                          float(z))
                sup = max(sup, float(np.max(np.abs(r))))
    print(f"equation residual on [0, {t_hi:.3f}] x [-2, 2] x {{-1,0,1}}: "
          f"sup = {sup:.3e}")


if __name__ == "__main__":
    main()
