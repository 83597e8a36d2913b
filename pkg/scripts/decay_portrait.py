#!/usr/bin/env python3
"""Tabulate energy decay and quantity drift for every built-in system.

For each registered system this script integrates the flow from a common
seed, samples the energy H along the trajectory, and reports how well each
registered quantity holds up: conserved quantities should sit still, and
dissipated quantities should sit still only after multiplying by the
compensating factor exp(integral of dH/dz along the flow).

Usage:
    python3 scripts/decay_portrait.py [--t-end 2.0] [--h 1e-3]
"""

import argparse

from cocontact.dynamics import integrate
from cocontact.geometry import PhasePoint
from cocontact.quantities import conserved_drift, dissipated_drift
from cocontact.systems import SYSTEM_NAMES, build_system

SEED = PhasePoint(0.0, (1.0,), (0.5,), 0.3)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=2.0)
    ap.add_argument("--h", type=float, default=1e-3)
    args = ap.parse_args()

    for name in SYSTEM_NAMES:
        spec = build_system(name, self_test=False)
        traj = integrate(spec.H, SEED, t_end=args.t_end, scheme="rk4",
                         h=args.h)
        h0 = spec.H.value(traj.samples[0])
        h1 = spec.H.value(traj.samples[-1])
        print(f"\n{name}  (n={spec.n}, {len(traj)} samples)")
        print(f"  H: {h0:+.6f} -> {h1:+.6f}")
        for key, (field, kind) in sorted(spec.quantities.items()):
            if kind == "conserved":
                drift = conserved_drift(field, traj)
            else:
                drift = dissipated_drift(field, spec.H, traj)
            v0 = field.value(traj.samples[0])
            v1 = field.value(traj.samples[-1])
            print(f"  {key:>3} [{kind:>10}]  value {v0:+.6f} -> {v1:+.6f}"
                  f"   drift {drift:.3e}")


if __name__ == "__main__":
    main()
