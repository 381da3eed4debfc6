"""Refinement tables: spatial and temporal orders of the explicit scheme and the
order of the mixed-derivative identity discrepancy.

    python scripts/convergence_table.py --levels 4
"""
import argparse

from gcflow.analysis import convergence_study, mixed_derivative_study
from gcflow.core import InitialProfile
from gcflow.grid import make_grid
from gcflow.solver import SolverConfig


def show(title, study):
    print(f"\n{title}")
    print(f"{'dx':>10} {'dt':>12} {'difference':>12} {'order':>7}")
    for k, (dx, dt) in enumerate(zip(study.dx, study.dt)):
        d = f"{study.differences[k]:12.4e}" if k < len(study.differences) else " " * 12
        o = f"{study.orders[k - 1]:7.3f}" if 0 < k <= len(study.orders) else ""
        print(f"{dx:10.5f} {dt:12.4e} {d} {o}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, default=3)
    args = ap.parse_args()

    profiles = {"BumpOnConstant": InitialProfile("BumpOnConstant", 1.0, 1.0, 1.0),
                "SmoothedStep": InitialProfile("SmoothedStep", 1.0, 1.0, 1.0)}
    for name, p in profiles.items():
        cfg = SolverConfig(p, make_grid(4.0, 101), t_end=0.1)
        show(f"{name}: space (dt ~ dx^2)", convergence_study(cfg, args.levels, "space"))
        show(f"{name}: time (fixed dx)", convergence_study(cfg, args.levels, "time"))

    cfg = SolverConfig(profiles["BumpOnConstant"], make_grid(3.0, 301), t_end=0.005)
    show("u_tx identity, BumpOnConstant", mixed_derivative_study(cfg, 3))
    show("u_tx identity with the cubic term's sign flipped",
         mixed_derivative_study(cfg, 3, cubic_coeff=3.0))


if __name__ == "__main__":
    main()
