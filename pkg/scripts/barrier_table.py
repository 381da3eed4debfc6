"""Barrier parameters (h, w, K) and residual margins over a sweep of epsilon and T.

    python scripts/barrier_table.py
"""
import numpy as np

from gcflow.barriers import (CoshBarrier, DecayBarrier, choose_decay_params, choose_lambda,
                             decay_radius, residual_scan)


def main():
    M, R0, m, L = 2.0, 1.0, 1.0, 20.0
    print(f"decay barrier, M={M} R0={R0} m={m}")
    print(f"{'eps':>6} {'T':>5} {'h':>9} {'w':>10} {'K':>8} {'margin':>10}")
    for eps in (0.05, 0.1, 0.25, 0.5, 1.0):
        for T in (0.1, 0.5, 1.0):
            h, w = choose_decay_params(eps, M, R0, m, T)
            scan = residual_scan(DecayBarrier(1.0, eps, h, w), m, L, T)
            print(f"{eps:6.2f} {T:5.2f} {h:9.4f} {w:10.3e} {decay_radius(h, w, eps):8.2f} "
                  f"{scan['min_margin']:10.3e}")

    print("\ncosh barrier, a=1, R=L: margin against lambda/(4/m)")
    for ratio in (0.9, 1.0, 1.01, 1.25, 2.0):
        lam = ratio * 4.0 / m
        scan = residual_scan(CoshBarrier(1.0, 1.0, L, lam), m, L, 1.0)
        print(f"  {ratio:5.2f}  max residual {scan['max_residual']: .3e}")
    print(f"  default lambda = {choose_lambda(m)}")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
