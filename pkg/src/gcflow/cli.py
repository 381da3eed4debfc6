"""Command line entry point.

    gcflow simulate    --config run.json [--out traj.json] [--format json|csv]
    gcflow verify      (--config run.json | --trajectory traj.json) [--checks a,b] [--out report.json]
    gcflow barrier     [--epsilon 0.1 --M 1 --R0 1 --m 1 --T 1 --L 20]
    gcflow mesh        (--config run.json | --trajectory traj.json) --time 0.5 --out surf.obj
    gcflow convergence --config run.json [--levels 3] [--refine space|time]

Exit status: 0 on success, 1 when a check fails or the solver breaks down,
2 on configuration errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import analysis, barriers
from .config import ParseError, RunConfig, ValidationError, parse_config
from .serialize import (DegenerateSurface, export_mesh, read_trajectory, write_reports,
                        write_trajectory)
from .solver import NewtonDivergence, StabilityViolation, evolve

log = logging.getLogger("gcflow")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _ConfigError(Exception):
    pass


def _load(args) -> tuple[RunConfig | None, object]:
    """Config (if given) and a trajectory, computed or read from disk."""
    cfg = parse_config(args.config) if args.config else None
    if getattr(args, "trajectory", None):
        return cfg, read_trajectory(args.trajectory)
    if cfg is None:
        raise _ConfigError("either --config or --trajectory is required")
    return cfg, evolve(cfg.solver)


def cmd_simulate(args) -> int:
    if not args.config:
        raise _ConfigError("simulate needs --config")
    cfg = parse_config(args.config)
    out = args.out or cfg.trajectory_out
    if not out:
        raise _ConfigError("no output path: pass --out or set trajectory_out")
    traj = evolve(cfg.solver)
    write_trajectory(traj, out, args.format or cfg.format)
    print(f"wrote {len(traj.times)} snapshots on {traj.grid.n} nodes to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg, traj = _load(args)
    if args.checks:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
    elif cfg is not None and cfg.checks:
        names = list(cfg.checks)
    else:
        names = ["bounds"]
    unknown = [n for n in names if n not in analysis.CHECKERS]
    if unknown:
        raise _ConfigError(f"unknown checker names {unknown}")
    epsilon = args.epsilon if args.epsilon is not None else (cfg.epsilon if cfg else 0.25)
    reports = analysis.run_checks(traj, names, epsilon)
    for r in reports:
        status = "INCONCLUSIVE" if r.inconclusive else ("PASS" if r.passed else "FAIL")
        print(f"{r.name:24s} {status:12s} worst={r.worst_violation:.3e} tol={r.tolerance_used:.3e}")
        if r.inconclusive:
            log.warning("%s inconclusive at this truncation (%s)", r.name, r.details)
    out = args.out or (cfg.report_out if cfg else None)
    if out:
        write_reports(reports, out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_barrier(args) -> int:
    if args.config:
        p = parse_config(args.config).solver
        M, R0, m, T = p.profile.sup_f, p.profile.R0, p.profile.m, p.t_end
        L = p.grid.L
    else:
        M, R0, m, T, L = args.M, args.R0, args.m, args.T, args.L
    eps = args.epsilon if args.epsilon is not None else 0.1
    lam = barriers.choose_lambda(m)
    h, w = barriers.choose_decay_params(eps, M, R0, m, T)
    K = barriers.decay_radius(h, w, eps)
    cosh = barriers.CoshBarrier(M=M, a=M, R=L, lam=lam)
    decay = barriers.DecayBarrier(1.0, eps, h, w)  # residual is independent of c
    print(f"h = {h:.6g}")
    print(f"w = {w:.6g}")
    print(f"lambda = {lam:.6g}")
    print(f"K = {K:.6g}")
    for name, b in (("cosh", cosh), ("decay", decay)):
        scan = barriers.residual_scan(b, m, L, T)
        print(f"{name} residual on 201x101 lattice: max = {scan['max_residual']:.6e}, "
              f"min = {scan['min_residual']:.6e}, at (x, t) = {scan['location']}")
    return EXIT_OK


def cmd_mesh(args) -> int:
    cfg, traj = _load(args)
    time = args.time if args.time is not None else (cfg.mesh.time if cfg else traj.t_end)
    n_theta = args.n_theta or (cfg.mesh.n_theta if cfg else 32)
    out = args.out or (cfg.mesh.out if cfg else None)
    if not out:
        raise _ConfigError("no output path: pass --out or set mesh_out")
    nv, nt = export_mesh(traj, time, n_theta, out)
    print(f"wrote {nv} vertices and {nt} triangles to {out}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    if not args.config:
        raise _ConfigError("convergence needs --config")
    cfg = parse_config(args.config)
    study = analysis.convergence_study(cfg.solver, args.levels, args.refine)
    print(f"{'level':>5} {'dx':>12} {'dt':>12} {'max|u_k-u_k+1|':>16} {'order':>8}")
    for k, (dx, dt) in enumerate(zip(study.dx, study.dt)):
        diff = f"{study.differences[k]:16.6e}" if k < len(study.differences) else " " * 16
        order = f"{study.orders[k - 1]:8.3f}" if 0 < k <= len(study.orders) else " " * 8
        print(f"{k:5d} {dx:12.6g} {dt:12.6g} {diff} {order}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"refine": study.refine, "dx": study.dx, "dt": study.dt,
                       "differences": study.differences, "orders": study.orders}, fh, indent=1)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcflow", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trajectory=False):
        p.add_argument("--config")
        p.add_argument("--out")
        if trajectory:
            p.add_argument("--trajectory", help="read a JSON trajectory instead of simulating")
        return p

    p = common(sub.add_parser("simulate", help="run the solver and write a trajectory"))
    p.add_argument("--format", choices=("json", "csv"))
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("verify", help="run theorem checkers"), trajectory=True)
    p.add_argument("--checks", help=f"comma separated subset of {','.join(analysis.CHECKERS)}")
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("barrier", help="print barrier parameters and residuals"))
    p.add_argument("--epsilon", type=float)
    p.add_argument("--M", type=float, default=1.0, help="sup f")
    p.add_argument("--R0", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0, help="inf f")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--L", type=float, default=20.0)
    p.set_defaults(func=cmd_barrier)

    p = common(sub.add_parser("mesh", help="export the surface of revolution as OBJ"),
               trajectory=True)
    p.add_argument("--time", type=float)
    p.add_argument("--n-theta", type=int, dest="n_theta")
    p.set_defaults(func=cmd_mesh)

    p = common(sub.add_parser("convergence", help="print a refinement order table"))
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--refine", choices=("space", "time"), default="space")
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, ValidationError, _ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NewtonDivergence, StabilityViolation, DegenerateSurface, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
