"""Checkers for the a priori estimates, discrete Hoelder seminorms and
refinement studies.

Every checker takes a finished :class:`Trajectory` and returns an
:class:`InvariantReport`. Tolerances scale with the stencil truncation error of
the quantity being compared (dx for first differences, dx^2 for values).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .barriers import DecayBarrier, choose_decay_params, decay_radius
from .core import centered_derivatives
from .grid import Grid
from .report import InvariantReport, report_from_field
from .solver import SolverConfig, Trajectory, evolve, stable_dt

__all__ = [
    "InvariantReport", "HolderTarget", "HolderEstimate", "parabolic_distance",
    "holder_seminorm", "check_bounds", "check_gradient_range", "check_bernstein",
    "check_decay", "mixed_derivative_rhs", "mixed_derivative_discrepancy",
    "mixed_derivative_check", "mixed_derivative_study", "ConvergenceStudy", "convergence_study", "convergence_order",
    "CHECKERS", "run_checks", "decay_barriers",
]


def _default_window(traj: Trajectory) -> float | None:
    # Pinned ends are exact only for Problem Two; elsewhere stay clear of the boundary layer.
    return None if traj.profile.problem_two else traj.grid.L / 2.0


# -- parabolic geometry ---------------------------------------------------------

def parabolic_distance(X, Y):
    """max(|x1 - x2|, sqrt|t1 - t2|) for points X = (x, t)."""
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    d = np.maximum(np.abs(X[..., 0] - Y[..., 0]), np.sqrt(np.abs(X[..., 1] - Y[..., 1])))
    return float(d) if d.ndim == 0 else d


class HolderTarget(str, Enum):
    U_T = "u_t"
    U_XX = "u_xx"
    U_X = "u_x"


@dataclass(frozen=True)
class HolderEstimate:
    target: HolderTarget
    alpha: float
    value: float
    pair_count: int


def _derivative_field(traj: Trajectory, target: HolderTarget) -> tuple[np.ndarray, np.ndarray]:
    """Stencil derivative on (snapshots x interior nodes) and the node coordinates."""
    u, dx = traj.samples, traj.grid.dx
    if target is HolderTarget.U_T:
        d = np.gradient(u, traj.times, axis=0)[:, 1:-1]
    else:
        ux, uxx = centered_derivatives(u.T, dx)
        d = (ux if target is HolderTarget.U_X else uxx).T
    return d, traj.grid.x[1:-1]


def holder_seminorm(traj: Trajectory, target, alpha: float, n_pairs: int = 100_000,
                    seed: int = 0, window: float | None = None) -> HolderEstimate:
    """Sampled lower bound of the parabolic alpha-Hoelder seminorm of a derivative.

    Uses ``n_pairs`` random point pairs plus every pair of lattice neighbours
    in x and in t. A fixed ``seed`` makes a larger sample a superset of a
    smaller one, so the estimate never decreases with ``n_pairs``.
    """
    target = HolderTarget(target)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if traj.times.size < 2:
        raise ValueError("Hoelder estimate needs at least 2 snapshots")
    d, x = _derivative_field(traj, target)
    keep = np.abs(x) <= (window if window is not None else np.inf)
    d, x = d[:, keep], x[keep]
    t = traj.times
    nt, nx = d.shape

    def ratio(k1, i1, k2, i2):
        dist = np.maximum(np.abs(x[i1] - x[i2]), np.sqrt(np.abs(t[k1] - t[k2])))
        ok = dist > 0
        return np.abs(d[k1, i1] - d[k2, i2])[ok] / dist[ok] ** alpha

    best, count = 0.0, 0
    if nx > 1:
        k, i = np.meshgrid(np.arange(nt), np.arange(nx - 1), indexing="ij")
        best = max(best, float(ratio(k, i, k, i + 1).max(initial=0.0)))
        count += k.size
    k, i = np.meshgrid(np.arange(nt - 1), np.arange(nx), indexing="ij")
    best = max(best, float(ratio(k, i, k + 1, i).max(initial=0.0)))
    count += k.size

    rng = np.random.default_rng(seed)
    p = rng.integers(0, nt * nx, size=(n_pairs, 2))
    k1, i1 = np.divmod(p[:, 0], nx)
    k2, i2 = np.divmod(p[:, 1], nx)
    best = max(best, float(ratio(k1, i1, k2, i2).max(initial=0.0)))
    count += n_pairs
    return HolderEstimate(target, alpha, best, count)


# -- theorem checkers ---------------------------------------------------------------

def check_bounds(traj: Trajectory, tol: float | None = None) -> InvariantReport:
    """inf(sigma f) <= u <= sup(sigma f) over every snapshot."""
    if tol is None:
        tol = 10.0 * traj.grid.dx ** 2 + 1e-10
    lo, hi = traj.sigma * traj.profile.m, traj.sigma * traj.profile.sup_f
    u = traj.samples
    violation = np.maximum(u - hi, lo - u)
    return report_from_field("bounds", violation, traj.grid.x, traj.times, tol,
                             min_u=float(u.min()), max_u=float(u.max()))


def check_gradient_range(traj: Trajectory, tol: float | None = None) -> InvariantReport:
    """min f' <= u_x <= max f' at interior nodes (Problem Two data only)."""
    if not traj.profile.problem_two:
        raise ValueError("gradient range check needs a profile constant outside a compact set")
    if tol is None:
        tol = 10.0 * traj.grid.dx + 1e-10
    ux, _ = centered_derivatives(traj.samples.T, traj.grid.dx)
    ux = ux.T
    lo, hi = traj.sigma * traj.profile.grad_min, traj.sigma * traj.profile.grad_max
    violation = np.maximum(ux - hi, lo - ux)
    return report_from_field("gradient_range", violation, traj.grid.x[1:-1], traj.times, tol)


def _sup_gradient_energy(traj: Trajectory, window: float | None) -> tuple[np.ndarray, np.ndarray]:
    """sup over nodes of 1 + u_x^2 per snapshot, and where it is attained."""
    ux, _ = centered_derivatives(traj.samples.T, traj.grid.dx)
    keep = traj.grid.window(window)[1:-1]
    energy = 1.0 + ux[keep] ** 2
    return energy.max(axis=0), traj.grid.x[1:-1][keep][np.argmax(energy, axis=0)]


def check_bernstein(traj: Trajectory, tol: float | None = None, use_sup: bool = False,
                    window: float | None = None) -> InvariantReport:
    """Gradient bound sup(1 + u_x^2)(t) <= e^{t/(2 m^3)} max(1 + f'^2) and the
    monotonicity of the weighted sup s(t) = e^{-t/(2 m^3)} sup(1 + u_x^2)(t).

    ``m`` is inf f by default; ``use_sup=True`` substitutes sup f instead.
    """
    p = traj.profile
    if traj.samples.min() < p.m / 2.0:
        raise ValueError("Bernstein check needs u >= m/2 throughout (cutoff region entered)")
    if tol is None:
        tol = 20.0 * traj.grid.dx + 1e-8
    if window is None:
        window = _default_window(traj)
    const = p.sup_f if use_sup else p.m
    t = traj.times
    energy, where = _sup_gradient_energy(traj, window)
    f_energy = 1.0 + (traj.sigma * max(abs(p.grad_min), abs(p.grad_max))) ** 2
    growth = np.exp(t / (2.0 * const**3))

    bound_violation = energy - growth * f_energy
    s = energy / growth
    running_min = np.minimum.accumulate(s)
    mono_violation = np.zeros_like(s)
    mono_violation[1:] = s[1:] - running_min[:-1]

    a_worst, b_worst = float(bound_violation.max()), float(mono_violation.max())
    k = int(np.argmax(np.maximum(bound_violation, mono_violation)))
    worst = max(a_worst, b_worst)
    return InvariantReport("bernstein", worst <= tol, worst, (float(where[k]), float(t[k])), tol,
                           details={"bound": a_worst, "monotone": b_worst})


def check_decay(traj: Trajectory, epsilon: float,
                tol: float | None = None) -> tuple[float, InvariantReport]:
    """|u - c| < 3 eps beyond the decay radius K of the Gaussian barrier."""
    p = traj.profile
    if not p.problem_two:
        raise ValueError("decay check needs a profile constant outside a compact set")
    c = traj.sigma * p.far_field_c
    if not c > 0:
        raise ValueError("decay check needs a positive far-field value")
    if tol is None:
        tol = 10.0 * traj.grid.dx ** 2 + 1e-8
    h, w = choose_decay_params(epsilon, traj.sigma * p.sup_f, p.R0, p.m, traj.t_end)
    K = decay_radius(h, w, epsilon)
    x = traj.grid.x
    outside = np.abs(x) > K
    violation = np.abs(traj.samples[:, outside] - c) - 3.0 * epsilon
    report = report_from_field("decay", violation, x[outside], traj.times, tol,
                               K=K, h=h, w=w, epsilon=epsilon)
    return K, report


def decay_barriers(traj: Trajectory, epsilon: float) -> tuple[DecayBarrier, DecayBarrier]:
    """Upper Gaussian barrier for the trajectory's constants and its reflection."""
    p = traj.profile
    h, w = choose_decay_params(epsilon, traj.sigma * p.sup_f, p.R0, p.m, traj.t_end)
    upper = DecayBarrier(traj.sigma * p.far_field_c, epsilon, h, w)
    return upper, upper.reflected()


# -- mixed derivative identity --------------------------------------------------------

def mixed_derivative_rhs(u, ux, uxx, uxxx, cubic_coeff: float = -3.0):
    """u_tx from differentiating u_t = u_xx / (u (1+u_x^2)^{3/2}) in x.

    ``cubic_coeff`` multiplies the u u_x u_xx^2 term; anything but -3 is wrong
    and exists only to exercise the check's sensitivity.
    """
    q = 1.0 + ux * ux
    return (-ux * uxx * q + cubic_coeff * u * ux * uxx**2 + u * q * uxxx) / (u**2 * q**2.5)


def _uniform_prefix(times: np.ndarray) -> int:
    """Number of leading snapshots with uniform spacing."""
    if times.size < 2:
        return times.size
    step = times[1] - times[0]
    gaps = np.diff(times)
    bad = np.nonzero(np.abs(gaps - step) > 1e-9 * max(step, 1.0))[0]
    return times.size if bad.size == 0 else int(bad[0]) + 1


def _identity_discrepancy(u, t, x, dx, cubic_coeff, window):
    ux = (u[:, 2:] - u[:, :-2]) / (2.0 * dx)
    lhs = (ux[2:] - ux[:-2]) / (t[2:] - t[:-2])[:, None]
    ui = u[1:-1, 2:-2]
    uxi = ux[1:-1, 1:-1]
    uxx = (u[1:-1, 3:-1] - 2.0 * ui + u[1:-1, 1:-3]) / dx**2
    uxxx = (u[1:-1, 4:] - 2.0 * u[1:-1, 3:-1] + 2.0 * u[1:-1, 1:-3] - u[1:-1, :-4]) / (2.0 * dx**3)
    rhs = mixed_derivative_rhs(ui, uxi, uxx, uxxx, cubic_coeff)
    xi = x[2:-2]
    keep = np.abs(xi) <= (window if window is not None else np.inf)
    err = np.abs(lhs[:, 1:-1][:, keep] - rhs[:, keep])
    k, i = np.unravel_index(int(np.argmax(err)), err.shape)
    return float(err[k, i]), (float(xi[keep][i]), float(t[1 + k]))


def _identity_inputs(traj: Trajectory, window):
    nk = _uniform_prefix(traj.times)
    if nk < 3:
        raise ValueError("mixed derivative check needs at least 3 uniformly spaced snapshots")
    if traj.samples.min() < traj.profile.m / 2.0:
        raise ValueError("mixed derivative check needs u >= m/2 throughout")
    if window is None:
        window = _default_window(traj)
    return traj.samples[:nk], traj.times[:nk], window


def mixed_derivative_discrepancy(traj: Trajectory, cubic_coeff: float = -3.0,
                                 window: float | None = None) -> tuple[float, tuple[float, float]]:
    """Max |centered time difference of u_x - closed-form u_tx| on the lattice."""
    u, t, window = _identity_inputs(traj, window)
    return _identity_discrepancy(u, t, traj.grid.x, traj.grid.dx, cubic_coeff, window)


def mixed_derivative_check(traj: Trajectory, C: float | None = None, cubic_coeff: float = -3.0,
                           window: float | None = None) -> InvariantReport:
    """Discrepancy of the u_tx identity against C (dt + dx^2).

    Without an explicit ``C`` the constant is calibrated from the same data on
    the sub-lattice with doubled dt and dx: the check then passes iff the
    discrepancy at least halves under the refinement (order >= 1).
    """
    u, t, window = _identity_inputs(traj, window)
    x, dx = traj.grid.x, traj.grid.dx
    dt = float(t[1] - t[0])
    err, loc = _identity_discrepancy(u, t, x, dx, cubic_coeff, window)
    details = {"discrepancy": err}
    if C is None:
        if t.size < 5 or traj.grid.n < 11:
            raise ValueError("self-calibration needs at least 5 snapshots and 11 nodes")
        coarse, _ = _identity_discrepancy(u[::2, ::2], t[::2], x[::2], 2.0 * dx,
                                          cubic_coeff, window)
        C = coarse / (2.0 * (dt + dx * dx))
        details.update(coarse_discrepancy=coarse,
                       order=math.log2(coarse / err) if err > 0 and coarse > 0 else float("nan"))
    tol = C * (dt + dx * dx)
    details["C"] = C
    return InvariantReport("mixed_derivative", err <= tol, err, loc, tol, details=details)


def mixed_derivative_study(config: SolverConfig, levels: int = 3,
                           cubic_coeff: float = -3.0) -> ConvergenceStudy:
    """Discrepancy of the u_tx identity under simultaneous (dt, dx) halving.

    The explicit step at the coarsest level is a quarter of the monotone bound,
    so halving dt alongside dx stays stable for three levels.
    """
    if levels < 3:
        raise ValueError("a refinement study needs at least 3 levels")
    coarse = config.grid
    dt0 = stable_dt(coarse, config.profile.m, config.safety) / 4.0
    errs, dxs, dts = [], [], []
    for k in range(levels):
        grid = Grid(coarse.L, (coarse.n - 1) * 2**k + 1)
        run = evolve(replace(config, grid=grid, dt=dt0 / 2**k, snapshot_every=1))
        errs.append(mixed_derivative_discrepancy(run, cubic_coeff)[0])
        dxs.append(grid.dx)
        dts.append(float(run.times[1]))
    orders = tuple(math.log2(a / b) if a > 0 and b > 0 else float("nan")
                   for a, b in zip(errs, errs[1:]))
    return ConvergenceStudy("space-time", tuple(dxs), tuple(dts), tuple(errs), orders)


# -- refinement studies ----------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceStudy:
    refine: str
    dx: tuple[float, ...]
    dt: tuple[float, ...]
    differences: tuple[float, ...]  # max |u_k - u_{k+1}| on the coarsest nodes
    orders: tuple[float, ...]

    @property
    def order(self) -> float:
        return self.orders[-1] if self.orders else float("nan")


def convergence_study(config: SolverConfig, levels: int = 3, refine: str = "space",
                      window: float | None = None) -> ConvergenceStudy:
    """Richardson study: orders log2(d_k / d_{k+1}) from successive differences.

    ``refine="space"`` halves dx and quarters dt per level (dt ~ dx^2);
    ``refine="time"`` keeps the grid and halves dt.
    """
    if levels < 3:
        raise ValueError("a convergence study needs at least 3 levels")
    if refine not in ("space", "time"):
        raise ValueError("refine must be 'space' or 'time'")
    nsteps = max(1, math.ceil(config.t_end / config.step_size() * (1.0 - 1e-12)))
    dt0 = config.t_end / nsteps
    if window is None:
        window = config.grid.L / 2.0
    coarse = config.grid

    finals, dxs, dts = [], [], []
    for k in range(levels):
        if refine == "space":
            grid = Grid(coarse.L, (coarse.n - 1) * 2**k + 1)
            dt = dt0 / 4**k
        else:
            grid, dt = coarse, dt0 / 2**k
        run = evolve(replace(config, grid=grid, dt=dt, snapshot_every=10**9))
        stride = (grid.n - 1) // (coarse.n - 1)
        finals.append(run.samples[-1][::stride])
        dxs.append(grid.dx)
        dts.append(dt)

    keep = coarse.window(window)
    diffs = [float(np.max(np.abs(a[keep] - b[keep]))) for a, b in zip(finals, finals[1:])]
    orders = []
    for a, b in zip(diffs, diffs[1:]):
        orders.append(math.log2(a / b) if a > 1e-13 and b > 1e-13 else float("nan"))
    return ConvergenceStudy(refine, tuple(dxs), tuple(dts), tuple(diffs), tuple(orders))


def convergence_order(config: SolverConfig, levels: int = 3, refine: str = "space") -> float:
    """Observed order at the finest level; NaN when the differences vanish."""
    return convergence_study(config, levels, refine).order


CHECKERS = ("bounds", "gradient_range", "bernstein", "decay", "mixed_derivative",
            "comparison_cosh", "comparison_decay")


def run_checks(traj: Trajectory, names, epsilon: float = 0.25) -> list[InvariantReport]:
    """Run named checkers; comparison_decay yields the upper and reflected reports."""
    from .barriers import CoshBarrier, choose_lambda, comparison_check

    reports = []
    for name in names:
        if name == "bounds":
            reports.append(check_bounds(traj))
        elif name == "gradient_range":
            reports.append(check_gradient_range(traj))
        elif name == "bernstein":
            reports.append(check_bernstein(traj))
        elif name == "decay":
            reports.append(check_decay(traj, epsilon)[1])
        elif name == "mixed_derivative":
            reports.append(mixed_derivative_check(traj))
        elif name == "comparison_cosh":
            b = CoshBarrier(M=traj.sigma * traj.profile.sup_f,
                            a=float(np.abs(traj.samples).max()),
                            R=2.0 * traj.grid.L, lam=choose_lambda(traj.profile.m))
            reports.append(comparison_check(traj, b))
        elif name == "comparison_decay":
            upper, lower = decay_barriers(traj, epsilon)
            reports.extend([comparison_check(traj, upper), comparison_check(traj, lower)])
        else:
            raise ValueError(f"unknown checker {name!r}")
    return reports
