"""Method-of-lines time stepping for the cutoff-modified flow on [-L, L].

Boundary values are pinned to sigma * f(+-L) for all time. Explicit Euler uses
the step bound implied by the coefficient estimate 1/(g(u)(1+u_x^2)^(3/2)) <= 4/m;
backward Euler solves the nodal system with Newton on a tridiagonal Jacobian.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import solve_banded

from .core import (CutoffSpec, InitialProfile, centered_derivatives, cutoff_active,
                   cutoff_g, cutoff_g_prime, pde_rhs)
from .grid import Grid, make_grid

__all__ = [
    "Grid", "make_grid", "Stepper", "NewtonOptions", "SolverConfig", "Trajectory",
    "NewtonDivergence", "StabilityViolation", "CutoffProbe", "sample_profile",
    "stable_dt", "step_explicit", "step_implicit", "evolve",
]

log = logging.getLogger(__name__)

IMPLICIT_DT_FACTOR = 10.0


class NewtonDivergence(RuntimeError):
    pass


class StabilityViolation(RuntimeError):
    pass


class Stepper(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-10
    max_iter: int = 30

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("newton tol must be positive")
        if self.max_iter < 0:
            raise ValueError("newton max_iter must be non-negative")


@dataclass(frozen=True)
class SolverConfig:
    profile: InitialProfile
    grid: Grid
    t_end: float
    sigma: float = 1.0
    stepper: Stepper = Stepper.EXPLICIT
    dt: float | None = None  # None selects the automatic step
    safety: float = 0.9
    newton: NewtonOptions = field(default_factory=NewtonOptions)
    snapshot_every: int = 10

    def __post_init__(self):
        object.__setattr__(self, "stepper", Stepper(self.stepper))
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError(f"sigma must lie in [0, 1], got {self.sigma}")
        if not 0.0 < self.safety <= 1.0:
            raise ValueError(f"safety must lie in (0, 1], got {self.safety}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("fixed dt must be positive")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")

    @property
    def cutoff(self) -> CutoffSpec:
        return CutoffSpec(self.profile.m)

    def step_size(self) -> float:
        if self.dt is not None:
            return self.dt
        dt = stable_dt(self.grid, self.profile.m, self.safety)
        return dt * IMPLICIT_DT_FACTOR if self.stepper is Stepper.IMPLICIT else dt

    def to_dict(self) -> dict:
        return {
            **self.profile.to_dict(), "L": self.grid.L, "n": self.grid.n,
            "t_end": self.t_end, "sigma": self.sigma, "stepper": self.stepper.value,
            "dt": self.dt, "safety": self.safety, "newton_tol": self.newton.tol,
            "newton_max_iter": self.newton.max_iter, "snapshot_every": self.snapshot_every,
        }


@dataclass(frozen=True)
class Trajectory:
    """Snapshots u(x, t_k) on a fixed grid, with the profile they started from."""

    grid: Grid
    times: np.ndarray
    samples: np.ndarray
    profile: InitialProfile
    sigma: float = 1.0
    config: dict = field(default_factory=dict)
    cutoff_hits: int = 0

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        samples = np.array(self.samples, dtype=float)
        if times.ndim != 1 or times.size == 0 or times[0] != 0.0:
            raise ValueError("times must be a non-empty sequence starting at 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if samples.shape != (times.size, self.grid.n):
            raise ValueError(f"samples shape {samples.shape} != ({times.size}, {self.grid.n})")
        times.flags.writeable = False
        samples.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "samples", samples)

    @property
    def metadata(self) -> dict:
        p = self.profile
        return {"m": p.m, "sup_f": p.sup_f, "grad_min": p.grad_min,
                "grad_max": p.grad_max, "far_field_c": p.far_field_c,
                "R0": p.R0, "sigma": self.sigma}

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def nearest(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times - t)))


@dataclass
class CutoffProbe:
    """Counts node evaluations on which the cutoff g differs from the identity."""

    spec: CutoffSpec
    count: int = 0

    def record(self, u: np.ndarray) -> None:
        self.count += cutoff_active(u[1:-1], self.spec)


def sample_profile(profile: InitialProfile, sigma: float, grid: Grid) -> np.ndarray:
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    return sigma * profile.f(grid.x)


def stable_dt(grid: Grid | float, m: float, safety: float = 0.9) -> float:
    """Largest explicit step keeping the scheme monotone: safety * m * dx^2 / 8."""
    dx = grid.dx if isinstance(grid, Grid) else float(grid)
    return safety * m * dx * dx / 8.0


def step_explicit(u, dt: float, grid: Grid, spec: CutoffSpec,
                  probe: CutoffProbe | None = None) -> np.ndarray:
    if not dt > 0:
        raise ValueError("dt must be positive")
    u = np.asarray(u, dtype=float)
    if probe is not None:
        probe.record(u)
    return u + dt * pde_rhs(u, grid, spec)


def _residual_and_jacobian(v, u, dt, grid, spec):
    dx = grid.dx
    ux, uxx = centered_derivatives(v, dx)
    vi = v[1:-1]
    g = cutoff_g(vi, spec)
    w = 1.0 + ux * ux
    a = 1.0 / (g * w**1.5)
    F = vi - u[1:-1] - dt * uxx * a

    a_p = -3.0 * ux / (g * w**2.5)
    a_v = -a / g * cutoff_g_prime(vi, spec)
    lower = -dt * (a / dx**2 - uxx * a_p / (2.0 * dx))  # dF_i / dv_{i-1}
    upper = -dt * (a / dx**2 + uxx * a_p / (2.0 * dx))  # dF_i / dv_{i+1}
    diag = 1.0 - dt * (-2.0 * a / dx**2 + uxx * a_v)

    ab = np.zeros((3, vi.size))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    return F, ab


def step_implicit(u, dt: float, grid: Grid, spec: CutoffSpec,
                  newton: NewtonOptions = NewtonOptions(),
                  probe: CutoffProbe | None = None, return_iterations: bool = False):
    """Backward Euler step: solve v - u - dt * rhs(v) = 0 on interior nodes."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n,):
        raise ValueError(f"sample of shape {u.shape} does not match grid with n={grid.n}")
    v = u.copy()
    for it in range(1, newton.max_iter + 1):
        if probe is not None:
            probe.record(v)
        F, ab = _residual_and_jacobian(v, u, dt, grid, spec)
        if not np.all(np.isfinite(F)):
            break
        if np.max(np.abs(F), initial=0.0) < newton.tol:
            return (v, it) if return_iterations else v
        v[1:-1] -= solve_banded((1, 1), ab, F)
    raise NewtonDivergence(
        f"Newton did not reach tol={newton.tol} within {newton.max_iter} iterations (dt={dt})")


def _implicit_with_fallback(u, dt, grid, spec, newton, probe):
    try:
        return step_implicit(u, dt, grid, spec, newton, probe)
    except NewtonDivergence:
        log.warning("Newton diverged at dt=%g; retrying with two half steps", dt)
        half = step_implicit(u, dt / 2, grid, spec, newton, probe)
        return step_implicit(half, dt / 2, grid, spec, newton, probe)


def evolve(config: SolverConfig) -> Trajectory:
    grid, spec = config.grid, config.cutoff
    dt = config.step_size()
    if config.stepper is Stepper.EXPLICIT and dt > stable_dt(grid, config.profile.m, 1.0):
        log.warning("explicit dt=%g exceeds the monotonicity bound %g", dt,
                    stable_dt(grid, config.profile.m, 1.0))
    nsteps = max(1, math.ceil(config.t_end / dt * (1.0 - 1e-12)))
    dt = config.t_end / nsteps

    probe = CutoffProbe(spec)
    u = sample_profile(config.profile, config.sigma, grid)
    times, samples = [0.0], [u]
    for k in range(1, nsteps + 1):
        if config.stepper is Stepper.EXPLICIT:
            u = step_explicit(u, dt, grid, spec, probe)
        else:
            u = _implicit_with_fallback(u, dt, grid, spec, config.newton, probe)
        if not np.all(np.isfinite(u)):
            raise StabilityViolation(f"non-finite values after step {k} (t={k * dt:g})")
        if k == nsteps:
            times.append(config.t_end)
            samples.append(u)
        elif k % config.snapshot_every == 0:
            times.append(k * dt)
            samples.append(u)

    return Trajectory(grid=grid, times=np.array(times), samples=np.array(samples),
                      profile=config.profile, sigma=config.sigma,
                      config={**config.to_dict(), "dt_used": dt}, cutoff_hits=probe.count)
