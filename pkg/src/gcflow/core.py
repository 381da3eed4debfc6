"""Continuous model: initial profiles, the cutoff g, the flow right-hand side
and the Gauss curvature of the generated surface of revolution.

The flow of a rotational graph r = u(x, t) under Gauss curvature is

    u_t = u_xx / (u (1 + u_x^2)^(3/2)),

and the solver works with the uniformly parabolic variant in which the leading
``u`` in the denominator is replaced by ``g(u)`` with ``g >= m/4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .grid import Grid


class Preset(str, Enum):
    CONSTANT = "Constant"
    BUMP = "BumpOnConstant"
    STEP = "SmoothedStep"
    SINUSOID = "DecayingSinusoid"


def _bump(s):
    """e * exp(-1/(1 - s^2)) on |s| < 1, zero elsewhere, with derivatives."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    q = np.where(inside, 1.0 - s * s, 1.0)
    b = np.where(inside, np.e * np.exp(-1.0 / q), 0.0)
    phi1 = -2.0 * s / q**2
    phi2 = -2.0 / q**2 - 8.0 * s * s / q**3
    b1 = np.where(inside, b * phi1, 0.0)
    b2 = np.where(inside, b * (phi1 * phi1 + phi2), 0.0)
    return b, b1, b2


def _extrema(fn, lo: float, hi: float, samples: int = 200_001) -> tuple[float, float]:
    """Min and max of a smooth scalar function on [lo, hi]: dense scan, then a
    bounded 1-D refinement around the best sample of each kind."""
    xs = np.linspace(lo, hi, samples)
    ys = fn(xs)
    step = xs[1] - xs[0]
    out = []
    for sign in (1.0, -1.0):
        i = int(np.argmin(sign * ys))
        a, b = max(lo, xs[i] - step), min(hi, xs[i] + step)
        res = minimize_scalar(lambda t: sign * float(fn(np.array([t]))[0]),
                              bounds=(a, b), method="bounded",
                              options={"xatol": 1e-13})
        out.append(sign * min(sign * ys[i], res.fun))
    return out[0], out[1]


@dataclass(frozen=True)
class InitialProfile:
    """Initial generating curve f together with the constants the analysis needs.

    ``m`` and ``sup_f`` bound f over the whole line, ``grad_min``/``grad_max``
    bound f', ``max_abs_f2`` bounds |f''|. ``far_field_c`` is set only when f is
    exactly constant outside [-R0, R0].
    """

    preset: Preset
    c: float
    amplitude: float = 0.0
    R0: float = 1.0
    wavelength: float = 2.0 * math.pi
    m: float = field(init=False)
    sup_f: float = field(init=False)
    grad_min: float = field(init=False)
    grad_max: float = field(init=False)
    max_abs_f2: float = field(init=False)
    far_field_c: float | None = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "preset", Preset(self.preset))
        if not self.R0 > 0:
            raise ValueError(f"R0 must be positive, got {self.R0}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        c, A = float(self.c), float(self.amplitude)

        if self.preset is Preset.CONSTANT:
            lo, hi, g_lo, g_hi, f2 = c, c, 0.0, 0.0, 0.0
        elif self.preset is Preset.BUMP:
            lo, hi = c + min(0.0, A), c + max(0.0, A)
            b1_lo, b1_hi = _extrema(lambda s: _bump(s)[1], -1.0, 1.0)
            b2_lo, b2_hi = _extrema(lambda s: _bump(s)[2], -1.0, 1.0)
            g = sorted((A / self.R0 * b1_lo, A / self.R0 * b1_hi))
            g_lo, g_hi = g
            f2 = abs(A) / self.R0**2 * max(abs(b2_lo), abs(b2_hi))
        elif self.preset is Preset.STEP:
            lo, hi = c + min(0.0, A), c + max(0.0, A)
            peak = A / (2.0 * self.R0)
            g_lo, g_hi = min(0.0, peak), max(0.0, peak)
            f2 = abs(A) / self.R0**2 * 2.0 / (3.0 * math.sqrt(3.0))
        else:
            span = 60.0 * max(1.0, self.wavelength / (2.0 * math.pi))
            lo, hi = _extrema(self.f, -span, span)
            lo, hi = min(lo, c), max(hi, c)
            g_lo, g_hi = _extrema(self.fprime, -span, span)
            f2_lo, f2_hi = _extrema(self.fsecond, -span, span)
            f2 = max(abs(f2_lo), abs(f2_hi))

        if not lo > 0:
            raise ValueError(f"profile infimum must be positive, got m={lo}")
        object.__setattr__(self, "m", float(lo))
        object.__setattr__(self, "sup_f", float(hi))
        object.__setattr__(self, "grad_min", float(g_lo))
        object.__setattr__(self, "grad_max", float(g_hi))
        object.__setattr__(self, "max_abs_f2", float(f2))
        far = c if self.preset in (Preset.CONSTANT, Preset.BUMP) else None
        object.__setattr__(self, "far_field_c", far)

    @property
    def problem_two(self) -> bool:
        return self.far_field_c is not None

    @property
    def _k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    def f(self, x):
        x = np.asarray(x, dtype=float)
        c, A = self.c, self.amplitude
        if self.preset is Preset.CONSTANT:
            return np.full_like(x, c)
        if self.preset is Preset.BUMP:
            return c + A * _bump(x / self.R0)[0]
        if self.preset is Preset.STEP:
            return c + A * 0.5 * (1.0 + np.tanh(x / self.R0))
        return c + A * np.sin(self._k * x) / (1.0 + x * x)

    def fprime(self, x):
        x = np.asarray(x, dtype=float)
        A = self.amplitude
        if self.preset is Preset.CONSTANT:
            return np.zeros_like(x)
        if self.preset is Preset.BUMP:
            return A / self.R0 * _bump(x / self.R0)[1]
        if self.preset is Preset.STEP:
            return A / (2.0 * self.R0) / np.cosh(x / self.R0) ** 2
        k, q = self._k, 1.0 + x * x
        return A * (k * np.cos(k * x) / q - 2.0 * x * np.sin(k * x) / q**2)

    def fsecond(self, x):
        x = np.asarray(x, dtype=float)
        A = self.amplitude
        if self.preset is Preset.CONSTANT:
            return np.zeros_like(x)
        if self.preset is Preset.BUMP:
            return A / self.R0**2 * _bump(x / self.R0)[2]
        if self.preset is Preset.STEP:
            s = x / self.R0
            return -A / self.R0**2 * np.tanh(s) / np.cosh(s) ** 2
        k, q = self._k, 1.0 + x * x
        sn, cs = np.sin(k * x), np.cos(k * x)
        return A * (-k * k * sn / q - 4.0 * k * x * cs / q**2 + sn * (6.0 * x * x - 2.0) / q**3)

    def to_dict(self) -> dict:
        return {"profile": self.preset.value, "c": self.c, "amplitude": self.amplitude,
                "R0": self.R0, "wavelength": self.wavelength}


# -- cutoff ------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffSpec:
    """g(z) = m/4 for |z| <= m/4, g(z) = |z| for |z| >= m/2, quintic between."""

    m: float

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"cutoff needs m > 0, got {self.m}")

    @property
    def lo(self) -> float:
        return self.m / 4.0

    @property
    def hi(self) -> float:
        return self.m / 2.0


def _scalar_or_array(z, out):
    return float(out) if np.ndim(z) == 0 else out


def cutoff_g(z, spec: CutoffSpec):
    a = np.abs(np.asarray(z, dtype=float))
    lo, hi = spec.lo, spec.hi
    s = np.clip((a - lo) / (hi - lo), 0.0, 1.0)
    blend = lo + (hi - lo) * s**3 * (6.0 - 8.0 * s + 3.0 * s * s)
    out = np.where(a >= hi, a, np.where(a <= lo, lo, blend))
    return _scalar_or_array(z, out)


def cutoff_g_prime(z, spec: CutoffSpec):
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    lo, hi = spec.lo, spec.hi
    s = np.clip((a - lo) / (hi - lo), 0.0, 1.0)
    blend = s * s * (18.0 - 32.0 * s + 15.0 * s * s)
    d = np.where(a >= hi, 1.0, np.where(a <= lo, 0.0, blend))
    return _scalar_or_array(z, np.sign(z) * d)


def cutoff_active(u, spec: CutoffSpec) -> int:
    """Number of values on which g differs from the identity."""
    return int(np.count_nonzero(np.asarray(u) < spec.hi))


# -- discrete operators -------------------------------------------------------

def _check_sample(u, grid: Grid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.shape[0] != grid.n:
        raise ValueError(f"sample of shape {u.shape} does not match grid with n={grid.n}")
    return u


def centered_derivatives(u: np.ndarray, dx: float) -> tuple[np.ndarray, np.ndarray]:
    """Interior u_x and u_xx from the 3-point centered stencils."""
    ux = (u[2:] - u[:-2]) / (2.0 * dx)
    uxx = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (dx * dx)
    return ux, uxx


def pde_rhs(u, grid: Grid, spec: CutoffSpec | None = None) -> np.ndarray:
    """u_xx / (g(u) (1 + u_x^2)^(3/2)) at interior nodes, 0 on the pinned ends.

    With ``spec=None`` g is the identity (the unmodified equation).
    """
    u = _check_sample(u, grid)
    ux, uxx = centered_derivatives(u, grid.dx)
    ui = u[1:-1]
    gu = ui if spec is None else cutoff_g(ui, spec)
    out = np.zeros_like(u)
    out[1:-1] = uxx / (gu * (1.0 + ux * ux) ** 1.5)
    return out


def gauss_curvature(u, grid: Grid) -> np.ndarray:
    """K = -u_xx / (u (1 + u_x^2)^2) of the surface generated by rotating u."""
    u = _check_sample(u, grid)
    if np.any(u <= 0):
        raise ValueError("Gauss curvature of the surface of revolution needs u > 0")
    dx = grid.dx
    ux = np.empty_like(u)
    uxx = np.empty_like(u)
    ux[1:-1], uxx[1:-1] = centered_derivatives(u, dx)
    if grid.n >= 4:
        # one-sided second-order stencils, written in differences so constants give 0
        d = np.diff(u)
        ux[0] = (3.0 * d[0] - d[1]) / (2.0 * dx)
        ux[-1] = (3.0 * d[-1] - d[-2]) / (2.0 * dx)
        uxx[0] = (-2.0 * d[0] + 3.0 * d[1] - d[2]) / dx**2
        uxx[-1] = (2.0 * d[-1] - 3.0 * d[-2] + d[-3]) / dx**2
    else:
        ux[0] = ux[-1] = ux[1]
        uxx[0] = uxx[-1] = uxx[1]
    return -uxx / (u * (1.0 + ux * ux) ** 2)
