"""Comparison functions for the modified flow and their numerical verification.

Two families are built here:

* the cosh supersolution ``M + 2 a/cosh(R) e^{lam t} cosh x`` that caps any
  bounded solution by its initial supremum, and
* the Gaussian decay barrier ``c + eps + eps t/(t+1) + h exp(-w x^2)``
  (optionally with the cosh tail) trapping Problem Two solutions near c.

Residuals are evaluated from closed-form derivatives at the worst admissible
coefficient 1/q with q in [m/4, inf), so a negative residual certifies the
barrier for every solution, not just the one at hand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .report import InvariantReport, report_from_field
from .solver import Trajectory


@dataclass(frozen=True)
class CoshBarrier:
    M: float
    a: float
    R: float
    lam: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("cosh barrier radius R must be positive")
        if self.a < 0:
            raise ValueError("cosh barrier amplitude a must be non-negative")

    def admissible(self, m: float) -> bool:
        return self.lam > 4.0 / m


@dataclass(frozen=True)
class DecayBarrier:
    """Gaussian barrier around c. ``tail = (a, R, lam)`` adds the cosh tail;
    ``lower=True`` reflects the whole barrier about u = c (a subsolution)."""

    c: float
    epsilon: float
    h: float
    w: float
    tail: tuple[float, float, float] | None = None
    lower: bool = False

    def __post_init__(self):
        if not (self.c > 0 and self.epsilon > 0 and self.h > 0):
            raise ValueError("decay barrier needs c, epsilon, h > 0")
        if not 0.0 < self.w < 1.0:
            raise ValueError(f"decay barrier width w must lie in (0, 1), got {self.w}")

    def reflected(self) -> DecayBarrier:
        return DecayBarrier(self.c, self.epsilon, self.h, self.w, self.tail, not self.lower)


def _cosh_ratio(x, R):
    """cosh(x)/cosh(R) and sinh(x)/cosh(R) without overflow."""
    ax = np.abs(x)
    scale = np.exp(ax - R) / (1.0 + np.exp(-2.0 * R))
    return scale * (1.0 + np.exp(-2.0 * ax)), np.sign(x) * scale * (1.0 - np.exp(-2.0 * ax))


def choose_lambda(m: float, margin: float = 0.25) -> float:
    """Growth rate (4/m)(1 + margin); must be strictly above 4/m."""
    if not m > 0:
        raise ValueError("m must be positive")
    if not margin > 0:
        raise ValueError("lambda must exceed 4/m strictly; margin must be positive")
    return 4.0 / m * (1.0 + margin)


def _cosh_parts(a, R, lam, x, t):
    """Tail value, its t-derivative, x-derivative and xx-derivative."""
    ch, sh = _cosh_ratio(np.asarray(x, dtype=float), R)
    grow = 2.0 * a * np.exp(lam * np.asarray(t, dtype=float))
    v = grow * ch
    return v, lam * v, grow * sh, v


def cosh_barrier_value(b: CoshBarrier, x, t):
    return b.M + _cosh_parts(b.a, b.R, b.lam, x, t)[0]


def gaussian_bump_d2_max(h: float, w: float) -> tuple[float, float]:
    """Location and value of the largest second derivative of h exp(-w x^2)."""
    if not (h > 0 and w > 0):
        raise ValueError("h and w must be positive")
    return math.sqrt(3.0 / (2.0 * w)), 4.0 * h * w * math.exp(-1.5)


def decay_w_bound(epsilon: float, M_sup: float, R0: float, m: float, T: float) -> float:
    """Strict upper limit on w making the Gaussian barrier a supersolution."""
    return epsilon * (m / 4.0) / (T + 1.0) ** 2 / (8.0 * M_sup) * math.exp(1.5 - R0 * R0)


def choose_decay_params(epsilon: float, M_sup: float, R0: float, m: float,
                        T: float) -> tuple[float, float]:
    for name, val in (("epsilon", epsilon), ("M_sup", M_sup), ("R0", R0), ("m", m), ("T", T)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    h = 2.0 * M_sup * math.exp(R0 * R0)
    w = 0.5 * min(1.0, decay_w_bound(epsilon, M_sup, R0, m, T))
    return h, w


def decay_barrier_for(profile, epsilon: float, T: float, lower: bool = False) -> DecayBarrier:
    if profile.far_field_c is None:
        raise ValueError("decay barrier needs a profile that is constant outside a compact set")
    h, w = choose_decay_params(epsilon, profile.sup_f, profile.R0, profile.m, T)
    return DecayBarrier(profile.far_field_c, epsilon, h, w, lower=lower)


def _decay_parts(b: DecayBarrier, x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    gauss = b.h * np.exp(-b.w * x * x)
    v = b.epsilon + b.epsilon * t / (t + 1.0) + gauss
    vt = b.epsilon / (t + 1.0) ** 2 + 0.0 * gauss
    vx = -2.0 * b.w * x * gauss + 0.0 * t
    vxx = gauss * (4.0 * b.w**2 * x * x - 2.0 * b.w) + 0.0 * t
    if b.tail is not None:
        tv, tt, tx, txx = _cosh_parts(*b.tail, x, t)
        v, vt, vx, vxx = v + tv, vt + tt, vx + tx, vxx + txx
    return v, vt, vx, vxx


def decay_barrier_value(b: DecayBarrier, x, t):
    offset = _decay_parts(b, x, t)[0]
    return b.c - offset if b.lower else b.c + offset


def decay_radius(h: float, w: float, epsilon: float) -> float:
    """Smallest K with h exp(-w x^2) <= epsilon for |x| >= K."""
    if not (h > 0 and w > 0 and epsilon > 0):
        raise ValueError("h, w and epsilon must be positive")
    return math.sqrt(math.log(h / epsilon) / w) if h > epsilon else 0.0


def barrier_residual(b, m: float, x, t) -> np.ndarray:
    """Worst-case -v_t + v_xx / (q (1 + v_x^2)^(3/2)) over q >= m/4 on the
    lattice ``t x x`` (shape ``(len(t), len(x))``).

    For a reflected (lower) barrier the sign is flipped, so in every case a
    negative value means the barrier inequality holds.
    """
    X, T = np.meshgrid(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if isinstance(b, CoshBarrier):
        _, vt, vx, vxx = _cosh_parts(b.a, b.R, b.lam, X, T)
    else:
        _, vt, vx, vxx = _decay_parts(b, X, T)
    # v_xx <= 0: the term is <= 0 for every q and tends to 0 as q -> inf.
    return -vt + 4.0 / m * np.maximum(vxx, 0.0) / (1.0 + vx * vx) ** 1.5


def residual_scan(b, m: float, L: float, T: float, nx: int = 201, nt: int = 101) -> dict:
    x = np.linspace(-L, L, nx)
    t = np.linspace(0.0, T, nt)
    r = barrier_residual(b, m, x, t)
    k, i = np.unravel_index(int(np.argmax(r)), r.shape)
    return {"max_residual": float(r[k, i]), "min_margin": float(-r[k, i]),
            "min_residual": float(r.min()), "location": (float(x[i]), float(t[k]))}


def comparison_check(traj: Trajectory, b, tol: float | None = None) -> InvariantReport:
    """max(u - v) for an upper barrier, max(v - u) for a reflected one."""
    x, t = traj.grid.x, traj.times
    if tol is None:
        tol = 1e-8 + 10.0 * traj.grid.dx ** 2
    X, Tm = np.meshgrid(x, t)
    if isinstance(b, CoshBarrier):
        v = cosh_barrier_value(b, X, Tm)
        name = "comparison_cosh"
        violation = traj.samples - v
    else:
        c = traj.profile.far_field_c
        if c is None or not math.isclose(b.c, traj.sigma * c, rel_tol=1e-12):
            raise ValueError(f"decay barrier built for c={b.c}, trajectory far field is "
                             f"{None if c is None else traj.sigma * c}")
        v = decay_barrier_value(b, X, Tm)
        name = "comparison_decay_lower" if b.lower else "comparison_decay"
        violation = v - traj.samples if b.lower else traj.samples - v
    return report_from_field(name, violation, x, t, tol)
