"""Trajectory, report and surface-mesh files.

JSON trajectories store floats with ``repr`` precision, so a write/read cycle
reproduces every sample bit for bit. CSV rows are ``t,x,u`` with 17
significant digits. Meshes are Wavefront OBJ triangle soups of the surface of
revolution at the snapshot nearest a requested time.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import InitialProfile
from .grid import Grid
from .report import InvariantReport
from .solver import Trajectory

TRAJECTORY_FORMAT = "gcflow.trajectory/1"


class DegenerateSurface(ValueError):
    pass


_number = {"type": "number"}
_numbers = {"type": "array", "items": _number}

TRAJECTORY_SCHEMA = {
    "type": "object",
    "required": ["format", "metadata", "profile", "grid", "config", "cutoff_hits",
                 "times", "x", "u"],
    "properties": {
        "format": {"const": TRAJECTORY_FORMAT},
        "metadata": {
            "type": "object",
            "required": ["m", "sup_f", "grad_min", "grad_max", "far_field_c", "R0", "sigma"],
            "properties": {
                "m": _number, "sup_f": _number, "grad_min": _number, "grad_max": _number,
                "far_field_c": {"type": ["number", "null"]}, "R0": _number, "sigma": _number,
            },
        },
        "profile": {
            "type": "object",
            "required": ["profile", "c", "amplitude", "R0", "wavelength"],
        },
        "grid": {
            "type": "object", "required": ["L", "n"],
            "properties": {"L": _number, "n": {"type": "integer"}},
        },
        "config": {"type": "object"},
        "cutoff_hits": {"type": "integer", "minimum": 0},
        "times": _numbers,
        "x": _numbers,
        "u": {"type": "array", "items": _numbers},
    },
}

REPORT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["name", "pass", "worst_violation", "location", "tolerance_used"],
        "properties": {
            "name": {"type": "string"},
            "pass": {"type": "boolean"},
            "worst_violation": _number,
            "location": {"type": "array", "minItems": 2, "maxItems": 2,
                         "items": {"type": ["number", "null"]}},
            "tolerance_used": _number,
            "inconclusive": {"type": "boolean"},
        },
    },
}


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "format": TRAJECTORY_FORMAT,
        "metadata": traj.metadata,
        "profile": traj.profile.to_dict(),
        "grid": {"L": traj.grid.L, "n": traj.grid.n},
        "config": traj.config,
        "cutoff_hits": traj.cutoff_hits,
        "times": traj.times.tolist(),
        "x": traj.grid.x.tolist(),
        "u": traj.samples.tolist(),
    }


def trajectory_from_dict(d: dict) -> Trajectory:
    if d.get("format") != TRAJECTORY_FORMAT:
        raise ValueError(f"not a trajectory file (format={d.get('format')!r})")
    p = d["profile"]
    profile = InitialProfile(p["profile"], p["c"], p["amplitude"], p["R0"], p["wavelength"])
    return Trajectory(grid=Grid(d["grid"]["L"], d["grid"]["n"]), times=np.array(d["times"]),
                      samples=np.array(d["u"]), profile=profile,
                      sigma=d["metadata"]["sigma"], config=d["config"],
                      cutoff_hits=d["cutoff_hits"])


def write_trajectory(traj: Trajectory, path, format: str = "json") -> None:
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(trajectory_to_dict(traj), indent=1) + "\n")
    elif format == "csv":
        x = traj.grid.x
        with path.open("w", newline="") as fh:
            fh.write("t,x,u\n")
            for t, row in zip(traj.times, traj.samples):
                fh.writelines(f"{t:.17g},{xi:.17g},{ui:.17g}\n" for xi, ui in zip(x, row))
    else:
        raise ValueError(f"unknown trajectory format {format!r}")


def read_trajectory(path) -> Trajectory:
    return trajectory_from_dict(json.loads(Path(path).read_text()))


def write_reports(reports: list[InvariantReport], path) -> None:
    Path(path).write_text(json.dumps([r.to_dict() for r in reports], indent=1) + "\n")


def export_mesh(traj: Trajectory, time: float, n_theta: int, path) -> tuple[int, int]:
    """Write the surface of revolution at the snapshot nearest ``time``.

    Vertex (i, j) sits at (x_i, u_i cos theta_j, u_i sin theta_j); each ring
    quad is split into two triangles and the seam wraps j = n_theta to 0.
    Returns (vertex count, triangle count).
    """
    if n_theta < 3:
        raise ValueError("n_theta must be >= 3")
    if not traj.times[0] <= time <= traj.times[-1]:
        raise ValueError(f"time {time} outside trajectory range [0, {traj.t_end}]")
    k = traj.nearest(time)
    u = traj.samples[k]
    if np.any(u <= 0):
        raise DegenerateSurface(f"profile at t={traj.times[k]} has non-positive radius")
    x = traj.grid.x
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    cos, sin = np.cos(theta), np.sin(theta)

    n = u.size
    lines = [f"# surface of revolution at t = {float(traj.times[k])!r}",
             f"# {n * n_theta} vertices, {2 * (n - 1) * n_theta} triangles"]
    for xi, ui in zip(x, u):
        lines.extend(f"v {xi:.17g} {ui * c:.17g} {ui * s:.17g}" for c, s in zip(cos, sin))
    for i in range(n - 1):
        for j in range(n_theta):
            a = i * n_theta + j + 1
            b = i * n_theta + (j + 1) % n_theta + 1
            c = a + n_theta
            d = b + n_theta
            lines.append(f"f {a} {c} {d}")
            lines.append(f"f {a} {d} {b}")
    Path(path).write_text("\n".join(lines) + "\n")
    return n * n_theta, 2 * (n - 1) * n_theta
