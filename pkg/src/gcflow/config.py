"""Run configuration: a flat JSON document validated into solver and check options.

Example::

    {"profile": "BumpOnConstant", "c": 1.0, "amplitude": 1.0, "R0": 1.0,
     "L": 10.0, "n": 1001, "t_end": 0.5, "stepper": "explicit",
     "checks": ["bounds", "gradient_range", "decay"], "epsilon": 0.25}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import CHECKERS
from .core import InitialProfile, Preset
from .grid import Grid
from .solver import NewtonOptions, SolverConfig, Stepper


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


_NUMBER_KEYS = {"c", "amplitude", "R0", "wavelength", "L", "t_end", "sigma", "dt",
                "safety", "newton_tol", "epsilon", "mesh_time"}
_INT_KEYS = {"n", "newton_max_iter", "snapshot_every", "seed", "mesh_n_theta"}
_STR_KEYS = {"profile", "stepper", "format", "trajectory_out", "report_out", "mesh_out"}
_KNOWN = _NUMBER_KEYS | _INT_KEYS | _STR_KEYS | {"checks", "mesh_enabled"}

DEFAULTS = {
    "amplitude": None, "R0": 1.0, "wavelength": 2.0 * math.pi, "sigma": 1.0,
    "stepper": "explicit", "dt": None, "safety": 0.9, "newton_tol": 1e-10,
    "newton_max_iter": 30, "snapshot_every": 10, "checks": [], "epsilon": 0.25,
    "seed": 0, "format": "json", "trajectory_out": None, "report_out": None,
    "mesh_enabled": False, "mesh_time": None, "mesh_n_theta": 32, "mesh_out": None,
}
REQUIRED = ("profile", "c", "L", "n", "t_end")


@dataclass(frozen=True)
class MeshOptions:
    enabled: bool = False
    time: float = 0.0
    n_theta: int = 32
    out: str | None = None


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig
    checks: tuple[str, ...] = ()
    epsilon: float = 0.25
    seed: int = 0
    format: str = "json"
    trajectory_out: str | None = None
    report_out: str | None = None
    mesh: MeshOptions = field(default_factory=MeshOptions)


def _typed(raw: dict) -> dict:
    for key, val in raw.items():
        if key not in _KNOWN:
            raise ValidationError(f"unknown key: {key!r}")
        if val is None:
            continue
        if key in _NUMBER_KEYS:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ParseError(f"field {key!r}: expected a number, got {val!r}")
            if not math.isfinite(val):
                raise ValidationError(f"finite: field {key!r} is {val!r}")
        elif key in _INT_KEYS:
            if isinstance(val, bool) or not isinstance(val, int):
                raise ParseError(f"field {key!r}: expected an integer, got {val!r}")
        elif key in _STR_KEYS:
            if not isinstance(val, str) or not val:
                raise ParseError(f"field {key!r}: expected a non-empty string, got {val!r}")
        elif key == "checks":
            if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
                raise ParseError("field 'checks': expected a list of checker names")
        elif key == "mesh_enabled" and not isinstance(val, bool):
            raise ParseError(f"field 'mesh_enabled': expected a boolean, got {val!r}")
    return {**DEFAULTS, **raw}


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    for key in REQUIRED:
        if key not in raw or raw[key] is None:
            raise ValidationError(f"missing required field: {key!r}")
    d = _typed(raw)

    try:
        preset = Preset(d["profile"])
    except ValueError:
        names = ", ".join(p.value for p in Preset)
        raise ValidationError(f"preset: unknown profile {d['profile']!r} (expected one of {names})")
    amplitude = d["amplitude"]
    if amplitude is None:
        amplitude = 0.0 if preset is Preset.CONSTANT else 1.0

    if d["n"] % 2 == 0 or d["n"] < 3:
        raise ValidationError(f"grid parity: n must be odd and >= 3, got {d['n']}")
    if not 0.0 <= d["sigma"] <= 1.0:
        raise ValidationError(f"sigma range: sigma must lie in [0, 1], got {d['sigma']}")
    if not 0.0 < d["safety"] <= 1.0:
        raise ValidationError(f"safety range: must lie in (0, 1], got {d['safety']}")
    try:
        stepper = Stepper(d["stepper"])
    except ValueError:
        raise ValidationError(f"stepper: expected 'explicit' or 'implicit', got {d['stepper']!r}")
    unknown = [c for c in d["checks"] if c not in CHECKERS]
    if unknown:
        raise ValidationError(f"checks: unknown checker names {unknown}")
    if d["format"] not in ("json", "csv"):
        raise ValidationError(f"format: expected 'json' or 'csv', got {d['format']!r}")
    if d["mesh_n_theta"] < 3:
        raise ValidationError("mesh n_theta: must be >= 3")
    if not d["epsilon"] > 0:
        raise ValidationError("epsilon: must be positive")

    try:
        profile = InitialProfile(preset, float(d["c"]), float(amplitude), float(d["R0"]),
                                 float(d["wavelength"]))
        solver = SolverConfig(
            profile=profile, grid=Grid(float(d["L"]), int(d["n"])), t_end=float(d["t_end"]),
            sigma=float(d["sigma"]), stepper=stepper,
            dt=None if d["dt"] is None else float(d["dt"]), safety=float(d["safety"]),
            newton=NewtonOptions(float(d["newton_tol"]), int(d["newton_max_iter"])),
            snapshot_every=int(d["snapshot_every"]))
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc

    mesh_time = solver.t_end if d["mesh_time"] is None else float(d["mesh_time"])
    return RunConfig(
        solver=solver, checks=tuple(d["checks"]), epsilon=float(d["epsilon"]),
        seed=int(d["seed"]), format=d["format"], trajectory_out=d["trajectory_out"],
        report_out=d["report_out"],
        mesh=MeshOptions(bool(d["mesh_enabled"]), mesh_time, int(d["mesh_n_theta"]),
                         d["mesh_out"]))


def parse_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return config_from_dict(raw)
