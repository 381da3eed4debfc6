from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class InvariantReport:
    """Outcome of one check. ``worst_violation <= 0`` means it held with margin."""

    name: str
    passed: bool
    worst_violation: float
    location: tuple[float, float]
    tolerance_used: float
    inconclusive: bool = False
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed != (self.worst_violation <= self.tolerance_used):
            raise ValueError("report verdict disagrees with worst_violation vs tolerance")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "worst_violation": float(self.worst_violation),
            "location": [None if math.isnan(v) else float(v) for v in self.location],
            "tolerance_used": float(self.tolerance_used),
            "inconclusive": self.inconclusive,
        }


def report_from_field(name: str, violation: np.ndarray, x: np.ndarray, t: np.ndarray,
                      tol: float, **details) -> InvariantReport:
    """Reduce a (times x nodes) violation field to its worst point."""
    violation = np.asarray(violation, dtype=float)
    if violation.size == 0:
        return InvariantReport(name, True, 0.0, (float("nan"), float("nan")), tol,
                               inconclusive=True, details=details)
    k, i = np.unravel_index(int(np.argmax(violation)), violation.shape)
    worst = float(violation[k, i])
    return InvariantReport(name, worst <= tol, worst, (float(x[i]), float(t[k])), tol,
                           details=details)
