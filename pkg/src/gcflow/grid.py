from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L] with an odd node count, so x = 0 is a node."""

    L: float
    n: int

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"grid half-width must be positive, got L={self.L}")
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 nodes, got n={self.n}")
        if self.n % 2 == 0:
            raise ValueError(f"grid parity: node count must be odd, got n={self.n}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        half = (self.n - 1) // 2
        x = self.dx * (np.arange(self.n) - half)
        x[0], x[-1], x[half] = -self.L, self.L, 0.0
        x.flags.writeable = False
        return x

    def window(self, half_width: float | None = None) -> np.ndarray:
        """Boolean mask of nodes with |x| <= half_width (all nodes if None)."""
        if half_width is None:
            return np.ones(self.n, dtype=bool)
        return np.abs(self.x) <= half_width + 1e-12 * self.L


def make_grid(L: float, n: int) -> Grid:
    return Grid(float(L), int(n))
