"""Gauss curvature flow of rotational graphs: solver, barriers and estimate checkers."""
from .core import (CutoffSpec, InitialProfile, Preset, cutoff_g, cutoff_g_prime,
                   gauss_curvature, pde_rhs)
from .grid import Grid, make_grid
from .report import InvariantReport
from .solver import (NewtonDivergence, NewtonOptions, SolverConfig, StabilityViolation,
                     Stepper, Trajectory, evolve, sample_profile, stable_dt, step_explicit,
                     step_implicit)

__version__ = "0.1.0"
