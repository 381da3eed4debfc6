import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcflow.core import CutoffSpec, InitialProfile, pde_rhs
from gcflow.grid import Grid, make_grid
from gcflow.solver import (CutoffProbe, NewtonDivergence, NewtonOptions, SolverConfig,
                           Trajectory, _residual_and_jacobian, evolve, sample_profile,
                           stable_dt, step_explicit, step_implicit)


class TestGrid:
    def test_nodes(self):
        g = make_grid(1.0, 5)
        assert np.array_equal(g.x, [-1.0, -0.5, 0.0, 0.5, 1.0])
        assert g.dx == 0.5

    def test_center_is_exact_zero(self):
        g = make_grid(7.3, 1461)
        assert g.x[730] == 0.0 and g.x[0] == -7.3 and g.x[-1] == 7.3

    def test_read_only(self):
        g = make_grid(1.0, 5)
        with pytest.raises(ValueError):
            g.x[0] = 3.0

    @pytest.mark.parametrize("L,n", [(1.0, 4), (0.0, 5), (1.0, 1), (-1.0, 3)])
    def test_rejects(self, L, n):
        with pytest.raises(ValueError):
            Grid(L, n)

    def test_even_n_message(self):
        with pytest.raises(ValueError, match="grid parity"):
            Grid(1.0, 10)


class TestSampling:
    def test_bump_peak(self, bump):
        u = sample_profile(bump, 1.0, make_grid(2.0, 5))
        assert u[2] == pytest.approx(2.0, abs=1e-15)
        assert u[0] == u[-1] == 1.0

    def test_sigma_scales(self, bump):
        g = make_grid(2.0, 41)
        assert np.allclose(sample_profile(bump, 0.5, g), 0.5 * sample_profile(bump, 1.0, g))
        assert np.all(sample_profile(bump, 0.0, g) == 0.0)

    @pytest.mark.parametrize("sigma", [-0.1, 1.5])
    def test_rejects_sigma(self, bump, sigma):
        with pytest.raises(ValueError):
            sample_profile(bump, sigma, make_grid(1.0, 5))


class TestStableDt:
    def test_examples(self):
        assert stable_dt(0.1, 1.0) == pytest.approx(1.125e-3, rel=1e-14)
        assert stable_dt(make_grid(1.0, 21), 2.0, 1.0) == pytest.approx(2.5e-3, rel=1e-14)

    def test_quadruples_when_dx_doubles(self):
        assert stable_dt(0.2, 1.3) == pytest.approx(4 * stable_dt(0.1, 1.3), rel=1e-14)


class TestExplicitStep:
    def test_parabola_vertex(self):
        g = make_grid(1.0, 21)
        u1 = step_explicit(1 + g.x**2, 1e-4, g, CutoffSpec(1.0))
        assert u1[10] == pytest.approx(1.0 + 2e-4, abs=1e-14)

    def test_boundaries_pinned(self, bump):
        g = make_grid(2.0, 41)
        u = sample_profile(bump, 1.0, g)
        u1 = step_explicit(u, 1e-4, g, CutoffSpec(1.0))
        assert u1[0] == u[0] and u1[-1] == u[-1]

    def test_step_doubling_error_is_second_order_per_step(self):
        g = make_grid(math.pi, 41)
        spec = CutoffSpec(0.5)
        u = 1 + 0.5 * np.sin(g.x)
        gaps = []
        for dt in (1e-3, 5e-4):
            one = step_explicit(u, dt, g, spec)
            two = step_explicit(step_explicit(u, dt / 2, g, spec), dt / 2, g, spec)
            gaps.append(np.max(np.abs(one - two)))
        assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.05)

    def test_probe_counts_cutoff_nodes(self):
        g = make_grid(1.0, 5)
        probe = CutoffProbe(CutoffSpec(2.0))
        step_explicit(np.array([3.0, 0.5, 0.9, 1.5, 3.0]), 1e-3, g, CutoffSpec(2.0), probe)
        assert probe.count == 2

    def test_rejects_nonpositive_dt(self):
        g = make_grid(1.0, 5)
        with pytest.raises(ValueError):
            step_explicit(np.ones(5), 0.0, g, CutoffSpec(1.0))


class TestImplicitStep:
    def test_constant_converges_immediately(self):
        g = make_grid(3.0, 31)
        v, it = step_implicit(np.full(31, 2.0), 0.1, g, CutoffSpec(2.0),
                              return_iterations=True)
        assert it == 1 and np.all(v == 2.0)

    def test_zero_iterations_raise(self, bump):
        g = make_grid(2.0, 41)
        with pytest.raises(NewtonDivergence):
            step_implicit(sample_profile(bump, 1.0, g), 1e-3, g, CutoffSpec(1.0),
                          NewtonOptions(max_iter=0))

    def test_solves_backward_euler_system(self, bump):
        g = make_grid(2.0, 81)
        spec = CutoffSpec(1.0)
        u = sample_profile(bump, 1.0, g)
        v = step_implicit(u, 1e-3, g, spec)
        F = v - u - 1e-3 * pde_rhs(v, g, spec)
        assert np.max(np.abs(F)) < 1e-10

    def test_jacobian_matches_finite_differences(self, rng):
        g = make_grid(2.0, 15)
        spec = CutoffSpec(1.0)
        u = 0.4 + rng.uniform(0.0, 1.0, 15)  # straddles the cutoff band
        v = u + rng.normal(0.0, 0.05, 15)
        F, ab = _residual_and_jacobian(v, u, 0.01, g, spec)
        dense = np.diag(ab[1]) + np.diag(ab[0, 1:], 1) + np.diag(ab[2, :-1], -1)
        h = 1e-7
        fd = np.empty_like(dense)
        for j in range(1, 14):
            e = np.zeros(15)
            e[j] = h
            Fp, _ = _residual_and_jacobian(v + e, u, 0.01, g, spec)
            Fm, _ = _residual_and_jacobian(v - e, u, 0.01, g, spec)
            fd[:, j - 1] = (Fp - Fm) / (2 * h)
        assert np.allclose(dense, fd, atol=1e-6, rtol=1e-6)

    def test_agrees_with_explicit_to_second_order_per_step(self):
        g = make_grid(math.pi, 41)
        spec = CutoffSpec(0.5)
        u = 1 + 0.5 * np.sin(g.x)
        gaps = []
        for dt in (1e-3, 5e-4):
            gaps.append(np.max(np.abs(step_implicit(u, dt, g, spec) - step_explicit(u, dt, g, spec))))
        assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.05)


def _config(profile, L=4.0, n=81, t_end=0.1, **kw):
    return SolverConfig(profile=profile, grid=make_grid(L, n), t_end=t_end, **kw)


class TestEvolve:
    @pytest.mark.parametrize("stepper,tol", [("explicit", 1e-12), ("implicit", 1e-9)])
    def test_constant_is_a_fixed_point(self, stepper, tol):
        traj = evolve(_config(InitialProfile("Constant", 2.0), t_end=0.5, stepper=stepper))
        assert np.max(np.abs(traj.samples - 2.0)) < tol

    def test_zero_sigma_stays_zero(self, bump):
        traj = evolve(_config(bump, sigma=0.0))
        assert np.all(traj.samples == 0.0)

    def test_bump_flattens(self, bump):
        traj = evolve(_config(bump, n=161, t_end=0.2))
        peaks = traj.samples.max(axis=1)
        assert np.all(np.diff(peaks) <= 1e-15) and peaks[-1] < peaks[0]

    def test_matches_double_resolution_run(self, bump):
        coarse = evolve(_config(bump, L=3.0, n=121, t_end=0.05))
        fine = evolve(_config(bump, L=3.0, n=241, t_end=0.05))
        assert np.max(np.abs(coarse.samples[-1] - fine.samples[-1][::2])) < 5e-3

    def test_trajectory_shape_and_times(self, bump):
        cfg = _config(bump, t_end=0.1, snapshot_every=7)
        traj = evolve(cfg)
        assert traj.times[0] == 0.0 and traj.times[-1] == 0.1
        assert np.all(np.diff(traj.times) > 0)
        assert traj.samples.shape == (traj.times.size, 81)
        assert traj.config["dt_used"] <= cfg.step_size()

    def test_boundaries_pinned_for_all_time(self, presets):
        for p in presets.values():
            traj = evolve(_config(p, t_end=0.05))
            assert np.all(traj.samples[:, 0] == traj.samples[0, 0])
            assert np.all(traj.samples[:, -1] == traj.samples[0, -1])

    @pytest.mark.parametrize("stepper", ["explicit", "implicit"])
    def test_discrete_extrema_monotone(self, presets, stepper):
        for name, p in presets.items():
            traj = evolve(_config(p, t_end=0.1, stepper=stepper, snapshot_every=1))
            hi, lo = traj.samples.max(axis=1), traj.samples.min(axis=1)
            assert np.all(np.diff(hi) <= 1e-12), name
            assert np.all(np.diff(lo) >= -1e-12), name

    def test_steppers_agree(self, bump):
        ex = evolve(_config(bump, n=81, t_end=0.1))
        im = evolve(_config(bump, n=81, t_end=0.1, stepper="implicit"))
        dt = im.config["dt_used"]
        assert np.max(np.abs(ex.samples[-1] - im.samples[-1])) < 5 * dt

    def test_far_field_is_undisturbed_on_wide_domain(self, bump):
        traj = evolve(_config(bump, L=10.0, n=201, t_end=0.5))
        outer = np.abs(traj.grid.x) >= 5.0
        assert np.max(np.abs(traj.samples[:, outer] - 1.0)) < 1e-4

    def test_no_cutoff_when_data_stays_above_half_m(self, presets):
        for p in presets.values():
            assert evolve(_config(p, t_end=0.05)).cutoff_hits == 0

    def test_cutoff_counted_for_scaled_data(self, bump):
        assert evolve(_config(bump, sigma=0.3, t_end=0.01)).cutoff_hits > 0

    @settings(max_examples=15, deadline=None)
    @given(c=st.floats(0.5, 3.0), A=st.floats(-0.4, 1.0), sigma=st.floats(0.0, 1.0))
    def test_bounds_hold_for_random_bumps(self, c, A, sigma):
        p = InitialProfile("BumpOnConstant", c, A * c, 1.0)
        traj = evolve(_config(p, L=3.0, n=61, t_end=0.05, sigma=sigma))
        assert traj.samples.min() >= sigma * p.m - 1e-12
        assert traj.samples.max() <= sigma * p.sup_f + 1e-12


class TestTrajectoryValidation:
    def test_rejects_bad_times(self, bump):
        g = make_grid(1.0, 3)
        with pytest.raises(ValueError):
            Trajectory(g, np.array([0.1, 0.2]), np.ones((2, 3)), bump)
        with pytest.raises(ValueError):
            Trajectory(g, np.array([0.0, 0.0]), np.ones((2, 3)), bump)

    def test_rejects_bad_shape(self, bump):
        with pytest.raises(ValueError):
            Trajectory(make_grid(1.0, 3), np.array([0.0]), np.ones((1, 5)), bump)

    def test_samples_read_only(self, bump):
        traj = Trajectory(make_grid(1.0, 3), np.array([0.0]), np.ones((1, 3)), bump)
        with pytest.raises(ValueError):
            traj.samples[0, 0] = 2.0

    def test_config_rejects(self, bump):
        with pytest.raises(ValueError):
            _config(bump, sigma=1.2)
        with pytest.raises(ValueError):
            _config(bump, t_end=0.0)
        with pytest.raises(ValueError):
            _config(bump, safety=0.0)
