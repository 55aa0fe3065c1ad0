import math

import numpy as np
import pytest

from inflow_lab.errors import ConfigurationError, PreconditionError
from inflow_lab.solvers import (
    SolverSettings,
    SystemProblem,
    build_grid,
    bump_kernel,
    coupling_matrix,
    freeze_coefficients,
    good_unknown,
    inner_solve,
    mollify,
    outer_solve,
    periodic_shock_time,
    shock_contrast,
    sine_problem,
    zero_problem,
)
from inflow_lab.systems import get_system


class TestMollifier:
    def test_kernel_is_normalized(self):
        weights = bump_kernel(0.3, 0.1)
        assert weights.size == 7
        assert weights.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(weights, weights[::-1])
        assert np.all(weights >= 0.0)

    def test_kernel_narrower_than_spacing(self):
        np.testing.assert_array_equal(bump_kernel(0.05, 0.1), [1.0])

    def test_constants_are_reproduced(self):
        field = np.full((10, 12, 2), 3.0)
        np.testing.assert_allclose(mollify(field, 1, 0.1, 0.1), 3.0)

    def test_sup_does_not_grow(self):
        field = np.random.default_rng(0).standard_normal((20, 30))
        smoothed = mollify(field, 2, 0.05, 0.05)
        assert np.max(np.abs(smoothed)) <= np.max(np.abs(field)) + 1e-12
        assert np.max(np.abs(np.diff(smoothed, axis=1))) <= np.max(np.abs(np.diff(field, axis=1))) + 1e-12

    def test_level_must_be_positive(self):
        with pytest.raises(ValueError):
            mollify(np.zeros((4, 4)), 0, 0.1, 0.1)


class TestProblems:
    def test_sine_data_norm(self):
        problem = sine_problem("burgers", 1e-2)
        assert problem.data_norm(1.0) == pytest.approx(1e-2, rel=1e-4)
        assert problem.compatibility_residual() < 1e-12
        problem.validate(1.0)

    def test_budget_exceeded(self):
        with pytest.raises(ConfigurationError):
            sine_problem("burgers", 0.05).validate(1.0)

    def test_incompatible_data(self):
        system = get_system("burgers")
        problem = SystemProblem(system=system, V0=lambda x: 1e-3 * np.ones(np.shape(x) + (1,)))
        assert problem.compatibility_residual() == pytest.approx(1e-3)
        with pytest.raises(ConfigurationError):
            problem.validate(1.0)

    def test_inflow_points_follow_speeds(self):
        problem = zero_problem("linear2")
        np.testing.assert_allclose(problem.base_speeds(), [-1.0, 1.0])
        np.testing.assert_allclose(problem.inflow_points(), [1.0, -1.0])

    def test_component_out_of_range(self):
        with pytest.raises(ConfigurationError):
            sine_problem("psystem", 1e-2, component=2)

    def test_pulse_keeps_compatibility(self):
        problem = sine_problem("linear2", 1e-3, pulse=1e-3)
        assert problem.compatibility_residual() < 1e-12
        np.testing.assert_allclose(problem.inflow_values(np.array([0.5]))[0], [1e-3, 1e-3])


class TestSettings:
    def test_small_grid_rejected(self):
        with pytest.raises(PreconditionError):
            SolverSettings(grid=4)

    def test_grid_covers_horizon(self):
        times, x = build_grid(zero_problem("burgers"), SolverSettings(grid=33, horizon=1.0))
        assert x.size == 33
        assert times.size == 9
        assert times[-1] == pytest.approx(1.0)


class TestIteration:
    def test_zero_data_converge_at_first_level(self):
        result = outer_solve(zero_problem("linear2"), SolverSettings(grid=33, horizon=1.0))
        assert result.converged_level == 1
        assert result.levels[0].inner_iterations == 1
        assert np.all(result.V == 0.0)
        assert result.empirical_constant == 0.0
        assert result.stable
        assert set(result.series()) == {"t", "sup_V", "sup_dxV", "sup_dtV", "norm_sum"}

    def test_constant_frame_has_no_coupling(self):
        problem = zero_problem("linear2")
        times, x = build_grid(problem, SolverSettings(grid=17, horizon=0.5))
        V = 1e-3 * np.random.default_rng(1).standard_normal((times.size, x.size, 2))
        state = freeze_coefficients(problem, V, 1, times, x)
        np.testing.assert_array_equal(coupling_matrix(state), 0.0)

    def test_varying_frame_couples_families(self):
        problem = zero_problem("psystem")
        times, x = build_grid(problem, SolverSettings(grid=17, horizon=0.5))
        V = np.zeros((times.size, x.size, 2))
        V[..., 0] = 0.01 * np.sin(np.pi * x)[None, :]
        state = freeze_coefficients(problem, V, 4, times, x)
        M = coupling_matrix(state)
        assert M.shape == (times.size, x.size, 2, 2)
        assert np.max(np.abs(M)) > 0.0

    def test_uncoupled_inner_solve_and_good_unknown(self):
        problem = sine_problem("linear2", 1e-2)
        times, x = build_grid(problem, SolverSettings(grid=33, horizon=0.5))
        state = freeze_coefficients(problem, np.zeros((times.size, x.size, 2)), 1, times, x)
        inner = inner_solve(state, problem)
        assert inner.iterations == 1
        assert inner.f.shape == (times.size, x.size, 2)
        np.testing.assert_allclose(inner.f[0], problem.initial_characteristic(x), atol=1e-12)

        good = good_unknown(state, inner.f)
        V = np.einsum("...ij,...j->...i", state.frame.T, inner.f)
        np.testing.assert_allclose(good.dt_V, np.gradient(V, times, axis=0, edge_order=2), atol=1e-12)
        assert good.dx_V.shape == V.shape

    @pytest.mark.slow
    def test_small_burgers_data(self):
        result = outer_solve(sine_problem("burgers", 1e-2), SolverSettings(grid=64, horizon=4.0))
        assert result.converged
        assert result.stable
        assert result.levels[-1].induction_norm < 0.05


class TestShock:
    def test_periodic_shock_time(self):
        assert periodic_shock_time(0.05) == pytest.approx(1.0 / (0.05 * math.pi), rel=1e-3)
        assert periodic_shock_time(0.05, mode=2) == pytest.approx(1.0 / (0.1 * math.pi), rel=1e-3)

    def test_zero_amplitude_never_shocks(self):
        assert periodic_shock_time(0.0) == math.inf

    def test_contrast_amplitude_limit(self):
        with pytest.raises(PreconditionError):
            shock_contrast(0.2)
