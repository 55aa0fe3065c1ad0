import numpy as np
import pytest

from inflow_lab.errors import ConfigurationError, PreconditionError, StabilityBudgetError
from inflow_lab.harness import swirl_velocity
from inflow_lab.pipe import (
    REGION_CODES,
    SERIES_COLUMNS,
    EulerSettings,
    PipeBoundaryData,
    PipeGrid,
    ShearProfile,
    SmallnessBudget3D,
    boundary_from_spec,
    boundary_norm,
    check_compatibility,
    div_omega_monitor,
    euler_solve,
    lateral_invariance_check,
    lateral_swirl_data,
    profile_from_spec,
    pulse_data,
    region_labels,
    shear_vorticity,
    stretching,
    tangential_residual,
    tangential_vanish_monitor,
    transport3d_solve,
    vorticity_iterate,
    weighted_lp_decay_check,
    zero_data,
)


def streamwise(grid, speed=1.0):
    u = np.zeros((3,) + grid.shape)
    u[0] = speed
    return u


def wave(x1, x2, x3):
    return np.sin(np.pi * x1) * np.cos(np.pi * x2 / 2) * np.cos(np.pi * x3 / 2)


def wave_inflow(s, x2, x3):
    return wave(-1.0 - s, x2, x3)


class TestProfiles:
    def test_plug(self):
        grid = PipeGrid(9)
        plug = ShearProfile.plug(1.5)
        assert plug.min_speed(grid) == plug.max_speed(grid) == 1.5
        assert plug.lateral_residual(grid) == 0.0
        assert plug.smallness(grid, delta=0.05)["passed"]

    def test_product_cosine_is_admissible(self):
        grid = PipeGrid(9)
        profile = ShearProfile.product_cosine(c=2.0, amplitude=0.02)
        assert profile.lateral_residual(grid) < 1e-10
        assert tangential_residual(shear_vorticity(profile, grid)) < 1e-10

    def test_cosine_shear_needs_integer_mode(self):
        grid = PipeGrid(9)
        assert ShearProfile.cosine_shear(m=2.0).lateral_residual(grid) > 0.1

    def test_nonpositive_speed_rejected(self):
        with pytest.raises(ConfigurationError):
            ShearProfile.product_cosine(c=0.5, amplitude=1.0).validate(PipeGrid(9))

    def test_profile_specs(self):
        profile = profile_from_spec({"kind": "product-cosine", "c": 2.0, "amplitude": 0.02})
        assert profile.name == "product-cosine"
        assert profile_from_spec("plug").name == "plug"
        with pytest.raises(ConfigurationError):
            profile_from_spec("parabolic")
        with pytest.raises(ConfigurationError):
            profile_from_spec({"kind": "plug", "m": 1.0})


class TestBoundaryData:
    def test_specs(self):
        assert boundary_from_spec(None).name == "zero"
        assert boundary_from_spec("lateral-swirl").name == "lateral-swirl"
        with pytest.raises(ConfigurationError):
            boundary_from_spec({"kind": "jet"})

    def test_pulse_profile(self):
        grid = PipeGrid(9)
        data = pulse_data(amplitude=1e-3)
        np.testing.assert_allclose(data.inflow(grid, 0.5), 1e-3)
        np.testing.assert_allclose(data.outflow(grid, 0.5), 1e-3)
        np.testing.assert_array_equal(data.inflow(grid, 1.5), 0.0)

    def test_zero_data_have_zero_norm(self):
        grid = PipeGrid(9)
        assert boundary_norm(zero_data(), grid, np.linspace(0.0, 1.0, 3), 4.0) == 0.0


class TestCompatibility:
    def test_zero_data_pass(self):
        report = check_compatibility(ShearProfile.plug(), zero_data(), PipeGrid(16))
        assert report.passed
        assert report.failures() == []

    def test_lateral_swirl_passes(self):
        report = check_compatibility(ShearProfile.cosine_shear(c=2.0, amplitude=0.02),
                                     lateral_swirl_data(1e-3), PipeGrid(16))
        assert report.passed, [c.name for c in report.failures()]

    def test_unbalanced_flux(self):
        def ones(t, x2, x3):
            return np.ones(np.broadcast(t, x2, x3).shape)

        report = check_compatibility(ShearProfile.plug(), PipeBoundaryData(v_b_minus=ones), PipeGrid(16))
        assert not report.passed
        flux = report.get("flux_balance")
        assert not flux.passed
        assert flux.residual == pytest.approx(4.0, rel=1e-8)
        assert not report.get("v0_normal_trace").passed

    def test_streamwise_inflow_vorticity(self):
        def tilted(t, x2, x3):
            shape = np.broadcast(t, x2, x3).shape
            return np.stack([np.full(shape, 0.1), np.zeros(shape), np.zeros(shape)])

        report = check_compatibility(ShearProfile.plug(), PipeBoundaryData(omega_b_minus=tilted), PipeGrid(16))
        assert report.get("omega_b1_zero").residual == pytest.approx(0.1)
        assert "omega_b1_zero" in [c["name"] for c in report.to_dict()["conditions"]]

    def test_negative_profile_fails(self):
        report = check_compatibility(ShearProfile.product_cosine(c=0.5, amplitude=1.0), zero_data(), PipeGrid(9))
        assert not report.get("profile_positive").passed


class TestTransport3D:
    def test_linear_profile_is_carried(self):
        grid = PipeGrid(9)
        x1 = grid.mesh()[0]
        run = transport3d_solve(grid, streamwise(grid), x1, 0.5,
                                b=lambda s, x2, x3: -1.0 - s + 0.0 * x2, dt=grid.h, epsilon=0.0)
        assert run.times.size == 3
        np.testing.assert_allclose(run.values[-1], x1 - 0.5, atol=1e-10)
        assert run.final.t == pytest.approx(0.5)

    def test_smooth_field_is_translated(self):
        grid = PipeGrid(17)
        X = grid.mesh()
        run = transport3d_solve(grid, streamwise(grid), wave(*X), 0.5, b=wave_inflow, epsilon=0.0)
        np.testing.assert_allclose(run.values[-1], wave(X[0] - 0.5, X[1], X[2]), atol=1e-10)

    def test_step_count_does_not_diffuse(self):
        grid = PipeGrid(17)
        X = grid.mesh()
        coarse = transport3d_solve(grid, streamwise(grid), wave(*X), 0.3, b=wave_inflow, epsilon=0.0)
        fine = transport3d_solve(grid, streamwise(grid), wave(*X), 0.3, b=wave_inflow,
                                 dt=grid.h / 8, epsilon=0.0)
        assert fine.times.size > 4 * coarse.times.size
        np.testing.assert_allclose(fine.values[-1], coarse.values[-1], atol=1e-10)
        inflow_side = X[0] <= -0.7
        np.testing.assert_allclose(fine.values[-1][inflow_side], wave(X[0] - 0.3, X[1], X[2])[inflow_side],
                                   atol=1e-12)

    def test_regions_follow_corner_characteristic(self):
        grid = PipeGrid(17)
        x1 = grid.mesh()[0]
        run = transport3d_solve(grid, streamwise(grid), np.zeros(grid.shape), 0.5, epsilon=0.0)
        assert run.regions.shape == (run.times.size,) + grid.shape
        labels = region_labels(run.regions)
        assert set(labels[0][x1 > -1.0].ravel()) == {"Q_plus"}
        final = labels[-1]
        assert set(final[x1 < -0.6].ravel()) == {"Q_minus"}
        assert set(final[np.isclose(x1, -0.5)].ravel()) == {"Gamma"}
        assert set(final[x1 > -0.4].ravel()) == {"Q_plus"}
        assert [r.value for r in REGION_CODES] == ["Q_plus", "Q_minus", "Gamma"]

    @pytest.mark.slow
    def test_translation_on_finer_grid(self):
        grid = PipeGrid(33)
        X = grid.mesh()
        run = transport3d_solve(grid, streamwise(grid), wave(*X), 0.5, b=wave_inflow,
                                dt=grid.h / 2, epsilon=0.0)
        np.testing.assert_allclose(run.values[-1], wave(X[0] - 0.5, X[1], X[2]), atol=1e-10)

    def test_zero_inflow_flushes_and_decays(self):
        grid = PipeGrid(9)
        budget = SmallnessBudget3D(c1=1.0, c2=1.0)
        run = transport3d_solve(grid, streamwise(grid), np.ones(grid.shape), 2.5, budget=budget,
                                dt=grid.h, epsilon=0.0)
        assert run.budget_report["passed"]
        np.testing.assert_allclose(run.values[-1], 0.0, atol=1e-10)
        report = weighted_lp_decay_check(run)
        assert report.passed
        assert report.lhs == pytest.approx(report.components["wf0"])

    def test_stalled_velocity_rejected(self):
        grid = PipeGrid(9)
        with pytest.raises(PreconditionError):
            transport3d_solve(grid, np.zeros((3,) + grid.shape), np.zeros(grid.shape), 0.2, dt=0.1)

    def test_budget_bounds(self):
        with pytest.raises(PreconditionError):
            SmallnessBudget3D(c1=2.0, c2=1.0)

    def test_lateral_faces_are_invariant(self):
        report = lateral_invariance_check(swirl_velocity(), horizon=2.0, samples=3, tol=1e-8)
        assert report.passed
        assert report.max_drift < 1e-8


class TestVorticity:
    def test_stretching(self):
        omega = np.array([1.0, 0.0, 0.0])
        grad_u = np.diag([1.0, -1.0, 0.0])
        np.testing.assert_allclose(stretching(omega, grad_u), [1.0, 0.0, 0.0])

    def test_uniform_flow_needs_one_sweep(self):
        grid = PipeGrid(9)
        times = np.linspace(0.0, 0.5, 3)
        v = np.zeros((times.size, 3) + grid.shape)
        result = vorticity_iterate(ShearProfile.plug(), grid, times, v, np.zeros((3,) + grid.shape), zero_data())
        assert result.iterations == 1
        assert result.omega.shape == (3, 3, 9, 9, 9)
        np.testing.assert_array_equal(result.omega, 0.0)

    def test_inflow_vorticity_is_translated(self):
        grid = PipeGrid(17)
        X = grid.mesh()
        weights = np.array([1.0, 0.5, -0.25])

        def field(x1, x2, x3):
            return weights.reshape((3,) + (1,) * np.ndim(x1)) * wave(x1, x2, x3)

        bdata = PipeBoundaryData(omega_b_minus=lambda s, x2, x3: field(-1.0 - s, x2, x3))
        times = np.linspace(0.0, 0.5, 3)
        v = np.zeros((times.size, 3) + grid.shape)
        result = vorticity_iterate(ShearProfile.plug(), grid, times, v, field(*X), bdata, epsilon=0.0)
        assert result.iterations == 1
        for k, t in enumerate(times):
            np.testing.assert_allclose(result.omega[k], field(X[0] - t, X[1], X[2]), atol=1e-6)

    def test_shear_vorticity_monitors(self):
        grid = PipeGrid(9)
        omega = shear_vorticity(ShearProfile.product_cosine(amplitude=0.02), grid)[None]
        assert div_omega_monitor(omega, grid)[0] < 1e-10
        assert tangential_vanish_monitor(omega)[0] < 1e-10


class TestEuler:
    def test_settings_validation(self):
        with pytest.raises(PreconditionError):
            EulerSettings(window=0.0)
        with pytest.raises(PreconditionError):
            EulerSettings(n_max=0)

    def test_zero_data(self):
        result = euler_solve(ShearProfile.plug(), zero_data(), EulerSettings(grid=9, horizon=0.5, window=0.5))
        assert result.converged_n == 1
        assert set(result.series) == set(SERIES_COLUMNS)
        for name in SERIES_COLUMNS[1:]:
            np.testing.assert_array_equal(result.series[name], 0.0)
        assert all(result.verdicts().values())

    def test_plug_pulse_keeps_vorticity_zero(self):
        result = euler_solve(ShearProfile.plug(), pulse_data(1e-3), EulerSettings(grid=9, horizon=1.0, window=0.5))
        assert result.converged
        assert len(result.windows) == 2
        assert np.max(np.abs(result.omega_final)) == 0.0
        assert np.max(result.series["momentum_residual"]) < 1e-8
        assert np.all(np.diff(result.series["t"]) > 0)
        assert result.verdicts()["stability"]

    def test_incompatible_data_rejected(self):
        def ones(t, x2, x3):
            return np.ones(np.broadcast(t, x2, x3).shape)

        with pytest.raises(PreconditionError):
            euler_solve(ShearProfile.plug(), PipeBoundaryData(v_b_minus=ones), EulerSettings(grid=9, horizon=0.5))

    def test_induction_budget(self):
        with pytest.raises(StabilityBudgetError):
            euler_solve(ShearProfile.plug(), pulse_data(10.0), EulerSettings(grid=9, horizon=0.5, window=0.5))

    @pytest.mark.slow
    def test_product_cosine_pulse(self):
        profile = ShearProfile.product_cosine(c=2.0, amplitude=0.02)
        result = euler_solve(profile, pulse_data(1e-3), EulerSettings(grid=16, horizon=2.0))
        assert result.converged
        assert result.verdicts()["stability"]
