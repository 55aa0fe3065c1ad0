import numpy as np
import pytest

from inflow_lab.config import Region
from inflow_lab.errors import ConfigurationError, PreconditionError, UnsupportedConfigurationError
from inflow_lab.transport import (
    Datum,
    SpeedField1D,
    TransportProblem1D,
    WeightParams,
    check_time_derivative_estimate,
    check_weighted_sup_estimate,
    decay_series,
    evaluate_point,
    flush_check,
    march_mild,
    mild_residual,
    restart,
    snapshot,
    solve_mild,
    solve_time_derivative,
    trace_at_outflow,
    uniform_grid,
)


def sine_datum():
    return Datum(func=lambda x: np.sin(np.pi * x), sup=1.0, lip=np.pi,
                 deriv=lambda x: np.pi * np.cos(np.pi * x), name="sin")


def translated_sine(t, x):
    return np.where(x - t >= -1.0, np.sin(np.pi * (x - t)), 0.0)


@pytest.fixture
def sine_problem():
    return TransportProblem1D(speed=SpeedField1D.constant(1.0), f0=sine_datum())


@pytest.fixture
def forced_problem():
    return TransportProblem1D(speed=SpeedField1D.constant(1.0), h=Datum.constant(1.0))


def test_translation_matches_shift(sine_problem):
    assert sine_problem.is_compatible
    field = solve_mild(sine_problem, 0.5, 65)
    np.testing.assert_allclose(field.values, translated_sine(0.5, field.x), atol=1e-8)
    assert field.max_jump == 0.0


def test_zero_data_give_zero():
    problem = TransportProblem1D(speed=SpeedField1D.affine(1.0, 0.25))
    assert solve_mild(problem, 1.3, 17).sup_norm() == 0.0


def test_forcing_from_rest(forced_problem):
    field = solve_mild(forced_problem, 1.5, 33)
    np.testing.assert_allclose(field.values, np.minimum(1.5, field.x + 1.0), atol=1e-8)


def test_regions_are_labelled(forced_problem):
    field = solve_mild(forced_problem, 1.0, 5)
    assert list(field.regions) == [Region.Q_MINUS.value, Region.Q_MINUS.value, Region.GAMMA.value,
                                   Region.Q_PLUS.value, Region.Q_PLUS.value]
    assert field.region_mask(Region.Q_PLUS).sum() == 2


def test_incompatible_data_jump_on_gamma():
    problem = TransportProblem1D(speed=SpeedField1D.constant(1.0), f0=Datum.constant(1.0))
    assert not problem.is_compatible
    assert problem.compatibility_residual == pytest.approx(1.0)
    point = evaluate_point(problem, 1.0, 0.0)
    assert point.region is Region.GAMMA
    assert point.jump == pytest.approx(1.0)
    field = solve_mild(problem, 1.0, 5)
    assert field.max_jump == pytest.approx(1.0)


def test_outflow_trace():
    problem = TransportProblem1D(speed=SpeedField1D.constant(1.0),
                                 f0=Datum(func=lambda x: x, sup=1.0, lip=1.0), b=Datum.constant(-1.0))
    result = trace_at_outflow(problem, 3.0, samples=31)
    assert result.gamma_time == pytest.approx(2.0, abs=1e-9)
    before = result.times < 1.95
    after = result.times > 2.05
    np.testing.assert_allclose(result.values[before], 1.0 - result.times[before], atol=1e-8)
    np.testing.assert_allclose(result.values[after], -1.0, atol=1e-12)


def test_restart_reproduces_solution(sine_problem):
    restarted = restart(sine_problem, snapshot(sine_problem, 0.4), 0.4)
    later = solve_mild(restarted, 0.3, 17)
    direct = solve_mild(sine_problem, 0.7, 17)
    np.testing.assert_allclose(later.values, direct.values, atol=1e-8)


def test_time_derivative_of_forced_problem(forced_problem):
    result = solve_time_derivative(forced_problem, 0.5, 21)
    x = result.dt_f.x
    upstream, downstream = x < -0.65, x > -0.35
    np.testing.assert_allclose(result.dt_f.values[downstream], 1.0, atol=1e-8)
    np.testing.assert_allclose(result.dt_f.values[upstream], 0.0, atol=1e-8)
    np.testing.assert_allclose(result.dx_f.values[downstream], 0.0, atol=1e-8)
    np.testing.assert_allclose(result.dx_f.values[upstream], 1.0, atol=1e-8)


def test_time_derivative_needs_autonomous_speed():
    problem = TransportProblem1D(speed=SpeedField1D.pulsating(1.0, 0.5))
    with pytest.raises(UnsupportedConfigurationError):
        solve_time_derivative(problem, 0.5, 9)


def test_time_derivative_needs_compatible_data():
    problem = TransportProblem1D(speed=SpeedField1D.constant(1.0), f0=Datum.constant(1.0))
    with pytest.raises(PreconditionError):
        solve_time_derivative(problem, 0.5, 9)


def test_mild_residual(sine_problem):
    report = mild_residual(sine_problem, 0.5, 65)
    assert report.nodes_checked > 40
    assert report.max_residual < 1e-5


def test_weighted_decay(sine_problem):
    params = WeightParams.for_speed(sine_problem.speed)
    assert params.alpha == pytest.approx(2.0)
    series = decay_series(sine_problem, params, np.linspace(0.0, 2.5, 6), grid=65)
    assert series.passed
    assert series.lhs[-1] == 0.0


def test_flush(sine_problem):
    report = flush_check(sine_problem, grid=65)
    assert report.flush_time == pytest.approx(2.0)
    assert report.passed


def test_weighted_sup_estimate_with_forcing(forced_problem):
    params = WeightParams(alpha=2.0, lambda_m=1.0)
    report = check_weighted_sup_estimate(forced_problem, params, horizon=4.0, grid=33, samples=9)
    assert report.passed
    # sup_x exp(-2x) (x + 1) is attained at x = -1/2
    assert report.lhs == pytest.approx(np.e / 2.0, rel=1e-6)
    assert report.rhs == pytest.approx(np.exp(2.0) / 2.0, rel=1e-6)


def test_time_derivative_estimate(forced_problem):
    report = check_time_derivative_estimate(forced_problem, WeightParams(alpha=1.0, lambda_m=1.0),
                                            horizon=2.0, grid=33, samples=5)
    assert report.passed


def test_weight_params_validation():
    with pytest.raises(ConfigurationError):
        WeightParams(alpha=0.0, lambda_m=1.0)
    with pytest.raises(ConfigurationError):
        uniform_grid(2)


def test_declared_bounds_are_audited():
    problem = TransportProblem1D(speed=SpeedField1D.constant(1.0),
                                 f0=Datum(func=lambda x: 2.0 * np.ones_like(x), sup=1.0))
    with pytest.raises(ConfigurationError):
        problem.validate()


class TestMarch:
    def test_translation(self):
        times = np.linspace(0.0, 0.5, 17)
        x = np.linspace(-1.0, 1.0, 129)
        f = march_mild(times, x, SpeedField1D.constant(1.0), np.sin(np.pi * x))
        assert f.shape == (17, 129)
        np.testing.assert_allclose(f[-1], translated_sine(0.5, x), atol=1e-5)

    def test_forcing_and_inflow_crossing(self):
        times = np.linspace(0.0, 1.5, 25)
        x = np.linspace(-1.0, 1.0, 33)
        f = march_mild(times, x, np.ones((25, 33)), np.zeros(33), h=lambda t, y: np.ones_like(y))
        np.testing.assert_allclose(f[-1], np.minimum(1.5, x + 1.0), atol=1e-9)

    def test_boundary_samples(self):
        times = np.linspace(0.0, 2.5, 41)
        x = np.linspace(-1.0, 1.0, 33)
        f = march_mild(times, x, SpeedField1D.constant(1.0), np.zeros(33), b=np.full(41, 0.5))
        np.testing.assert_allclose(f[-1], 0.5, atol=1e-10)

    def test_sign_change_rejected(self):
        times = np.linspace(0.0, 1.0, 5)
        x = np.linspace(-1.0, 1.0, 9)
        speed = np.ones((5, 9))
        speed[2, 4] = -1.0
        with pytest.raises(PreconditionError):
            march_mild(times, x, speed, np.zeros(9))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(PreconditionError):
            march_mild(np.linspace(0.0, 1.0, 5), np.linspace(-1.0, 1.0, 9), np.ones((4, 9)), np.zeros(9))
