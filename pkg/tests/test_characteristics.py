import math

import numpy as np
import pytest

from inflow_lab.config import Region
from inflow_lab.errors import ConfigurationError
from inflow_lab.transport import (
    SpeedField1D,
    backward_exit,
    exit_time_field,
    follow_characteristic,
    gamma_curve,
    gamma_exit_time,
    gamma_position,
    speed_from_spec,
    trace,
    trace_forward,
)


@pytest.fixture
def unit_speed():
    return SpeedField1D.constant(1.0)


def test_trace_translation(unit_speed):
    result = trace(unit_speed, 1.0, 0.5, 0.25)
    assert not result.exited
    assert result.x == pytest.approx(-0.25, abs=1e-9)


def test_trace_exits_at_inflow(unit_speed):
    result = trace(unit_speed, 1.0, -0.5, 0.0)
    assert result.exited
    assert result.x == -1.0
    assert result.exit_time == pytest.approx(0.5, abs=1e-9)


def test_trace_rejects_forward_time(unit_speed):
    with pytest.raises(ValueError):
        trace(unit_speed, 0.5, 0.0, 1.0)


def test_trace_affine_closed_form():
    # x' = 1 + x/4 has x(t) = (x0 + 4) exp(t/4) - 4
    speed = SpeedField1D.affine(1.0, 0.25)
    result = trace(speed, 1.0, 0.5, 0.5)
    assert result.x == pytest.approx(4.5 * math.exp(-0.125) - 4.0, abs=1e-8)


def test_trace_forward_reaches_outflow(unit_speed):
    result = trace_forward(unit_speed, 0.0, 0.0, 3.0)
    assert result.exited
    assert result.exit_time == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("t,x,region,t_b,x_b", [
    (1.0, 0.5, Region.Q_PLUS, 0.0, -0.5),
    (1.0, -0.5, Region.Q_MINUS, 0.5, -1.0),
    (0.0, 0.3, Region.Q_PLUS, 0.0, 0.3),
    (0.7, -1.0, Region.Q_MINUS, 0.7, -1.0),
])
def test_backward_exit_regions(unit_speed, t, x, region, t_b, x_b):
    record = backward_exit(unit_speed, t, x)
    assert record.region is region
    assert record.t_b == pytest.approx(t_b, abs=1e-9)
    assert record.x_b == pytest.approx(x_b, abs=1e-9)


def test_corner_characteristic_is_gamma(unit_speed):
    path = follow_characteristic(unit_speed, 1.0, 0.0, tol_gamma=1e-6)
    assert path.record.region is Region.GAMMA
    assert path.record.x_b == -1.0


def test_negative_speed_enters_at_right():
    speed = SpeedField1D.constant(-1.0)
    assert speed.inflow_point == 1.0
    record = backward_exit(speed, 1.0, 0.5)
    assert record.region is Region.Q_MINUS
    assert record.x_b == 1.0
    assert record.t_b == pytest.approx(0.5, abs=1e-9)


def test_forcing_integral_along_path(unit_speed):
    path = follow_characteristic(unit_speed, 1.0, 0.5, forcing=lambda t, x: np.ones_like(x))
    assert path.integral_full == pytest.approx(1.0, rel=1e-8)


def test_gamma_curve_and_exit(unit_speed):
    assert gamma_exit_time(unit_speed, 5.0) == pytest.approx(2.0, abs=1e-9)
    assert gamma_exit_time(unit_speed, 1.0) is None
    points = gamma_curve(unit_speed, 1.0, samples=11)
    ts, xs = np.array(points).T
    np.testing.assert_allclose(xs, ts - 1.0, atol=1e-9)
    assert gamma_position(unit_speed, 0.5) == pytest.approx(-0.5, abs=1e-9)
    assert gamma_position(unit_speed, 3.0) is None


def test_exit_time_field(unit_speed):
    t_b, regions = exit_time_field(unit_speed, [0.5, 1.5], [-0.9, 0.9])
    assert t_b.shape == (2, 2)
    assert regions[0, 1] == Region.Q_PLUS.value
    assert regions[1, 0] == Region.Q_MINUS.value
    assert t_b[1, 0] == pytest.approx(1.4, abs=1e-9)


def test_speed_specs():
    assert speed_from_spec(2.0).lambda_m == 2.0
    affine = speed_from_spec({"kind": "affine", "a": 1.0, "b": 0.25})
    assert affine.lambda_m == pytest.approx(0.75)
    affine.validate(t_max=2.0)
    with pytest.raises(ConfigurationError):
        speed_from_spec({"kind": "vortex"})
    with pytest.raises(ConfigurationError):
        SpeedField1D.affine(1.0, 1.0)
    with pytest.raises(ConfigurationError):
        SpeedField1D.constant(0.0)


def test_pulsating_speed_is_not_autonomous():
    speed = SpeedField1D.pulsating(1.0, 0.5)
    assert not speed.autonomous
    assert speed.time_log_derivative_bound(t_max=2.0) > 0.0
    assert speed.eval_dt(0.0, 0.0) == pytest.approx(0.5)
