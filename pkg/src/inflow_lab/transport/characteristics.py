"""Characteristic curves of d_t + lambda d_x on [-1, 1].

Backward characteristics are integrated in the reversed time variable
s = t - tau with an adaptive Dormand-Prince pair and a terminal event at the
inflow point. A forcing integral can be carried as an extra ODE component so
that the line integral of h shares the same adaptive steps as the curve.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from ..config import Region, get_config
from ..errors import SolverFailureError
from .speed import SpeedField1D

logger = logging.getLogger(__name__)

Forcing = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TraceResult:
    """Position of a traced characteristic at the requested time."""
    x: float
    exited: bool
    exit_time: Optional[float] = None


@dataclass(frozen=True)
class ExitRecord:
    """Backward exit time, exit point and region of a space-time point."""
    t_b: float
    x_b: float
    region: Region


@dataclass(frozen=True)
class CharacteristicPath:
    """Backward characteristic through (t, x) with forcing integrals.

    Attributes:
        record: Exit record of (t, x).
        x_at_zero: X(0; t, x) when the curve stays inside up to time 0.
        integral_full: Integral of h over [0, t] along the curve (valid for
            Q_plus and Gamma points).
        integral_from_exit: Integral of h over [t_b, t] (valid for Q_minus
            and Gamma points).
    """
    record: ExitRecord
    x_at_zero: Optional[float]
    integral_full: float
    integral_from_exit: float


def _inside_distance(speed: SpeedField1D, x: float) -> float:
    return speed.sign * (x - speed.inflow_point)


def _integrate_backward(
    speed: SpeedField1D,
    t: float,
    x: float,
    s_end: float,
    forcing: Optional[Forcing] = None,
):
    """Integrate X backward from (t, x) for reversed time s in [0, s_end].

    Returns the solve_ivp solution object, or None when s_end is zero.
    """
    if s_end <= 0.0:
        return None
    config = get_config()

    def rhs(s, y):
        tau = t - s
        lam = float(speed.eval(tau, y[0]))
        dI = 0.0 if forcing is None else float(forcing(tau, np.clip(y[0], -1.0, 1.0)))
        return [-lam, dI]

    def hit_inflow(s, y):
        return _inside_distance(speed, y[0])

    hit_inflow.terminal = True
    hit_inflow.direction = -1

    sol = solve_ivp(
        rhs,
        (0.0, s_end),
        [float(x), 0.0],
        method="RK45",
        rtol=config.ode_rtol,
        atol=config.ode_atol,
        events=hit_inflow,
    )
    if sol.status < 0:
        raise SolverFailureError(f"characteristic integration failed: {sol.message}")
    return sol


def trace(speed: SpeedField1D, t: float, x: float, tau: float) -> TraceResult:
    """X(tau; t, x) for tau <= t.

    Args:
        speed: Transport speed.
        t: Time of the starting point.
        x: Position of the starting point in [-1, 1].
        tau: Earlier time at which the position is requested.

    Returns:
        The position at ``tau``, or the inflow point together with the exit
        time when the curve leaves [-1, 1] before ``tau``.

    Raises:
        ValueError: If ``tau > t``.
    """
    if tau > t:
        raise ValueError(f"trace integrates backward; got tau={tau} > t={t}")
    x_in = speed.inflow_point
    if t > tau and abs(x - x_in) == 0.0:
        return TraceResult(x=x_in, exited=True, exit_time=float(t))
    sol = _integrate_backward(speed, t, x, t - tau)
    if sol is None:
        return TraceResult(x=float(x), exited=False)
    if sol.status == 1 and sol.t_events[0].size:
        s_exit = float(sol.t_events[0][0])
        return TraceResult(x=x_in, exited=True, exit_time=t - s_exit)
    return TraceResult(x=float(sol.y[0, -1]), exited=False)


def trace_forward(speed: SpeedField1D, t0: float, x0: float, t1: float) -> TraceResult:
    """X(t1; t0, x0) for t1 >= t0, stopping at the outflow point."""
    if t1 < t0:
        raise ValueError(f"trace_forward integrates forward; got t1={t1} < t0={t0}")
    if t1 == t0:
        return TraceResult(x=float(x0), exited=False)
    config = get_config()
    x_out = speed.outflow_point

    def rhs(tau, y):
        return [float(speed.eval(tau, y[0]))]

    def hit_outflow(tau, y):
        return speed.sign * (x_out - y[0])

    hit_outflow.terminal = True
    hit_outflow.direction = -1

    if abs(x0 - x_out) == 0.0:
        return TraceResult(x=x_out, exited=True, exit_time=float(t0))
    sol = solve_ivp(rhs, (t0, t1), [float(x0)], method="RK45",
                    rtol=config.ode_rtol, atol=config.ode_atol, events=hit_outflow)
    if sol.status == 1 and sol.t_events[0].size:
        return TraceResult(x=x_out, exited=True, exit_time=float(sol.t_events[0][0]))
    return TraceResult(x=float(sol.y[0, -1]), exited=False)


def follow_characteristic(
    speed: SpeedField1D,
    t: float,
    x: float,
    forcing: Optional[Forcing] = None,
    tol_gamma: Optional[float] = None,
) -> CharacteristicPath:
    """Trace the backward characteristic through (t, x) and classify the point.

    Args:
        speed: Transport speed.
        t: Time, t >= 0.
        x: Position in [-1, 1].
        forcing: Optional h(t, x) integrated along the curve.
        tol_gamma: Position band around the corner characteristic; defaults
            to the configured ``tol_gamma``.

    Returns:
        The CharacteristicPath with exit record and forcing integrals.
    """
    tol = get_config().tol_gamma if tol_gamma is None else tol_gamma
    x_in = speed.inflow_point

    if t <= 0.0:
        region = Region.GAMMA if abs(x - x_in) <= tol else Region.Q_PLUS
        return CharacteristicPath(ExitRecord(0.0, float(x), region), float(x), 0.0, 0.0)

    if abs(x - x_in) <= tol:
        # already on the inflow boundary: boundary datum at the same time
        return CharacteristicPath(ExitRecord(float(t), x_in, Region.Q_MINUS), None, 0.0, 0.0)

    sol = _integrate_backward(speed, t, x, t, forcing)
    if sol.status == 1 and sol.t_events[0].size:
        s_exit = float(sol.t_events[0][0])
        integral = float(sol.y_events[0][0][1])
        t_b = max(t - s_exit, 0.0)
        speed_at_corner = abs(float(speed.eval(0.0, x_in)))
        if t_b * speed_at_corner <= tol:
            return CharacteristicPath(ExitRecord(0.0, x_in, Region.GAMMA), x_in, integral, integral)
        return CharacteristicPath(ExitRecord(t_b, x_in, Region.Q_MINUS), None, float("nan"), integral)

    x0 = float(sol.y[0, -1])
    integral = float(sol.y[1, -1])
    if abs(x0 - x_in) <= tol:
        return CharacteristicPath(ExitRecord(0.0, x_in, Region.GAMMA), x_in, integral, integral)
    return CharacteristicPath(ExitRecord(0.0, x0, Region.Q_PLUS), x0, integral, float("nan"))


def backward_exit(speed: SpeedField1D, t: float, x: float) -> ExitRecord:
    """Backward exit time, exit point and region of (t, x)."""
    return follow_characteristic(speed, t, x).record


def gamma_curve(speed: SpeedField1D, t_max: float, samples: int = 101) -> list[tuple[float, float]]:
    """Sample the corner characteristic issuing from (0, inflow point).

    Args:
        speed: Transport speed.
        t_max: Final time, positive.
        samples: Number of uniformly spaced sample times in [0, t_max].

    Returns:
        (t, x) points up to t_max, or up to the time the curve reaches the
        outflow point; in that case the exit point is the last entry.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    config = get_config()
    x_in, x_out = speed.inflow_point, speed.outflow_point

    def rhs(tau, y):
        return [float(speed.eval(tau, y[0]))]

    def hit_outflow(tau, y):
        return speed.sign * (x_out - y[0])

    hit_outflow.terminal = True
    hit_outflow.direction = -1

    sol = solve_ivp(rhs, (0.0, t_max), [x_in], method="RK45", rtol=config.ode_rtol,
                    atol=config.ode_atol, events=hit_outflow, dense_output=True)
    grid = np.linspace(0.0, t_max, samples)
    if sol.status == 1 and sol.t_events[0].size:
        t_exit = float(sol.t_events[0][0])
        kept = grid[grid < t_exit]
        points = [(float(tau), float(sol.sol(tau)[0])) for tau in kept]
        points.append((t_exit, x_out))
        return points
    return [(float(tau), float(sol.sol(tau)[0])) for tau in grid]


def gamma_exit_time(speed: SpeedField1D, t_max: float) -> Optional[float]:
    """Time at which the corner characteristic reaches the outflow point, if before t_max."""
    last_t, last_x = gamma_curve(speed, t_max, samples=2)[-1]
    if last_x == speed.outflow_point and last_t <= t_max:
        return last_t
    return None


def gamma_position(speed: SpeedField1D, t: float) -> Optional[float]:
    """Position of the corner characteristic at time t, None once it has left."""
    result = trace_forward(speed, 0.0, speed.inflow_point, t)
    return None if result.exited else result.x


def exit_time_field(speed: SpeedField1D, times, xs) -> tuple[np.ndarray, np.ndarray]:
    """Tabulate backward exit times and regions on a (t, x) grid.

    Returns:
        ``(t_b, regions)`` with shape ``(len(times), len(xs))``; regions hold
        the Region values as strings.
    """
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    t_b = np.zeros((times.size, xs.size))
    regions = np.empty((times.size, xs.size), dtype=object)
    for i, t in enumerate(times):
        for j, x in enumerate(xs):
            record = backward_exit(speed, float(t), float(x))
            t_b[i, j] = record.t_b
            regions[i, j] = record.region.value
    logger.debug("tabulated exit times on %dx%d grid", times.size, xs.size)
    return t_b, regions
