"""Mild solutions of the scalar inflow transport problem

    d_t f + lambda(t, x) d_x f = h   on (0, inf) x (-1, 1),
    f(0, x) = f0(x),  f = b(t) at the inflow point.

A node in Q_plus takes ``f0(X(0)) + int_0^t h``, a node in Q_minus takes
``b(t_b) + int_{t_b}^t h``; on the corner characteristic both branches are
evaluated and any disagreement is recorded as a discontinuity.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..config import Region, get_config
from ..errors import ConfigurationError, PreconditionError, UnsupportedConfigurationError
from .characteristics import follow_characteristic, gamma_exit_time, gamma_position
from .fields import Datum, Discontinuity, ScalarField1D, uniform_grid
from .speed import SpeedField1D

logger = logging.getLogger(__name__)

GridSpec = Union[int, np.ndarray]

COMPATIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class TransportProblem1D:
    """Speed, initial datum f0(x), inflow datum b(t) and forcing h(t, x)."""
    speed: SpeedField1D
    f0: Datum = field(default_factory=Datum.zero)
    b: Datum = field(default_factory=Datum.zero)
    h: Datum = field(default_factory=Datum.zero)

    @property
    def compatibility_residual(self) -> float:
        """|f0(inflow point) - b(0)|."""
        return abs(float(self.f0(self.speed.inflow_point)) - float(self.b(0.0)))

    @property
    def is_compatible(self) -> bool:
        return self.compatibility_residual <= COMPATIBILITY_TOL

    def validate(self, t_max: float = 1.0, samples: int = 64) -> None:
        """Audit the declared bounds of the data on a sample of the domain.

        Raises:
            ConfigurationError: If a datum is non-finite or exceeds its declared sup.
        """
        self.speed.validate(t_max, samples)
        xs = np.linspace(-1.0, 1.0, samples)
        ts = np.linspace(0.0, t_max, samples)
        audits = {
            "f0": (self.f0, self.f0(xs)),
            "b": (self.b, self.b(ts)),
            "h": (self.h, self.h(ts[:, None], xs[None, :])),
        }
        for name, (datum, values) in audits.items():
            if not np.all(np.isfinite(values)):
                raise ConfigurationError(f"datum {name} is not finite on the audit sample")
            sup = float(np.max(np.abs(values)))
            if sup > datum.sup * (1.0 + 1e-12) + 1e-15:
                raise ConfigurationError(
                    f"datum {name} exceeds its declared bound",
                    details={"sampled_sup": sup, "declared_sup": datum.sup},
                )


@dataclass(frozen=True)
class PointValue:
    """Mild-solution value at one space-time point."""
    value: float
    region: Region
    t_b: float
    jump: float = 0.0


def evaluate_point(problem: TransportProblem1D, t: float, x: float) -> PointValue:
    """Evaluate the mild formula at (t, x)."""
    path = follow_characteristic(problem.speed, t, x, forcing=problem.h)
    record = path.record
    if record.region is Region.Q_PLUS:
        value = float(problem.f0(path.x_at_zero)) + path.integral_full
        return PointValue(value, record.region, 0.0)
    if record.region is Region.Q_MINUS:
        value = float(problem.b(record.t_b)) + path.integral_from_exit
        return PointValue(value, record.region, record.t_b)
    from_initial = float(problem.f0(record.x_b)) + path.integral_full
    from_boundary = float(problem.b(0.0)) + path.integral_from_exit
    return PointValue(from_initial, Region.GAMMA, 0.0, abs(from_initial - from_boundary))


def _grid(grid: GridSpec) -> np.ndarray:
    if isinstance(grid, (int, np.integer)):
        return uniform_grid(int(grid))
    return np.asarray(grid, dtype=float)


def solve_mild(problem: TransportProblem1D, t: float, grid: GridSpec = 256) -> ScalarField1D:
    """Mild solution at time t on a grid.

    Args:
        problem: The transport problem.
        t: Time, t >= 0.
        grid: Node count of a uniform grid or explicit node positions.

    Returns:
        ScalarField1D with region labels and Gamma discontinuities.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    xs = _grid(grid)
    jump_tol = get_config().jump_tol
    values = np.empty_like(xs)
    regions = np.empty(xs.shape, dtype=object)
    jumps: list[Discontinuity] = []
    for j, x in enumerate(xs):
        point = evaluate_point(problem, t, float(x))
        values[j] = point.value
        regions[j] = point.region.value
        if point.jump > jump_tol:
            jumps.append(Discontinuity(t=float(t), x=float(x), jump=point.jump))
    if jumps:
        logger.warning("mild solution at t=%.6g jumps by %.3e across Gamma (incompatible data)",
                       t, max(d.jump for d in jumps))
    return ScalarField1D(x=xs, values=values, t=float(t), regions=regions, discontinuities=jumps)


@dataclass
class OutflowTrace:
    """Time series of f at the outflow point."""
    times: np.ndarray
    values: np.ndarray
    regions: np.ndarray
    gamma_time: Optional[float]


def trace_at_outflow(problem: TransportProblem1D, t_max: float, samples: int = 201) -> OutflowTrace:
    """Sample f on the outflow boundary for t in [0, t_max].

    The trace is defined except where the corner characteristic reaches the
    outflow point; that time is returned in ``gamma_time``.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    x_out = problem.speed.outflow_point
    times = np.linspace(0.0, t_max, samples)
    values = np.empty_like(times)
    regions = np.empty(times.shape, dtype=object)
    for k, t in enumerate(times):
        point = evaluate_point(problem, float(t), x_out)
        values[k] = point.value
        regions[k] = point.region.value
    gamma_time = gamma_exit_time(problem.speed, t_max)
    if gamma_time is not None:
        logger.info("corner characteristic reaches the outflow at t=%.6g", gamma_time)
    return OutflowTrace(times=times, values=values, regions=regions, gamma_time=gamma_time)


def snapshot(problem: TransportProblem1D, t1: float) -> Datum:
    """The exact solution at time t1 as an initial datum, evaluated pointwise."""
    def func(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([evaluate_point(problem, t1, float(xi)).value for xi in x.ravel()])
        return out.reshape(x.shape)

    return Datum(func=func, name=f"snapshot@{t1:g}")


def restart(problem: TransportProblem1D, snapshot_datum: Datum, t1: float) -> TransportProblem1D:
    """Problem restarted at t1 from a snapshot, with data shifted in time."""
    return TransportProblem1D(
        speed=problem.speed.shifted(t1),
        f0=snapshot_datum,
        b=problem.b.shifted(t1),
        h=problem.h.shifted(t1),
    )


@dataclass
class TimeDerivativeResult:
    """d_t f from its own transport problem and d_x f recovered algebraically."""
    dt_f: ScalarField1D
    dx_f: ScalarField1D


def time_derivative_problem(problem: TransportProblem1D) -> TransportProblem1D:
    """Transport problem satisfied by d_t f for autonomous speeds.

    Initial datum ``-lambda(0, x) f0'(x) + h(0, x)``, inflow datum ``b'(t)``,
    forcing ``d_t h``.

    Raises:
        UnsupportedConfigurationError: If the speed depends on time.
        PreconditionError: If the data are not compatible at the corner.
    """
    if not problem.speed.autonomous:
        raise UnsupportedConfigurationError(
            "direct d_t f solves need a time-independent speed; time-dependent speeds "
            "are handled by the system iteration"
        )
    if not problem.is_compatible:
        raise PreconditionError(
            "d_t f requires f0(inflow point) = b(0)",
            details={"residual": problem.compatibility_residual},
        )
    speed, f0, b, h = problem.speed, problem.f0, problem.b, problem.h
    return TransportProblem1D(
        speed=speed,
        f0=Datum(func=lambda x: -speed.eval(0.0, x) * f0.derivative(x) + h(0.0, x), name="dt_f0"),
        b=Datum(func=lambda t: b.derivative(t), name="dt_b"),
        h=Datum(func=lambda t, x: h.derivative(t, x), name="dt_h"),
    )


def solve_time_derivative(problem: TransportProblem1D, t: float, grid: GridSpec = 256) -> TimeDerivativeResult:
    """d_t f by the mild formula and ``d_x f = (h - d_t f) / lambda``."""
    dt_field = solve_mild(time_derivative_problem(problem), t, grid)
    xs = dt_field.x
    lam = problem.speed.eval(t, xs)
    dx_values = (problem.h(t, xs) - dt_field.values) / lam
    return TimeDerivativeResult(
        dt_f=dt_field,
        dx_f=ScalarField1D(x=xs, values=dx_values, t=float(t), regions=dt_field.regions),
    )


@dataclass
class ResidualReport:
    """Finite-difference residual of d_t f + lambda d_x f - h away from Gamma."""
    t: float
    max_residual: float
    nodes_checked: int


def mild_residual(
    problem: TransportProblem1D,
    t: float,
    grid: GridSpec = 256,
    dt: Optional[float] = None,
) -> ResidualReport:
    """Measure the PDE residual of the mild solution by centred differences.

    Interior nodes whose space or time stencil comes within two cells of the
    corner characteristic are skipped.
    """
    xs = _grid(grid)
    dx = float(xs[1] - xs[0])
    dt = dx if dt is None else dt
    if t - dt < 0:
        raise ValueError("t must exceed the time step of the stencil")
    f_minus = solve_mild(problem, t - dt, xs).values
    f_plus = solve_mild(problem, t + dt, xs).values
    f_now = solve_mild(problem, t, xs).values

    lam = problem.speed.eval(t, xs)
    band = 2.0 * dx + float(np.max(np.abs(lam))) * dt
    mask = np.zeros(xs.shape, dtype=bool)
    mask[1:-1] = True
    for tau in (t - dt, t, t + dt):
        xg = gamma_position(problem.speed, tau)
        if xg is not None:
            mask &= np.abs(xs - xg) > band

    dtf = (f_plus - f_minus) / (2.0 * dt)
    dxf = np.zeros_like(xs)
    dxf[1:-1] = (f_now[2:] - f_now[:-2]) / (2.0 * dx)
    residual = np.abs(dtf + lam * dxf - problem.h(t, xs))
    max_res = float(np.max(residual[mask])) if np.any(mask) else 0.0
    logger.debug("mild residual at t=%.4g: %.3e over %d nodes", t, max_res, int(mask.sum()))
    return ResidualReport(t=float(t), max_residual=max_res, nodes_checked=int(mask.sum()))
