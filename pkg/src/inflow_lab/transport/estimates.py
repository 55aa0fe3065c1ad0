"""Machine-checkable forms of the weighted sup estimates for 1D transport."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .fields import WeightParams
from .mild import GridSpec, TransportProblem1D, _grid, solve_mild, time_derivative_problem

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-6


@dataclass
class EstimateReport:
    """Both sides of a weighted estimate and the verdict."""
    lhs: float
    rhs: float
    passed: bool
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lhs_series: np.ndarray = field(default_factory=lambda: np.zeros(0))
    components: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def _audit_points(n: int) -> int:
    return max(4 * n, 2049)


def _refined_sup(func, grid: np.ndarray) -> float:
    """sup of |func| on [grid[0], grid[-1]], sampled then polished around the best node."""
    values = np.abs(func(grid))
    k = int(np.argmax(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    if hi <= lo:
        return float(values[k])
    result = minimize_scalar(lambda s: -float(np.abs(func(np.asarray(s)))), bounds=(lo, hi),
                             method="bounded", options={"xatol": 1e-13})
    return max(float(values[k]), -float(result.fun))


def weighted_data_norms(
    problem: TransportProblem1D,
    params: WeightParams,
    horizon: float,
    resolution: int = 2049,
) -> dict[str, float]:
    """Weighted sup norms of f0, b and h on fine audit samples."""
    xs = np.linspace(-1.0, 1.0, resolution)
    ts = np.linspace(0.0, horizon, max(resolution // 4, 65))
    w = params.weight(xs)
    w_in = float(params.weight(problem.speed.inflow_point))
    return {
        "wf0": _refined_sup(lambda x: params.weight(x) * problem.f0(x), xs),
        "wb": w_in * _refined_sup(problem.b, ts),
        "wh": float(np.max(w[None, :] * np.abs(problem.h(ts[:, None], xs[None, :])))),
    }


def estimate_rhs(norms: dict[str, float], params: WeightParams) -> float:
    """max(|w f0|, |w b|) + |w h| / (alpha lambda_m)."""
    return max(norms["wf0"], norms["wb"]) + norms["wh"] / params.decay_rate


def check_weighted_sup_estimate(
    problem: TransportProblem1D,
    params: WeightParams,
    horizon: float,
    grid: GridSpec = 256,
    samples: int = 50,
) -> EstimateReport:
    """Compare sup_t sup_x w|f| with the explicit data bound.

    Args:
        problem: The transport problem.
        params: Weight parameters.
        horizon: Final sampled time.
        grid: Spatial grid.
        samples: Number of sampled times in [0, horizon].

    Returns:
        EstimateReport with ``passed = lhs <= rhs (1 + 1e-6)``.
    """
    xs = _grid(grid)
    times = np.linspace(0.0, horizon, samples)
    series = np.array([solve_mild(problem, float(t), xs).weighted_sup_norm(params) for t in times])
    norms = weighted_data_norms(problem, params, horizon, _audit_points(xs.size))
    lhs = float(np.max(series))
    rhs = estimate_rhs(norms, params)
    passed = lhs <= rhs * (1.0 + RELATIVE_SLACK) + 1e-15
    logger.info("weighted sup estimate: lhs=%.6g rhs=%.6g %s", lhs, rhs, "pass" if passed else "FAIL")
    return EstimateReport(lhs=lhs, rhs=rhs, passed=passed, times=times, lhs_series=series,
                          components=norms)


def check_time_derivative_estimate(
    problem: TransportProblem1D,
    params: WeightParams,
    horizon: float,
    grid: GridSpec = 256,
    samples: int = 20,
) -> EstimateReport:
    """The weighted sup estimate applied to the d_t f problem (autonomous speeds)."""
    return check_weighted_sup_estimate(time_derivative_problem(problem), params, horizon, grid, samples)


@dataclass
class DecaySeries:
    """sup_x w|f(t)| against exp(-alpha lambda_m t) |w f0|."""
    times: np.ndarray
    lhs: np.ndarray
    bound: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.lhs <= self.bound * (1.0 + RELATIVE_SLACK) + 1e-15))

    @property
    def worst_ratio(self) -> float:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(self.bound > 0, self.lhs / self.bound, 0.0)
        return float(np.max(ratio)) if ratio.size else 0.0


def decay_series(
    problem: TransportProblem1D,
    params: WeightParams,
    times,
    grid: GridSpec = 256,
) -> DecaySeries:
    """Exponential decay of the weighted norm for zero inflow and forcing."""
    xs = _grid(grid)
    times = np.asarray(times, dtype=float)
    wf0 = weighted_data_norms(problem, params, float(np.max(times)) or 1.0, _audit_points(xs.size))["wf0"]
    lhs = np.array([solve_mild(problem, float(t), xs).weighted_sup_norm(params) for t in times])
    bound = np.exp(-params.decay_rate * times) * wf0
    return DecaySeries(times=times, lhs=lhs, bound=bound)


@dataclass
class FlushReport:
    """Sup norm of f after the flush time."""
    flush_time: float
    times: np.ndarray
    sup_after: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(np.all(self.sup_after <= 1e-12))


def flush_check(
    problem: TransportProblem1D,
    grid: GridSpec = 256,
    horizon: Optional[float] = None,
    samples: int = 5,
) -> FlushReport:
    """Check that f vanishes once every characteristic has entered through the inflow.

    With zero inflow and forcing the interval is swept in time 2 / lambda_m.
    """
    xs = _grid(grid)
    flush_time = 2.0 / problem.speed.lambda_m
    horizon = 2.0 * flush_time if horizon is None else horizon
    times = np.linspace(flush_time * (1.0 + 1e-6), max(horizon, flush_time * 1.01), samples)
    sup_after = np.array([solve_mild(problem, float(t), xs).sup_norm() for t in times])
    return FlushReport(flush_time=flush_time, times=times, sup_after=sup_after)
