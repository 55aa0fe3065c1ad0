"""Contrast between inflow Burgers and the periodic problem, where small smooth
data steepen into a shock."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ..errors import PreconditionError
from .problem import sine_problem
from .quasilinear import QuasilinearResult, SolverSettings, outer_solve

logger = logging.getLogger(__name__)

GROWTH_LIMIT = 3.0


def periodic_shock_time(amplitude: float, mode: int = 1, base: float = 1.0, resolution: int = 4096) -> float:
    """First crossing time of Burgers characteristics for u0 = base + a sin(m pi x) on the 2-periodic line.

    Characteristics X_j(t) = x_j + u0(x_j) t are straight; the shock time is
    the first zero of the smallest normalized gap between neighbours, found
    by bracketing and Brent's method.

    Returns:
        The crossing time, ``inf`` for a = 0.
    """
    if amplitude == 0:
        return math.inf
    x0 = np.linspace(-1.0, 1.0, resolution, endpoint=False)
    spacing = 2.0 / resolution
    u0 = base + amplitude * np.sin(mode * np.pi * x0)

    def gap(t: float) -> float:
        X = x0 + u0 * t
        return float(np.min(np.diff(np.append(X, X[0] + 2.0)))) / spacing

    upper = 1.0
    while gap(upper) > 0.0:
        upper *= 2.0
        if upper > 1e12:
            return math.inf
    return brentq(gap, 0.0, upper, xtol=1e-12)


@dataclass
class ShockContrastReport:
    amplitude: float
    mode: int
    periodic_shock_time: float
    horizon: float
    initial_gradient: float
    times: np.ndarray
    inflow_max_grad: np.ndarray
    result: Optional[QuasilinearResult] = None

    @property
    def growth(self) -> float:
        """max_t |d_x V| / |d_x V0|."""
        if self.initial_gradient == 0:
            return 0.0
        return float(np.max(self.inflow_max_grad)) / self.initial_gradient

    @property
    def passed(self) -> bool:
        if self.initial_gradient == 0:
            return bool(np.max(self.inflow_max_grad, initial=0.0) == 0.0)
        return self.growth <= GROWTH_LIMIT


def shock_contrast(
    amplitude: float = 0.05,
    mode: int = 1,
    grid: int = 256,
    horizon: Optional[float] = None,
    l_max: int = 12,
) -> ShockContrastReport:
    """Run inflow Burgers with V0 = a sin(m pi x) next to the periodic shock time.

    The inflow run covers three periodic shock times unless a horizon is given.
    Smallness budgets are lifted for this run; the data are compatible because
    V0 vanishes at both ends.

    Raises:
        PreconditionError: If a > 0.1.
    """
    if abs(amplitude) > 0.1:
        raise PreconditionError(f"shock contrast needs |a| <= 0.1, got {amplitude}")
    t_star = periodic_shock_time(amplitude, mode)
    if horizon is None:
        horizon = 3.0 * t_star if math.isfinite(t_star) else 1.0
    problem = sine_problem("burgers", amplitude, mode=mode, normalize=False, eps0_budget=math.inf)
    problem.name = "burgers-shock"
    settings = SolverSettings(grid=grid, horizon=horizon, l_max=l_max, delta=math.inf,
                              stability_constant=math.inf, enforce_budget=False)
    result = outer_solve(problem, settings)
    report = ShockContrastReport(
        amplitude=amplitude,
        mode=mode,
        periodic_shock_time=t_star,
        horizon=float(result.times[-1]),
        initial_gradient=abs(amplitude) * mode * math.pi,
        times=result.times,
        inflow_max_grad=result.max_gradient(),
        result=result,
    )
    logger.info("periodic shock at t*=%.5g; inflow gradient growth %.3f over [0, %.4g]",
                t_star, report.growth, report.horizon)
    return report
