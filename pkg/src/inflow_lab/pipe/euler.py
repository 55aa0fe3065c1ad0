"""Coupled velocity/vorticity iteration for Euler flow around a pipe shear.

On each time window the iteration alternates

    v^(n)     = div-curl reconstruction of w^(n) with the normal inflow data,
    w^(n+1)   = vorticity transported by u_s + v^(n) with lagged stretching,

starting from the window's initial vorticity held constant in time. The next
window restarts from the last sample of the previous one.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config import BoundaryKind, get_config
from ..errors import DivergenceError, PreconditionError, StabilityBudgetError
from .boundary import PipeBoundaryData, boundary_norm
from .compat import CompatReport, check_compatibility
from .divcurl import divcurl_solve
from .grid import PipeGrid, advect, div, grad, lp_norm, w1p_norm, w2p_norm
from .poisson import solve_box_poisson
from .profile import ShearProfile
from .vorticity import div_omega_monitor, tangential_vanish_monitor, vorticity_iterate

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ("t", "v_w2p", "dtv_w1p", "div_omega", "omega_cross_nu", "momentum_residual")


@dataclass
class EulerSettings:
    """Discretization, windows and stopping rules of the pipe solve."""
    grid: int = 32
    horizon: float = 10.0
    window: float = 1.0
    n_max: int = 10
    tol: float = 1e-6
    inner_max: int = 20
    inner_tol: float = 1e-8
    dt: Optional[float] = None
    induction_budget: float = 5.0
    monitor_factor: float = 5.0
    p: float = field(default_factory=lambda: get_config().lp_exponent)
    epsilon: float = field(default_factory=lambda: get_config().epsilon)
    patience: int = field(default_factory=lambda: get_config().divergence_patience)
    stability_constant: float = field(default_factory=lambda: get_config().stability_constant)

    def __post_init__(self):
        if self.horizon <= 0 or self.window <= 0:
            raise PreconditionError("horizon and window must be positive")
        if self.n_max < 1:
            raise PreconditionError("n_max must be at least 1")


@dataclass
class WindowDiagnostics:
    start: float
    end: float
    iterations: int
    converged_n: Optional[int]
    distances: list[float]
    ratios: list[float]
    inner_iterations: list[int]


@dataclass
class EulerResult:
    """Norm series, final fields and diagnostics of a pipe solve."""
    grid: PipeGrid
    profile_name: str
    boundary_name: str
    series: dict[str, np.ndarray]
    windows: list[WindowDiagnostics]
    v_final: np.ndarray
    omega_final: np.ndarray
    data_norm: float
    compat: CompatReport
    smallness: dict
    monitor_tol: dict
    stability_threshold: float

    @property
    def converged(self) -> bool:
        return all(w.converged_n is not None for w in self.windows)

    @property
    def converged_n(self) -> Optional[int]:
        """Largest converging iterate over the windows, None if any window failed to converge.

        ``n`` is the velocity iterate whose vorticity update met the tolerance,
        counted from 1 like the levels of the 1D solver.
        """
        if not self.converged:
            return None
        return max(w.converged_n for w in self.windows)

    @property
    def empirical_constant(self) -> float:
        norm = float(np.max(self.series["v_w2p"] + self.series["dtv_w1p"]))
        if self.data_norm <= 0:
            return 0.0
        return norm / self.data_norm

    def verdicts(self) -> dict[str, bool]:
        return {
            "converged": self.converged,
            "div_omega": bool(np.max(self.series["div_omega"]) <= self.monitor_tol["div_omega"]),
            "omega_cross_nu": bool(np.max(self.series["omega_cross_nu"]) <= self.monitor_tol["omega_cross_nu"]),
            "stability": self.empirical_constant <= self.stability_threshold,
        }


def momentum_residual(
    grid: PipeGrid,
    profile: ShearProfile,
    times: np.ndarray,
    v: np.ndarray,
    dt_v: Optional[np.ndarray] = None,
    p: Optional[float] = None,
) -> np.ndarray:
    """||N + grad p||_p per sample, N = d_t v + (u_s + v) . grad v + v . grad u_s.

    The pressure solves the Neumann problem Laplacian p = -div N with
    d_nu p = -N . nu on the whole boundary, so the residual is the part of N
    that is not a gradient.
    """
    p = get_config().lp_exponent if p is None else p
    v = np.asarray(v, dtype=float)
    if dt_v is None:
        dt_v = np.gradient(v, times, axis=0, edge_order=2) if times.size > 2 else np.zeros_like(v)
    u_s = profile.velocity(grid)
    h = grid.h
    kinds = (BoundaryKind.NEUMANN,) * 3
    out = np.empty(times.size)
    for k in range(times.size):
        N = dt_v[k] + advect(u_s + v[k], v[k], h) + advect(v[k], u_s, h)
        data = {a: (-N[a].take(0, axis=a), -N[a].take(-1, axis=a)) for a in range(3)}
        pressure = solve_box_poisson(-div(N, h), h, kinds, data)
        out[k] = lp_norm(N + grad(pressure, h), grid, p)
    return out


def _velocity_slab(grid, omega, vbm, vbp, p) -> np.ndarray:
    return np.stack([
        divcurl_solve(grid, omega[k], vbm[k], vbp[k], p=p, check_residual=False).v
        for k in range(omega.shape[0])
    ])


def _window_times(start: float, end: float, dt: float) -> np.ndarray:
    steps = max(2, math.ceil((end - start) / dt - 1e-9))
    return np.linspace(start, end, steps + 1)


def euler_solve(
    profile: ShearProfile,
    bdata: PipeBoundaryData,
    settings: Optional[EulerSettings] = None,
) -> EulerResult:
    """Solve for the perturbation of the shear flow over the horizon.

    Args:
        profile: Shear profile.
        bdata: Boundary data and initial perturbation.
        settings: Grid, windows and tolerances.

    Returns:
        EulerResult with the norm series and monitors.

    Raises:
        PreconditionError: Compatibility conditions fail.
        StabilityBudgetError: An iterate leaves the induction budget.
        DivergenceError: Successive vorticity iterates stop contracting.
    """
    settings = settings or EulerSettings()
    config = get_config()
    grid = PipeGrid(settings.grid)
    profile.validate(grid)
    p = settings.p

    compat = check_compatibility(profile, bdata, grid, times=np.linspace(0.0, settings.horizon, 11))
    if not compat.passed:
        raise PreconditionError(
            "pipe data violate compatibility conditions",
            details={"failures": [c.name for c in compat.failures()]},
        )
    smallness = profile.smallness(grid, config.delta, p)
    if not smallness["passed"]:
        logger.warning("profile smallness budget unmet: %.3e > %.3e", smallness["lhs"], smallness["rhs"])

    v_start = bdata.initial_velocity(grid)
    omega_start = bdata.initial_vorticity(grid)
    sample_times = np.linspace(0.0, settings.horizon, 21)
    boundary_speed = max(float(np.max(np.abs(bdata.inflow(grid, float(t))))) for t in sample_times)
    c2 = profile.max_speed(grid) + max(float(np.max(np.abs(v_start))), boundary_speed)
    dt = settings.dt or config.cfl * grid.h / c2
    data_norm = w2p_norm(v_start, grid, p) + boundary_norm(bdata, grid, sample_times, p)
    logger.info("euler solve: profile %s, data %s, %d^3 grid, dt=%.4g, data norm %.4g",
                profile.name, bdata.name, grid.n, dt, data_norm)

    rows = {name: [] for name in SERIES_COLUMNS}
    windows: list[WindowDiagnostics] = []
    edges = list(np.arange(0.0, settings.horizon, settings.window)) + [settings.horizon]
    edges = [e for i, e in enumerate(edges) if i == 0 or e - edges[i - 1] > 1e-12]

    for index, (start, end) in enumerate(zip(edges[:-1], edges[1:])):
        times = _window_times(start, end, dt)
        vbm = np.stack([bdata.inflow(grid, float(t)) for t in times])
        vbp = np.stack([bdata.outflow(grid, float(t)) for t in times])
        omega = np.broadcast_to(omega_start, (times.size,) + omega_start.shape).copy()
        distances: list[float] = []
        ratios: list[float] = []
        inner_counts: list[int] = []
        converged_n = None
        streak = 0
        for n in range(1, settings.n_max + 1):
            v = _velocity_slab(grid, omega, vbm, vbp, p)
            # The first sample is the state carried in from the previous window.
            v[0] = v_start
            dt_v = np.gradient(v, times, axis=0, edge_order=2)
            induction = max(w2p_norm(v[k], grid, p) + w1p_norm(dt_v[k], grid, p) for k in range(times.size))
            if induction > settings.induction_budget:
                raise StabilityBudgetError(
                    f"velocity iterate {n} leaves the induction budget",
                    details={"window": [start, end], "induction_norm": induction,
                             "budget": settings.induction_budget},
                )
            result = vorticity_iterate(profile, grid, times, v, omega_start, bdata,
                                       l_max=settings.inner_max, tol=settings.inner_tol, guess=omega,
                                       p=p, epsilon=settings.epsilon, patience=settings.patience)
            inner_counts.append(result.iterations)
            distance = max(lp_norm(result.omega[k] - omega[k], grid, p) for k in range(times.size))
            size = max(lp_norm(result.omega[k], grid, p) for k in range(times.size))
            omega = result.omega
            if distances and distances[-1] > 0:
                ratio = distance / distances[-1]
                ratios.append(ratio)
                streak = streak + 1 if ratio >= 1.0 else 0
                if streak >= settings.patience:
                    raise DivergenceError("velocity/vorticity iteration stopped contracting",
                                          details={"window": [start, end], "ratios": ratios[-settings.patience:]})
            distances.append(distance)
            logger.debug("window %d, iterate %d: distance %.3e", index, n, distance)
            if distance <= settings.tol * size:
                converged_n = n
                break
        else:
            logger.warning("window [%.3g, %.3g] did not converge within n_max=%d", start, end, settings.n_max)

        # Velocity of the accepted vorticity, pinned to the incoming state as in the loop.
        v = _velocity_slab(grid, omega, vbm, vbp, p)
        v[0] = v_start
        dt_v = np.gradient(v, times, axis=0, edge_order=2)
        first = 0 if index == 0 else 1
        keep = slice(first, None)
        rows["t"].extend(times[keep])
        rows["v_w2p"].extend(w2p_norm(v[k], grid, p) for k in range(first, times.size))
        rows["dtv_w1p"].extend(w1p_norm(dt_v[k], grid, p) for k in range(first, times.size))
        rows["div_omega"].extend(div_omega_monitor(omega[keep], grid, p))
        rows["omega_cross_nu"].extend(tangential_vanish_monitor(omega[keep]))
        rows["momentum_residual"].extend(momentum_residual(grid, profile, times, v, dt_v, p)[keep])
        windows.append(WindowDiagnostics(start=float(start), end=float(end), iterations=len(distances),
                                         converged_n=converged_n, distances=distances, ratios=ratios,
                                         inner_iterations=inner_counts))
        logger.info("window [%.3g, %.3g]: converged at n=%s after %d iterates", start, end,
                    converged_n, len(distances))
        v_start, omega_start = v[-1], omega[-1]

    series = {name: np.asarray(values, dtype=float) for name, values in rows.items()}
    omega_scale = max(float(np.max(np.abs(omega_start))), 1e-300)
    monitor_tol = {
        "div_omega": settings.monitor_factor * grid.h**2 * max(omega_scale, data_norm),
        "omega_cross_nu": settings.monitor_factor * grid.h**2 * max(omega_scale, data_norm),
    }
    return EulerResult(
        grid=grid,
        profile_name=profile.name,
        boundary_name=bdata.name,
        series=series,
        windows=windows,
        v_final=v_start,
        omega_final=omega_start,
        data_norm=data_norm,
        compat=compat,
        smallness=smallness,
        monitor_tol=monitor_tol,
        stability_threshold=settings.stability_constant,
    )
