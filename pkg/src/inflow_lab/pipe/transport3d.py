"""Characteristic transport in the pipe with inflow data on x1 = -1.

    d_t f + u . grad f = h,   f(0) = f0,   f = b on the inflow face.

Every node is traced backward along ``u^eps = u + eps (0, x2, x3)`` with the
midpoint rule over the whole velocity history. A path that reaches the inflow
face takes the boundary datum at the crossing time; one that reaches t = 0
takes the cubic interpolant of f0 at its footpoint. The forcing is integrated
along the path by the trapezoidal rule.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp

from ..config import Region, get_config
from ..errors import PreconditionError, SolverFailureError
from .grid import GridInterpolator, PipeField3D, PipeGrid, PipeSlab, face_lp_norm, lp_norm

logger = logging.getLogger(__name__)

VelocityFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]
VelocityInput = Union[PipeSlab, VelocityFunc, np.ndarray]
ForcingInput = Union[PipeSlab, Callable[[np.ndarray, np.ndarray], np.ndarray], None]
BoundaryFunc = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass
class SmallnessBudget3D:
    """Bounds c1 <= u1 <= c2 and the smallness condition on the transporting field.

    The condition reads
    ``|dbar u|^p (1 + c1^-p + c1^-p |(u2, u3)|^p) <= delta (c1 alpha)^p``
    with ``dbar = (d_t, d_2, d_3)`` and sup norms.
    """
    c1: float
    c2: float
    p: float = field(default_factory=lambda: get_config().lp_exponent)
    alpha: float = field(default_factory=lambda: get_config().alpha_pipe)
    delta: float = 0.1

    def __post_init__(self):
        if not 0 < self.c1 <= self.c2:
            raise PreconditionError(f"need 0 < c1 <= c2, got c1={self.c1}, c2={self.c2}")
        if self.p <= 3:
            raise PreconditionError(f"exponent p must exceed 3, got {self.p}")

    def evaluate(self, grid: PipeGrid, times: np.ndarray, u: np.ndarray) -> dict:
        """Both sides of the smallness condition for velocity samples of shape (K, 3, n, n, n)."""
        u = np.asarray(u, dtype=float)
        dbar = 0.0
        if u.shape[0] > 1:
            dbar = float(np.max(np.abs(np.gradient(u, times, axis=0))))
        for axis in (2, 3):
            dbar = max(dbar, float(np.max(np.abs(np.gradient(u, grid.h, axis=axis + 1, edge_order=2)))))
        lateral = float(np.max(np.sqrt(u[:, 1] ** 2 + u[:, 2] ** 2)))
        p, c1 = self.p, self.c1
        lhs = dbar**p * (1.0 + c1 ** (-p) + c1 ** (-p) * lateral**p)
        rhs = self.delta * (c1 * self.alpha) ** p
        report = {"lhs": lhs, "rhs": rhs, "passed": bool(lhs <= rhs), "dbar_u": dbar, "lateral_u": lateral}
        if not report["passed"]:
            logger.warning("transport smallness budget unmet: %.3e > %.3e", lhs, rhs)
        return report


class _Velocity:
    """u^eps at (k, tau, X) for tau inside step k."""

    def __init__(self, times: np.ndarray, velocity: VelocityInput, epsilon: float, grid: PipeGrid):
        self.epsilon = epsilon
        if isinstance(velocity, PipeSlab):
            if velocity.times.size != times.size or not np.allclose(velocity.times, times):
                raise PreconditionError("velocity slab times differ from the transport times")
            self._eval = velocity.sample
        elif callable(velocity):
            self._eval = lambda k, tau, X: np.asarray(velocity(tau, X), dtype=float) * np.ones_like(X)
        else:
            steady = GridInterpolator(grid, np.asarray(velocity, dtype=float))
            self._eval = lambda k, tau, X: steady(X)

    def __call__(self, k: int, tau, X: np.ndarray) -> np.ndarray:
        u = self._eval(k, tau, X)
        if self.epsilon:
            u = u.copy()
            u[1:] += self.epsilon * X[1:]
        return u


class _Forcing:
    def __init__(self, forcing: ForcingInput, m: int):
        self.m = m
        if isinstance(forcing, PipeSlab):
            self._eval = forcing.sample
        elif callable(forcing):
            self._eval = lambda k, tau, X: np.asarray(forcing(tau, X), dtype=float)
        else:
            raise PreconditionError("forcing must be a PipeSlab or a callable")

    def __call__(self, k: int, tau, X: np.ndarray) -> np.ndarray:
        out = np.asarray(self._eval(k, tau, X), dtype=float)
        if out.shape == X.shape[1:]:
            out = out[None]
        return np.broadcast_to(out, (self.m,) + X.shape[1:])


def _as_components(values: np.ndarray) -> tuple[np.ndarray, bool]:
    values = np.asarray(values, dtype=float)
    if values.ndim == 3:
        return values[None], True
    return values, False


REGION_CODES = (Region.Q_PLUS, Region.Q_MINUS, Region.GAMMA)
Q_PLUS, Q_MINUS, GAMMA = range(3)


def region_labels(codes: np.ndarray) -> np.ndarray:
    """Region values as strings for an array of region codes."""
    labels = np.array([r.value for r in REGION_CODES], dtype=object)
    return labels[np.asarray(codes, dtype=int)]


def transport3d_march(
    grid: PipeGrid,
    times: np.ndarray,
    velocity: VelocityInput,
    f0: np.ndarray,
    b: Optional[BoundaryFunc] = None,
    h: ForcingInput = None,
    epsilon: Optional[float] = None,
    c1: Optional[float] = None,
    return_regions: bool = False,
) -> Union[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    """Evaluate the mild formula at every node and sample time.

    Args:
        grid: Pipe grid.
        times: Increasing times starting at the time of f0.
        velocity: Slab with the same times, a callable u(t, X) or a steady array.
        f0: Initial samples, (n, n, n) or (m, n, n, n).
        b: Inflow datum b(t, x2, x3) -> (m, ...) or (...), broadcasting over array t.
        h: Forcing as a slab of shape (K, m, n, n, n) or a callable h(t, X).
        epsilon: Lateral regularization; defaults to the configured value.
        c1: Required lower bound of u1.
        return_regions: Also return the region code of every sample.

    Returns:
        Samples of shape (K, m, n, n, n), or (K, n, n, n) for scalar f0, and
        with ``return_regions`` the codes (K, n, n, n) indexing REGION_CODES.

    Raises:
        PreconditionError: u1 below c1 (or not positive) at a node.
        SolverFailureError: A backward path leaves through the outflow face.
    """
    times = np.asarray(times, dtype=float)
    config = get_config()
    epsilon = config.epsilon if epsilon is None else epsilon
    f0, scalar = _as_components(f0)
    m = f0.shape[0]
    vel = _Velocity(times, velocity, epsilon, grid)
    forcing = _Forcing(h, m) if h is not None else None
    X = grid.mesh()
    nodes = X.reshape(3, -1)
    count = nodes.shape[1]
    floor = 0.0 if c1 is None else c1 * (1.0 - 1e-12)
    tol = config.tol_gamma

    out = np.empty((times.size, m, count))
    regions = np.full((times.size, count), Q_PLUS, dtype=np.int8)
    out[0] = f0.reshape(m, -1)

    # Open paths: position, arrival sample, arrival node and the forcing integral so far.
    P = np.empty((3, 0))
    arrival = np.empty(0, dtype=int)
    node = np.empty(0, dtype=int)
    integral = np.empty((m, 0))

    for j in range(times.size - 2, -1, -1):
        t0, t1 = times[j], times[j + 1]
        dt = t1 - t0
        u1_min = float(np.min(vel(j, t1, nodes)[0]))
        if u1_min <= floor or u1_min <= 0.0:
            raise PreconditionError(f"streamwise velocity {u1_min:.4g} below the bound at t={t1:.4g}",
                                    details={"min_u1": u1_min, "c1": c1})

        P = np.concatenate([P, nodes], axis=1)
        arrival = np.concatenate([arrival, np.full(count, j + 1)])
        node = np.concatenate([node, np.arange(count)])
        integral = np.concatenate([integral, np.zeros((m, count))], axis=1)

        k1 = vel(j, t1, P)
        k2 = vel(j, t1 - 0.5 * dt, P - 0.5 * dt * k1)
        Pd = P - dt * k2
        if np.any(Pd[0] > 1.0 + 1e-12):
            raise SolverFailureError("backward path left through the outflow face")
        Pd[1:] = np.clip(Pd[1:], -1.0, 1.0)
        h_upper = forcing(j, t1, P) if forcing is not None else None

        crossing = Pd[0] < -1.0
        if np.any(crossing):
            Pn, Pdn = P[:, crossing], Pd[:, crossing]
            theta = (Pn[0] + 1.0) / (Pn[0] - Pdn[0])
            s = t1 - theta * dt
            Xc = Pn + theta * (Pdn - Pn)
            Xc[0] = -1.0
            entry = integral[:, crossing]
            if b is not None:
                entry = entry + np.broadcast_to(np.asarray(b(s, Xc[1], Xc[2]), dtype=float), (m,) + s.shape)
            if forcing is not None:
                entry = entry + 0.5 * theta * dt * (h_upper[:, crossing] + forcing(j, s, Xc))
            out[arrival[crossing], :, node[crossing]] = entry.T
            regions[arrival[crossing], node[crossing]] = np.where(s <= times[0] + tol, GAMMA, Q_MINUS)

        keep = ~crossing
        P, arrival, node = Pd[:, keep], arrival[keep], node[keep]
        integral = integral[:, keep]
        if forcing is not None:
            integral = integral + 0.5 * dt * (h_upper[:, keep] + forcing(j, t0, P))

    if arrival.size:
        at_zero = GridInterpolator(grid, f0)(P)
        at_zero = at_zero if at_zero.ndim == 2 else at_zero[None]
        out[arrival, :, node] = (at_zero + integral).T
        regions[arrival, node] = np.where(P[0] <= -1.0 + tol, GAMMA, Q_PLUS)

    out = out.reshape((times.size, m) + grid.shape)
    out = out[:, 0] if scalar else out
    logger.debug("backward tracing: %d samples on %d^3 nodes", times.size, grid.n)
    if return_regions:
        return out, regions.reshape((times.size,) + grid.shape)
    return out


@dataclass
class Transport3DRun:
    """Samples of a transport run together with the data it used."""
    grid: PipeGrid
    times: np.ndarray
    values: np.ndarray
    f0: np.ndarray
    b_samples: np.ndarray
    h_samples: np.ndarray
    budget: Optional[SmallnessBudget3D] = None
    budget_report: dict = field(default_factory=dict)
    regions: Optional[np.ndarray] = None

    @property
    def final(self) -> PipeField3D:
        return PipeField3D(self.grid, self.values[-1], float(self.times[-1]))


def _velocity_samples(grid: PipeGrid, times: np.ndarray, velocity: VelocityInput) -> np.ndarray:
    if isinstance(velocity, PipeSlab):
        return velocity.values
    if callable(velocity):
        X = grid.mesh()
        return np.stack([np.asarray(velocity(t, X), dtype=float) * np.ones_like(X) for t in times])
    return np.broadcast_to(np.asarray(velocity, dtype=float), (times.size, 3) + grid.shape)


def transport3d_solve(
    grid: PipeGrid,
    u: VelocityInput,
    f0: np.ndarray,
    t: float,
    b: Optional[BoundaryFunc] = None,
    h: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
    budget: Optional[SmallnessBudget3D] = None,
    dt: Optional[float] = None,
    epsilon: Optional[float] = None,
) -> Transport3DRun:
    """Solve the transport problem up to time t.

    The time step defaults to ``cfl h / c2``; a slab velocity fixes the times.
    The smallness budget is evaluated and reported, an unmet budget is logged.

    Returns:
        Transport3DRun with every sample and the sampled data.
    """
    f0 = np.asarray(f0, dtype=float)
    if isinstance(u, PipeSlab):
        times = u.times
    else:
        if dt is None:
            c2 = budget.c2 if budget is not None else float(np.max(_velocity_samples(grid, np.zeros(1), u)[:, 0]))
            if c2 <= 0:
                raise PreconditionError(f"streamwise velocity must be positive, max u1 = {c2:.4g}")
            dt = get_config().cfl * grid.h / c2
        steps = max(1, math.ceil(t / dt - 1e-9))
        times = np.linspace(0.0, t, steps + 1)
    u_samples = _velocity_samples(grid, times, u)
    report = budget.evaluate(grid, times, u_samples) if budget is not None else {}

    values, regions = transport3d_march(grid, times, u, f0, b=b, h=h, epsilon=epsilon,
                                        c1=budget.c1 if budget is not None else None, return_regions=True)
    x2, x3 = grid.face_mesh()
    components = 1 if f0.ndim == 3 else f0.shape[0]
    if b is None:
        b_samples = np.zeros((times.size, components, grid.n, grid.n))
    else:
        b_samples = np.stack([np.broadcast_to(np.asarray(b(float(s), x2, x3), dtype=float),
                                              (components, grid.n, grid.n)) for s in times])
    if h is None:
        h_samples = np.zeros((times.size, components) + grid.shape)
    else:
        X = grid.mesh()
        h_samples = np.stack([np.broadcast_to(np.asarray(h(float(s), X), dtype=float),
                                              (components,) + grid.shape) for s in times])
    return Transport3DRun(grid=grid, times=times, values=values, f0=f0, b_samples=b_samples,
                          h_samples=h_samples, budget=budget, budget_report=report, regions=regions)


@dataclass
class DecayReport3D:
    times: np.ndarray
    lhs_series: np.ndarray
    rhs: float
    headroom: float
    components: dict

    @property
    def lhs(self) -> float:
        return float(np.max(self.lhs_series)) if self.lhs_series.size else 0.0

    @property
    def passed(self) -> bool:
        return self.lhs <= self.headroom * self.rhs * (1.0 + 1e-12)


def weighted_lp_decay_check(
    run: Transport3DRun,
    p: Optional[float] = None,
    alpha: Optional[float] = None,
    headroom: Optional[float] = None,
) -> DecayReport3D:
    """Weighted L^p bound for a transport run with weight w = exp(-alpha x1).

    ``||w f(t)||^p <= C (||w f0||^p + (c2 / (alpha c1)) sup ||w b||^p + (c1 alpha)^-p sup ||w h||^p)``.
    """
    config = get_config()
    budget = run.budget
    p = (budget.p if budget else config.lp_exponent) if p is None else p
    alpha = (budget.alpha if budget else config.alpha_pipe) if alpha is None else alpha
    headroom = config.estimate_headroom if headroom is None else headroom
    if budget is None:
        raise PreconditionError("the decay check needs the bounds c1 and c2 of the run")
    grid = run.grid
    w = np.exp(-alpha * grid.nodes)[:, None, None]
    w_inflow = math.exp(alpha)

    def weighted(values):
        return lp_norm(w * values, grid, p) ** p

    lhs_series = np.array([weighted(f) for f in run.values])
    wf0 = weighted(run.f0)
    wb = max((face_lp_norm(w_inflow * b, grid, p) ** p for b in run.b_samples), default=0.0)
    wh = max((weighted(hk) for hk in run.h_samples), default=0.0)
    c1, c2 = budget.c1, budget.c2
    rhs = wf0 + (c2 / (alpha * c1)) * wb + (c1 * alpha) ** (-p) * wh
    components = {"wf0": wf0, "wb": wb, "wh": wh}
    logger.info("weighted L^%g check: max lhs %.4g vs %.4g x %.4g", p, float(np.max(lhs_series)), headroom, rhs)
    return DecayReport3D(times=run.times, lhs_series=lhs_series, rhs=rhs, headroom=headroom, components=components)


@dataclass
class LateralReport:
    times: np.ndarray
    drift_series: np.ndarray
    tol: float

    @property
    def max_drift(self) -> float:
        return float(np.max(self.drift_series)) if self.drift_series.size else 0.0

    @property
    def passed(self) -> bool:
        return self.max_drift <= self.tol


def lateral_face_points(samples: int = 6) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points on the four lateral faces, their face axis and face side."""
    along = np.linspace(-0.9, 0.5, samples)
    across = np.linspace(-0.9, 0.9, samples)
    a1, a2 = np.meshgrid(along, across, indexing="ij")
    a1, a2 = a1.ravel(), a2.ravel()
    points, axes, sides = [], [], []
    for axis in (1, 2):
        other = 3 - axis
        for side in (-1.0, 1.0):
            P = np.zeros((3, a1.size))
            P[0], P[axis], P[other] = a1, side, a2
            points.append(P)
            axes.append(np.full(a1.size, axis))
            sides.append(np.full(a1.size, side))
    return np.concatenate(points, axis=1), np.concatenate(axes), np.concatenate(sides)


def lateral_invariance_check(
    u: VelocityFunc,
    horizon: float = 2.0,
    samples: int = 6,
    tol: float = 1e-8,
    evaluations: int = 41,
) -> LateralReport:
    """Trace forward from lateral face points with the unregularized field.

    The drift is the distance of each path from its starting face, measured
    while the path is still inside the pipe (x1 <= 1).
    """
    config = get_config()
    points, axes, sides = lateral_face_points(samples)
    count = points.shape[1]

    def rhs(t, y):
        Y = y.reshape(3, count)
        return np.broadcast_to(np.asarray(u(t, Y), dtype=float), Y.shape).reshape(-1)

    t_eval = np.linspace(0.0, horizon, evaluations)
    solution = solve_ivp(rhs, (0.0, horizon), points.reshape(-1), method="DOP853",
                         t_eval=t_eval, rtol=config.ode_rtol, atol=config.ode_atol)
    if not solution.success:
        raise SolverFailureError(f"lateral tracing failed: {solution.message}")
    paths = solution.y.reshape(3, count, -1)
    index = np.arange(count)
    lateral = paths[axes, index, :]
    drift = np.abs(lateral - sides[:, None])
    inside = paths[0] <= 1.0
    drift = np.where(inside, drift, 0.0)
    series = np.max(drift, axis=0)
    report = LateralReport(times=solution.t, drift_series=series, tol=tol)
    logger.info("lateral invariance: max drift %.3e over %d points", report.max_drift, count)
    return report
