"""Mollified outer iteration and frozen-coefficient inner iteration for
quasilinear systems ``V_t + A(Ubar + V) V_x = 0`` with inflow data.

Level l freezes the coefficients at the mollified iterate ``V*_l``,
diagonalizes ``A(Ubar + V*_l) = T* Lambda* T*^-1`` on the whole space-time
slab, and solves for the characteristic unknowns ``f = T*^-1 V`` family by
family::

    (d_t + lambda*_i d_x) f_i = [(d_t + lambda*_i d_x) T*^-1] T* f    (lagged)

The next iterate is ``V_{l+1} = T* f``. Time derivatives come from the good
unknown ``g = d_t f + T*^-1 (d_t T*) f`` and space derivatives from the
equation itself.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..config import get_config
from ..errors import DivergenceError, PreconditionError, StabilityBudgetError
from ..systems import EigenDecomposition, eigendecompose_field, from_characteristic, to_characteristic
from ..transport.march import march_mild
from .mollifier import mollify
from .problem import SystemProblem

logger = logging.getLogger(__name__)


@dataclass
class SolverSettings:
    """Discretization and stopping parameters of the system iteration.

    Defaults are read from the active LabConfig.
    """
    grid: int = 256
    horizon: float = field(default_factory=lambda: get_config().horizon)
    l_max: int = 12
    j_max: int = 50
    delta: float = field(default_factory=lambda: get_config().delta)
    cfl: float = field(default_factory=lambda: get_config().cfl)
    inner_tol: float = field(default_factory=lambda: get_config().inner_tol)
    outer_tol: float = field(default_factory=lambda: get_config().outer_tol)
    patience: int = field(default_factory=lambda: get_config().divergence_patience)
    stability_constant: float = field(default_factory=lambda: get_config().stability_constant)
    enforce_budget: bool = True

    def __post_init__(self):
        if self.grid < 8:
            raise PreconditionError(f"grid must have at least 8 nodes, got {self.grid}")
        if self.horizon <= 0 or self.l_max < 1 or self.j_max < 1:
            raise PreconditionError("horizon, l_max and j_max must be positive")


def build_grid(problem: SystemProblem, settings: SolverSettings) -> tuple[np.ndarray, np.ndarray]:
    """Uniform nodes on [-1, 1] and uniform times covering the horizon.

    The time step is ``cfl * dx / max_i |lambda_i(Ubar)|``; the horizon is
    extended to a whole number of steps.
    """
    x = np.linspace(-1.0, 1.0, settings.grid)
    dx = float(x[1] - x[0])
    dt = settings.cfl * dx / float(np.max(np.abs(problem.base_speeds())))
    steps = max(2, math.ceil(settings.horizon / dt - 1e-9))
    return dt * np.arange(steps + 1), x


@dataclass
class IterationState:
    """Frozen coefficients of one outer level."""
    level: int
    times: np.ndarray
    x: np.ndarray
    V: np.ndarray
    V_star: np.ndarray
    frame: EigenDecomposition
    diagnostics: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])


@dataclass
class GoodUnknownState:
    g: np.ndarray
    dt_V: np.ndarray
    dx_V: np.ndarray

    @property
    def equivalence_ratio(self) -> float:
        """||g|| / ||d_t V||, 1 for a zero solution."""
        top = float(np.max(np.abs(self.g)))
        bottom = float(np.max(np.abs(self.dt_V)))
        return top / bottom if bottom > 0 else 1.0


@dataclass
class InnerResult:
    f: np.ndarray
    iterations: int
    differences: list[float]
    ratios: list[float]


@dataclass
class LevelDiagnostics:
    """Per-level record of the outer iteration."""
    level: int
    inner_iterations: int
    inner_ratios: list[float]
    distance: float
    outer_ratio: Optional[float]
    induction_norm: float
    mollifier_gap: float
    c2_norm: float
    frame_condition: float
    g_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def freeze_coefficients(
    problem: SystemProblem,
    V: np.ndarray,
    level: int,
    times: np.ndarray,
    x: np.ndarray,
) -> IterationState:
    """Mollify V and diagonalize the Jacobian on the whole slab."""
    dt, dx = float(times[1] - times[0]), float(x[1] - x[0])
    V_star = mollify(V, level, dt, dx)
    frame = eigendecompose_field(problem.system, problem.system.state(V_star))
    c2 = float(np.max(np.abs(np.diff(V_star, 2, axis=1)))) / dx**2 if x.size > 2 else 0.0
    diagnostics = {
        "mollifier_gap": float(np.max(np.abs(V_star - V))),
        "c2_norm": c2,
        "frame_condition": float(np.max(np.linalg.cond(frame.T))),
    }
    logger.debug("level %d: |V*-V|=%.3e, |V*|_C2~%.3e", level, diagnostics["mollifier_gap"], c2)
    return IterationState(level=level, times=times, x=x, V=V, V_star=V_star, frame=frame,
                          diagnostics=diagnostics)


def coupling_matrix(state: IterationState) -> np.ndarray:
    """M = [(d_t + Lambda* d_x) T*^-1] T*, shape (K, N, n, n)."""
    T_inv = state.frame.T_inv
    dt_T_inv = np.gradient(T_inv, state.times, axis=0, edge_order=2)
    dx_T_inv = np.gradient(T_inv, state.x, axis=1, edge_order=2)
    transported = dt_T_inv + state.frame.lambdas[..., :, None] * dx_T_inv
    return transported @ state.frame.T


def inner_solve(
    state: IterationState,
    problem: SystemProblem,
    j_max: int = 50,
    tol: Optional[float] = None,
    guess: Optional[np.ndarray] = None,
    patience: Optional[int] = None,
) -> InnerResult:
    """Iterate the per-family mild solutions with lagged coupling.

    Args:
        state: Frozen coefficients of the level.
        problem: Data of the system problem.
        j_max: Iteration cap.
        tol: Relative tolerance on successive sup differences.
        guess: Starting characteristic unknowns, zero if omitted.
        patience: Consecutive non-contracting steps tolerated.

    Returns:
        InnerResult with the unknowns f of shape (K, N, n).

    Raises:
        DivergenceError: If successive differences stop contracting.
    """
    config = get_config()
    tol = config.inner_tol if tol is None else tol
    patience = config.divergence_patience if patience is None else patience
    n = problem.n
    f0 = problem.initial_characteristic(state.x)
    b = problem.inflow_values(state.times)
    M = coupling_matrix(state)
    coupled = bool(np.any(M != 0.0))

    f = np.zeros(state.V.shape) if guess is None else np.array(guess, dtype=float)
    differences: list[float] = []
    ratios: list[float] = []
    streak = 0
    iterations = 0
    for j in range(1, j_max + 1):
        h = np.einsum("...ik,...k->...i", M, f) if coupled else None
        f_new = np.stack(
            [
                march_mild(state.times, state.x, state.frame.lambdas[..., i], f0[:, i], b[:, i],
                           None if h is None else h[..., i])
                for i in range(n)
            ],
            axis=-1,
        )
        diff = float(np.max(np.abs(f_new - f)))
        f = f_new
        iterations = j
        differences.append(diff)
        if not coupled:
            break
        if len(differences) > 1 and differences[-2] > 0:
            ratio = diff / differences[-2]
            ratios.append(ratio)
            streak = streak + 1 if ratio >= 1.0 else 0
            if streak >= patience:
                raise DivergenceError(
                    f"inner iteration stopped contracting at level {state.level}",
                    details={"level": state.level, "ratios": ratios[-patience:]},
                )
        if diff <= tol * float(np.max(np.abs(f))):
            break
    else:
        logger.warning("inner iteration hit j_max=%d at level %d (last difference %.3e)",
                       j_max, state.level, differences[-1])
    return InnerResult(f=f, iterations=iterations, differences=differences, ratios=ratios)


def good_unknown(state: IterationState, f: np.ndarray) -> GoodUnknownState:
    """g = d_t f + T*^-1 (d_t T*) f, d_t V = T* g and d_x V = -T* Lambda*^-1 g."""
    T, T_inv, lambdas = state.frame.T, state.frame.T_inv, state.frame.lambdas
    dt_f = np.gradient(f, state.times, axis=0, edge_order=2)
    dt_T = np.gradient(T, state.times, axis=0, edge_order=2)
    g = dt_f + np.einsum("...ij,...jk,...k->...i", T_inv, dt_T, f)
    dt_V = np.einsum("...ij,...j->...i", T, g)
    dx_V = -np.einsum("...ij,...j->...i", T, g / lambdas)
    return GoodUnknownState(g=g, dt_V=dt_V, dx_V=dx_V)


def induction_series(V: np.ndarray, good: GoodUnknownState) -> np.ndarray:
    """sup_x |V| + sup_x |d_x V| + sup_x |d_t V| at every time."""
    def sup(a):
        return np.max(np.abs(a), axis=(1, 2))

    return sup(V) + sup(good.dx_V) + sup(good.dt_V)


@dataclass
class QuasilinearResult:
    """Final iterate, its derivatives and the per-level record."""
    problem_name: str
    system_name: str
    times: np.ndarray
    x: np.ndarray
    V: np.ndarray
    dt_V: np.ndarray
    dx_V: np.ndarray
    levels: list[LevelDiagnostics]
    converged_level: Optional[int]
    data_norm: float
    solution_norm: float
    stability_threshold: float

    @property
    def converged(self) -> bool:
        return self.converged_level is not None

    @property
    def empirical_constant(self) -> float:
        """solution norm / data norm, 0 for zero data."""
        if self.data_norm <= 0:
            return 0.0
        return self.solution_norm / self.data_norm

    @property
    def stable(self) -> bool:
        return self.empirical_constant <= self.stability_threshold

    def max_gradient(self) -> np.ndarray:
        return np.max(np.abs(self.dx_V), axis=(1, 2))

    def series(self) -> dict[str, np.ndarray]:
        def sup(a):
            return np.max(np.abs(a), axis=(1, 2))

        sup_V, sup_dx, sup_dt = sup(self.V), sup(self.dx_V), sup(self.dt_V)
        return {
            "t": self.times,
            "sup_V": sup_V,
            "sup_dxV": sup_dx,
            "sup_dtV": sup_dt,
            "norm_sum": sup_V + sup_dx + sup_dt,
        }


def _solution_norm(V: np.ndarray, good: GoodUnknownState) -> float:
    """sup_t of the induction sum plus the W^{1,inf} norm of the boundary traces."""
    interior = float(np.max(induction_series(V, good)))
    traces = 0.0
    for edge in (0, -1):
        traces += float(np.max(np.abs(V[:, edge]))) + float(np.max(np.abs(good.dt_V[:, edge])))
    return interior + traces


def outer_solve(problem: SystemProblem, settings: Optional[SolverSettings] = None) -> QuasilinearResult:
    """Run the mollified outer iteration to convergence.

    Args:
        problem: System, data and smallness budget.
        settings: Discretization and stopping parameters.

    Returns:
        QuasilinearResult for the last computed level.

    Raises:
        ConfigurationError: Incompatible data or data above the budget.
        StabilityBudgetError: An iterate leaves the induction bound.
        DivergenceError: Inner or outer differences stop contracting.
    """
    settings = settings or SolverSettings()
    problem.validate(settings.horizon)
    times, x = build_grid(problem, settings)
    data_norm = problem.data_norm(float(times[-1]))
    threshold = settings.outer_tol * max(data_norm, 1e-12)
    logger.info("outer solve %s: %d x %d slab, dt=%.4g, data norm %.4g",
                problem.name, times.size, x.size, times[1] - times[0], data_norm)

    V = np.zeros((times.size, x.size, problem.n))
    levels: list[LevelDiagnostics] = []
    converged_level = None
    streak = 0
    good = None
    for level in range(1, settings.l_max + 1):
        state = freeze_coefficients(problem, V, level, times, x)
        inner = inner_solve(state, problem, j_max=settings.j_max, tol=settings.inner_tol,
                            guess=to_characteristic(state.frame, V), patience=settings.patience)
        V_next = from_characteristic(state.frame, inner.f)
        distance = float(np.max(np.abs(inner.f - to_characteristic(state.frame, V))))
        good = good_unknown(state, inner.f)
        induction = float(np.max(induction_series(V_next, good)))
        if settings.enforce_budget and induction > settings.delta:
            raise StabilityBudgetError(
                f"iterate of level {level} leaves the induction bound",
                details={"level": level, "induction_norm": induction, "delta": settings.delta},
            )
        previous = levels[-1].distance if levels else None
        ratio = distance / previous if previous else None
        levels.append(LevelDiagnostics(
            level=level,
            inner_iterations=inner.iterations,
            inner_ratios=inner.ratios,
            distance=distance,
            outer_ratio=ratio,
            induction_norm=induction,
            mollifier_gap=state.diagnostics["mollifier_gap"],
            c2_norm=state.diagnostics["c2_norm"],
            frame_condition=state.diagnostics["frame_condition"],
            g_ratio=good.equivalence_ratio,
        ))
        logger.info("level %d: |d|=%.3e ratio=%s inner=%d induction=%.4g",
                    level, distance, "-" if ratio is None else f"{ratio:.3f}", inner.iterations, induction)
        V = V_next
        if distance <= threshold:
            converged_level = level
            break
        streak = streak + 1 if ratio is not None and ratio >= 1.0 else 0
        if streak >= settings.patience:
            raise DivergenceError(
                "outer iteration stopped contracting",
                details={"level": level, "distances": [d.distance for d in levels[-settings.patience - 1:]]},
            )
    else:
        logger.warning("outer iteration did not meet tolerance %.3e within l_max=%d", threshold, settings.l_max)

    solution_norm = _solution_norm(V, good)
    result = QuasilinearResult(
        problem_name=problem.name,
        system_name=problem.system.name,
        times=times,
        x=x,
        V=V,
        dt_V=good.dt_V,
        dx_V=good.dx_V,
        levels=levels,
        converged_level=converged_level,
        data_norm=data_norm,
        solution_norm=solution_norm,
        stability_threshold=settings.stability_constant,
    )
    logger.info("stability constant %.4g (threshold %.4g)", result.empirical_constant, settings.stability_constant)
    return result
