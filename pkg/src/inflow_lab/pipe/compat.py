"""Compatibility conditions of the pipe problem, evaluated one by one."""

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .boundary import PipeBoundaryData
from .grid import PipeGrid, curl, div, face_values
from .profile import ShearProfile

logger = logging.getLogger(__name__)

ANALYTIC_TOL = 1e-10
DISCRETE_FACTOR = 10.0


@dataclass
class ConditionResult:
    name: str
    residual: float
    tol: float
    passed: bool


@dataclass
class CompatReport:
    conditions: list[ConditionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.passed]

    def get(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "conditions": [asdict(c) for c in self.conditions]}


def _sup(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values))) if values.size else 0.0


def check_compatibility(
    profile: ShearProfile,
    bdata: PipeBoundaryData,
    grid: PipeGrid,
    v0: Optional[np.ndarray] = None,
    omega0: Optional[np.ndarray] = None,
    times: Optional[np.ndarray] = None,
) -> CompatReport:
    """Evaluate every compatibility condition with its residual.

    Conditions that hold exactly for analytic data use tolerance 1e-10;
    conditions measured through difference operators use ``10 h^2`` scaled by
    the size of the field.

    Args:
        profile: Shear profile.
        bdata: Boundary data with the initial perturbation.
        grid: Sampling grid.
        v0: Initial velocity samples; defaults to ``bdata.v0`` on the grid.
        omega0: Initial vorticity samples; defaults to ``bdata.omega0``.
        times: Times at which the boundary data are sampled.

    Returns:
        CompatReport; failures are reported, never raised.
    """
    v0 = bdata.initial_velocity(grid) if v0 is None else np.asarray(v0, dtype=float)
    omega0 = bdata.initial_vorticity(grid) if omega0 is None else np.asarray(omega0, dtype=float)
    times = np.linspace(0.0, 1.0, 5) if times is None else np.atleast_1d(times)
    h = grid.h
    report = CompatReport()

    def add(name, residual, tol, passed=None):
        residual = float(residual)
        ok = residual <= tol if passed is None else passed
        report.conditions.append(ConditionResult(name=name, residual=residual, tol=tol, passed=bool(ok)))

    def discrete_tol(scale):
        return DISCRETE_FACTOR * h**2 * max(1.0, scale)

    add("div_v0", _sup(div(v0, h)), discrete_tol(_sup(v0)))

    lateral_normal = max(
        _sup(face_values(v0[1], 1, 0)), _sup(face_values(v0[1], 1, -1)),
        _sup(face_values(v0[2], 2, 0)), _sup(face_values(v0[2], 2, -1)),
    )
    add("v0_normal_lateral", lateral_normal, ANALYTIC_TOL)

    trace = max(
        _sup(face_values(v0[0], 0, 0) - bdata.inflow(grid, 0.0)),
        _sup(face_values(v0[0], 0, -1) - bdata.outflow(grid, 0.0)),
    )
    add("v0_normal_trace", trace, ANALYTIC_TOL)

    flux = max(abs(grid.integrate_face(bdata.inflow(grid, float(t))) - grid.integrate_face(bdata.outflow(grid, float(t))))
               for t in times)
    add("flux_balance", flux, ANALYTIC_TOL)

    omega_b = [bdata.inflow_vorticity(grid, float(t)) for t in times]
    add("omega_b1_zero", max(_sup(w[0]) for w in omega_b), ANALYTIC_TOL)

    x2, x3 = grid.face_mesh()
    U = np.broadcast_to(profile.U(x2, x3), x2.shape)
    dU2, dU3 = (np.broadcast_to(d, x2.shape) for d in profile.grad(x2, x3))
    tangential_div = 0.0
    scale = 0.0
    for t, w in zip(times, omega_b):
        vb = bdata.inflow(grid, float(t))
        a = U * w[1] + vb * (dU3 + w[1])
        b = U * w[2] + vb * (-dU2 + w[2])
        expr = np.gradient(a, h, axis=0, edge_order=2) + np.gradient(b, h, axis=1, edge_order=2)
        tangential_div = max(tangential_div, _sup(expr))
        scale = max(scale, _sup(a), _sup(b))
    add("omega_b_tangential_divergence", tangential_div, discrete_tol(scale))

    edges = 0.0
    for w in omega_b:
        for side in (0, -1):
            edges = max(edges, _sup(w[[0, 2]][:, side, :]), _sup(w[[0, 1]][:, :, side]))
    add("omega_b_edges", edges, ANALYTIC_TOL)

    add("profile_lateral", profile.lateral_residual(grid), ANALYTIC_TOL)

    add("omega0_curl", _sup(omega0 - curl(v0, h)), discrete_tol(_sup(omega0)))

    add("omega0_inflow", _sup(face_values(omega0, 0, 0) - bdata.inflow_vorticity(grid, 0.0)), ANALYTIC_TOL)

    lateral_tangent = max(
        _sup(face_values(omega0[[0, 2]], 1, 0)), _sup(face_values(omega0[[0, 2]], 1, -1)),
        _sup(face_values(omega0[[0, 1]], 2, 0)), _sup(face_values(omega0[[0, 1]], 2, -1)),
    )
    add("omega0_tangential_lateral", lateral_tangent, ANALYTIC_TOL)

    u_min = profile.min_speed(grid)
    add("profile_positive", max(0.0, -u_min), 0.0, passed=u_min > 0)

    for failure in report.failures():
        logger.warning("compatibility condition %s fails: residual %.3e > %.3e",
                       failure.name, failure.residual, failure.tol)
    return report
