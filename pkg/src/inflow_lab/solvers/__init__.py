"""Iterative solver for small perturbations of quasilinear systems with inflow data."""

from .mollifier import bump_kernel, mollify
from .problem import SystemProblem, sine_problem, zero_problem
from .quasilinear import (
    GoodUnknownState,
    InnerResult,
    IterationState,
    LevelDiagnostics,
    QuasilinearResult,
    SolverSettings,
    build_grid,
    coupling_matrix,
    freeze_coefficients,
    good_unknown,
    induction_series,
    inner_solve,
    outer_solve,
)
from .shock import ShockContrastReport, periodic_shock_time, shock_contrast

__all__ = [
    "bump_kernel",
    "mollify",
    "SystemProblem",
    "sine_problem",
    "zero_problem",
    "GoodUnknownState",
    "InnerResult",
    "IterationState",
    "LevelDiagnostics",
    "QuasilinearResult",
    "SolverSettings",
    "build_grid",
    "coupling_matrix",
    "freeze_coefficients",
    "good_unknown",
    "induction_series",
    "inner_solve",
    "outer_solve",
    "ShockContrastReport",
    "periodic_shock_time",
    "shock_contrast",
]
