"""Inflow Lab - hyperbolic problems with inflow boundary conditions.

This package provides solvers and checks for transport and quasilinear
hyperbolic systems on bounded domains where data enter through the boundary,
including:

- A catalog of flux systems with deterministic eigen-decompositions
- Backward characteristics, exit times and mild solutions of 1D transport
- The mollified iteration for small perturbations of 1D quasilinear systems
- Shear-flow perturbations of incompressible Euler flow in a square pipe
- An experiment harness writing JSON/CSV reports

Example:
    from inflow_lab import configure
    from inflow_lab.solvers import SolverSettings, outer_solve, sine_problem

    # Tighten the data budget for this process
    configure(eps0=0.02)

    # Burgers inflow problem with W^{1,inf} data size 1e-2
    problem = sine_problem("burgers", 1e-2)
    result = outer_solve(problem, SolverSettings(grid=256, horizon=10.0))
    print(result.converged_level, result.empirical_constant)
"""

from .config import (
    LabConfig,
    ModuleName,
    Region,
    BoundaryKind,
    get_config,
    set_config,
    configure,
)

from .errors import (
    InflowLabError,
    ConfigurationError,
    SchemaMismatchError,
    DomainError,
    UnsupportedConfigurationError,
    PreconditionError,
    NoSolutionError,
    HyperbolicityError,
    CharacteristicDegeneracyError,
    DivergenceError,
    StabilityBudgetError,
    SolverFailureError,
)

from .systems import get_system, list_systems, eigendecompose

__version__ = "0.1.0"

__all__ = [
    # Configuration
    "LabConfig",
    "ModuleName",
    "Region",
    "BoundaryKind",
    "get_config",
    "set_config",
    "configure",

    # Errors
    "InflowLabError",
    "ConfigurationError",
    "SchemaMismatchError",
    "DomainError",
    "UnsupportedConfigurationError",
    "PreconditionError",
    "NoSolutionError",
    "HyperbolicityError",
    "CharacteristicDegeneracyError",
    "DivergenceError",
    "StabilityBudgetError",
    "SolverFailureError",

    # Systems
    "get_system",
    "list_systems",
    "eigendecompose",
]
