"""Perturbations of shear flow in the square pipe (-1, 1)^3.

Example:
    from inflow_lab.pipe import EulerSettings, ShearProfile, euler_solve, pulse_data

    result = euler_solve(ShearProfile.plug(), pulse_data(1e-3), EulerSettings(grid=16, horizon=2.0))
    print(result.series["v_w2p"].max(), result.verdicts())
"""

from .grid import (
    GridInterpolator,
    PipeField3D,
    PipeGrid,
    PipeSlab,
    advect,
    curl,
    div,
    face_lp_norm,
    face_values,
    grad,
    jacobian,
    laplacian,
    lp_norm,
    magnitude,
    w1p_norm,
    w2p_norm,
)
from .poisson import neumann_defect, solve_box_poisson
from .divcurl import (
    DivCurlResult,
    ManufacturedCase,
    RefinementTable,
    divcurl_refinement,
    divcurl_solve,
    flux_imbalance,
    harmonic_lift,
    manufactured_divcurl,
    manufactured_fields,
    solenoidal_part,
)
from .profile import PROFILE_PRESETS, ShearProfile, profile_from_spec, shear_vorticity, tangential_residual
from .boundary import (
    BOUNDARY_PRESETS,
    PipeBoundaryData,
    boundary_from_spec,
    boundary_norm,
    lateral_swirl_data,
    pulse_data,
    zero_data,
)
from .compat import CompatReport, ConditionResult, check_compatibility
from .transport3d import (
    DecayReport3D,
    REGION_CODES,
    LateralReport,
    SmallnessBudget3D,
    Transport3DRun,
    lateral_face_points,
    lateral_invariance_check,
    region_labels,
    transport3d_march,
    transport3d_solve,
    weighted_lp_decay_check,
)
from .vorticity import VorticityResult, div_omega_monitor, stretching, tangential_vanish_monitor, vorticity_iterate
from .euler import SERIES_COLUMNS, EulerResult, EulerSettings, WindowDiagnostics, euler_solve, momentum_residual

__all__ = [
    # Grid and operators
    "GridInterpolator",
    "PipeField3D",
    "PipeGrid",
    "PipeSlab",
    "advect",
    "curl",
    "div",
    "face_lp_norm",
    "face_values",
    "grad",
    "jacobian",
    "laplacian",
    "lp_norm",
    "magnitude",
    "w1p_norm",
    "w2p_norm",

    # Elliptic solvers
    "neumann_defect",
    "solve_box_poisson",
    "DivCurlResult",
    "ManufacturedCase",
    "RefinementTable",
    "divcurl_refinement",
    "divcurl_solve",
    "flux_imbalance",
    "harmonic_lift",
    "manufactured_divcurl",
    "manufactured_fields",
    "solenoidal_part",

    # Shear and data
    "PROFILE_PRESETS",
    "ShearProfile",
    "profile_from_spec",
    "shear_vorticity",
    "tangential_residual",
    "BOUNDARY_PRESETS",
    "PipeBoundaryData",
    "boundary_from_spec",
    "boundary_norm",
    "lateral_swirl_data",
    "pulse_data",
    "zero_data",
    "CompatReport",
    "ConditionResult",
    "check_compatibility",

    # Transport and iteration
    "DecayReport3D",
    "REGION_CODES",
    "LateralReport",
    "SmallnessBudget3D",
    "Transport3DRun",
    "lateral_face_points",
    "lateral_invariance_check",
    "region_labels",
    "transport3d_march",
    "transport3d_solve",
    "weighted_lp_decay_check",
    "VorticityResult",
    "div_omega_monitor",
    "stretching",
    "tangential_vanish_monitor",
    "vorticity_iterate",
    "SERIES_COLUMNS",
    "EulerResult",
    "EulerSettings",
    "WindowDiagnostics",
    "euler_solve",
    "momentum_residual",
]
