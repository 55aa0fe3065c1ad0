"""Characteristics and mild solutions of scalar inflow transport on [-1, 1].

Example:
    from inflow_lab.transport import SpeedField1D, TransportProblem1D, Datum, solve_mild

    problem = TransportProblem1D(
        speed=SpeedField1D.constant(1.0),
        f0=Datum(lambda x: np.sin(np.pi * x), sup=1.0, lip=np.pi),
    )
    field = solve_mild(problem, t=0.5, grid=256)
"""

from .speed import SpeedField1D, speed_from_spec
from .characteristics import (
    CharacteristicPath,
    ExitRecord,
    TraceResult,
    backward_exit,
    exit_time_field,
    follow_characteristic,
    gamma_curve,
    gamma_exit_time,
    gamma_position,
    trace,
    trace_forward,
)
from .fields import (
    Datum,
    Discontinuity,
    ScalarField1D,
    VectorField1D,
    WeightParams,
    uniform_grid,
)
from .mild import (
    OutflowTrace,
    TimeDerivativeResult,
    TransportProblem1D,
    evaluate_point,
    mild_residual,
    restart,
    snapshot,
    solve_mild,
    solve_time_derivative,
    time_derivative_problem,
    trace_at_outflow,
)
from .estimates import (
    DecaySeries,
    EstimateReport,
    FlushReport,
    check_time_derivative_estimate,
    check_weighted_sup_estimate,
    decay_series,
    flush_check,
    weighted_data_norms,
)
from .march import march_mild

__all__ = [
    # Speeds and characteristics
    "SpeedField1D",
    "speed_from_spec",
    "CharacteristicPath",
    "ExitRecord",
    "TraceResult",
    "backward_exit",
    "exit_time_field",
    "follow_characteristic",
    "gamma_curve",
    "gamma_exit_time",
    "gamma_position",
    "trace",
    "trace_forward",

    # Data carriers
    "Datum",
    "Discontinuity",
    "ScalarField1D",
    "VectorField1D",
    "WeightParams",
    "uniform_grid",

    # Mild solutions
    "OutflowTrace",
    "TimeDerivativeResult",
    "TransportProblem1D",
    "evaluate_point",
    "mild_residual",
    "restart",
    "snapshot",
    "solve_mild",
    "solve_time_derivative",
    "time_derivative_problem",
    "trace_at_outflow",
    "march_mild",

    # Estimates
    "DecaySeries",
    "EstimateReport",
    "FlushReport",
    "check_time_derivative_estimate",
    "check_weighted_sup_estimate",
    "decay_series",
    "flush_check",
    "weighted_data_norms",
]
