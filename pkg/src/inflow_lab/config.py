"""Configuration shared by the inflow_lab solvers."""

import os
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Optional


class Region(Enum):
    """Space-time regions cut out by the corner characteristic."""
    Q_PLUS = "Q_plus"
    Q_MINUS = "Q_minus"
    GAMMA = "Gamma"


class ModuleName(Enum):
    """Experiment families the harness can dispatch to."""
    TRANSPORT1D = "transport1d"
    HYP1D = "hyp1d"
    PIPE3D = "pipe3d"
    DIVCURL = "divcurl"
    TRACE = "trace"


class BoundaryKind(Enum):
    """Per-axis boundary treatment for the box Poisson solver."""
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass
class LabConfig:
    """Numerical defaults for the solvers.

    Attributes:
        ode_rtol: Relative tolerance of the adaptive characteristic integrator.
        ode_atol: Absolute tolerance of the adaptive characteristic integrator.
        tol_gamma: Position band around the corner characteristic labelled Gamma.
        lambda_floor: Smallest admissible |eigenvalue| before the inflow
            problem is treated as characteristic.
        fd_step: Central-difference step for Jacobian checks.
        jump_tol: Branch disagreement on Gamma reported as a discontinuity.
        delta: Induction budget of the quasilinear iteration.
        eps0: Data smallness budget of the quasilinear iteration.
        horizon: Default time horizon.
        cfl: Slab time step in units of dx / max|lambda|.
        inner_tol: Relative stopping tolerance of the inner linear iteration.
        outer_tol: Relative stopping tolerance of the outer mollified iteration.
        divergence_patience: Consecutive non-contracting steps before giving up.
        stability_constant: Admissible ratio of solution norm to data norm.
        lp_exponent: Lebesgue exponent of the pipe estimates.
        alpha_pipe: Weight rate of the pipe estimates.
        epsilon: Lateral regularization of the transporting field.
        estimate_headroom: Factor absorbing unquantified constants in estimates.
        output_dir: Default directory for reports.
    """
    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    tol_gamma: float = 1e-9
    lambda_floor: float = 1e-3
    fd_step: float = 1e-5
    jump_tol: float = 1e-8
    delta: float = 0.05
    eps0: float = 0.01
    horizon: float = 50.0
    cfl: float = 2.0
    inner_tol: float = 1e-10
    outer_tol: float = 1e-3
    divergence_patience: int = 3
    stability_constant: float = 10.0
    lp_exponent: float = 4.0
    alpha_pipe: float = 1.0
    epsilon: float = 1e-6
    estimate_headroom: float = 4.0
    output_dir: Path = field(default_factory=lambda: Path("results"))

    def __post_init__(self):
        """Normalize paths and validate ranges after initialization."""
        if isinstance(self.output_dir, str):
            self.output_dir = Path(self.output_dir)
        if self.lp_exponent <= 3:
            raise ValueError(f"lp_exponent must exceed 3, got {self.lp_exponent}")
        for name in ("ode_rtol", "ode_atol", "tol_gamma", "lambda_floor",
                     "inner_tol", "outer_tol", "delta", "eps0", "epsilon"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "LabConfig":
        """Build a config honouring ``INFLOW_LAB_OUTPUT_DIR``.

        Args:
            **overrides: Field values taking precedence over the environment.

        Returns:
            The new LabConfig.
        """
        env_dir = os.getenv("INFLOW_LAB_OUTPUT_DIR")
        if env_dir and "output_dir" not in overrides:
            overrides["output_dir"] = env_dir
        return cls(**overrides)

    def updated(self, **kwargs) -> "LabConfig":
        """Return a copy with the given fields replaced, ignoring unknown keys."""
        known = {f.name for f in fields(self)}
        return replace(self, **{k: v for k, v in kwargs.items() if k in known})


# Global configuration instance
_config: Optional[LabConfig] = None


def get_config() -> LabConfig:
    """Get the current lab configuration.

    Returns:
        The current LabConfig instance.
    """
    global _config
    if _config is None:
        _config = LabConfig()
    return _config


def set_config(config: LabConfig) -> None:
    """Set the global lab configuration.

    Args:
        config: The LabConfig to use.
    """
    global _config
    _config = config


def configure(**kwargs) -> LabConfig:
    """Configure the lab with the given settings.

    Args:
        **kwargs: Configuration options to pass to LabConfig.

    Returns:
        The new LabConfig instance.
    """
    config = LabConfig(**kwargs)
    set_config(config)
    return config
