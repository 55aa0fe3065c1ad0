"""Perturbation problems for hyperbolic systems with inflow data.

A problem is ``V_t + A(Ubar + V) V_x = 0`` on [-1, 1], with V(0) = V0 and, for
each family i, the characteristic unknown f_i prescribed on the inflow side of
family i (x = -1 when lambda_i(Ubar) > 0, x = +1 otherwise).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..config import get_config
from ..errors import ConfigurationError
from ..systems import FluxSystem, eigendecompose, eigendecompose_field, get_system, to_characteristic

logger = logging.getLogger(__name__)

FieldFunc = Callable[[np.ndarray], np.ndarray]

COMPATIBILITY_TOL = 1e-10


def _zero_inflow(n: int) -> FieldFunc:
    return lambda t: np.zeros(np.shape(t) + (n,))


@dataclass
class SystemProblem:
    """Initial perturbation V0(x) -> (..., n) and inflow data b(t) -> (..., n).

    Attributes:
        system: Flux system.
        V0: Initial perturbation.
        b: Inflow values of the characteristic unknowns, one per family.
        eps0_budget: Bound on the W^{1,inf} size of the data.
        name: Label for reports.
    """
    system: FluxSystem
    V0: FieldFunc
    b: Optional[FieldFunc] = None
    eps0_budget: float = field(default_factory=lambda: get_config().eps0)
    name: str = "problem"

    def __post_init__(self):
        if self.b is None:
            self.b = _zero_inflow(self.system.n)

    @property
    def n(self) -> int:
        return self.system.n

    def base_speeds(self) -> np.ndarray:
        """Eigenvalues at the base state."""
        return eigendecompose(self.system, self.system.base_state).lambdas

    def inflow_points(self) -> np.ndarray:
        """Inflow point of every family: -sign(lambda_i(Ubar))."""
        return -np.sign(self.base_speeds())

    def initial_values(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.V0(np.asarray(x, dtype=float)), dtype=float).reshape(np.shape(x) + (self.n,))

    def inflow_values(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(self.b(np.asarray(t, dtype=float)), dtype=float).reshape(np.shape(t) + (self.n,))

    def initial_characteristic(self, x: np.ndarray) -> np.ndarray:
        """f0 = T0^-1 V0 with T0 the eigenbasis at Ubar + V0(x)."""
        V0 = self.initial_values(x)
        decomp = eigendecompose_field(self.system, self.system.state(V0))
        return to_characteristic(decomp, V0)

    def compatibility_residual(self) -> float:
        """max_i |f0_i(inflow point of i) - b_i(0)|."""
        points = self.inflow_points()
        b0 = self.inflow_values(np.zeros(1))[0]
        residual = 0.0
        for i, x_in in enumerate(points):
            f0 = self.initial_characteristic(np.array([x_in]))[0]
            residual = max(residual, abs(float(f0[i]) - float(b0[i])))
        return residual

    def data_norm(self, horizon: float, resolution: int = 2049) -> float:
        """||V0||_{W^{1,inf}} + ||b||_{W^{1,inf}(0, horizon)} on fine samples."""
        xs = np.linspace(-1.0, 1.0, resolution)
        V0 = self.initial_values(xs)
        dV0 = np.gradient(V0, xs, axis=0, edge_order=2)
        ts = np.linspace(0.0, max(horizon, 1e-12), resolution)
        b = self.inflow_values(ts)
        db = np.gradient(b, ts, axis=0, edge_order=2)
        return float(np.max(np.abs(V0)) + np.max(np.abs(dV0)) + np.max(np.abs(b)) + np.max(np.abs(db)))

    def validate(self, horizon: float) -> None:
        """Check compatibility and the data budget.

        Raises:
            ConfigurationError: Incompatible data or data above the budget.
        """
        residual = self.compatibility_residual()
        if residual > COMPATIBILITY_TOL:
            raise ConfigurationError(
                "inflow data are not compatible with the initial datum",
                details={"residual": residual},
            )
        norm = self.data_norm(horizon)
        if norm > self.eps0_budget * (1.0 + 1e-9):
            raise ConfigurationError(
                f"data norm {norm:.4g} exceeds the smallness budget {self.eps0_budget:.4g}",
                details={"data_norm": norm, "eps0": self.eps0_budget},
            )


def sine_problem(
    system_name: str,
    amplitude: float,
    mode: int = 1,
    component: int = 0,
    normalize: bool = True,
    pulse: float = 0.0,
    pulse_duration: float = 1.0,
    eps0_budget: Optional[float] = None,
) -> SystemProblem:
    """V0 = a sin(m pi x) e_k, optionally with a smooth inflow pulse.

    Args:
        system_name: Catalog system.
        amplitude: With ``normalize`` the W^{1,inf} size of V0, otherwise ``a``.
        mode: Wave number m.
        component: Component k carrying the profile.
        normalize: Interpret ``amplitude`` as a W^{1,inf} size.
        pulse: Height of ``b_i(t) = pulse sin^2(pi t / duration)`` on [0, duration].
        pulse_duration: Duration of the pulse.
        eps0_budget: Data budget; defaults to the configured ``eps0``.
    """
    system = get_system(system_name)
    if not 0 <= component < system.n:
        raise ConfigurationError(f"component {component} out of range for {system_name}")
    a = amplitude / (1.0 + mode * np.pi) if normalize else amplitude
    unit = np.eye(system.n)[component]

    def V0(x):
        return a * np.sin(mode * np.pi * np.asarray(x))[..., None] * unit

    b = None
    if pulse:
        def b(t):
            t = np.asarray(t, dtype=float)
            bump = np.where((t >= 0) & (t <= pulse_duration), np.sin(np.pi * t / pulse_duration) ** 2, 0.0)
            return pulse * bump[..., None] * np.ones(system.n)

    return SystemProblem(
        system=system,
        V0=V0,
        b=b,
        eps0_budget=get_config().eps0 if eps0_budget is None else eps0_budget,
        name=f"{system_name}-sine",
    )


def zero_problem(system_name: str = "burgers") -> SystemProblem:
    system = get_system(system_name)
    return SystemProblem(system=system, V0=lambda x: np.zeros(np.shape(x) + (system.n,)),
                         name=f"{system_name}-zero")
