"""Flux systems ``U_t + F(U)_x = 0`` around a constant base state.

All flux and Jacobian callbacks accept either a single state of shape ``(n,)``
or a stack of states of shape ``(..., n)`` and return ``(..., n)`` and
``(..., n, n)`` arrays respectively.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..config import get_config
from ..errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

ArrayMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FluxSystem:
    """An n-component flux with its Jacobian and base state.

    Attributes:
        name: Catalog identifier.
        n: Number of components.
        flux: Map U -> F(U).
        jacobian: Map U -> A(U) = dF/dU.
        base_state: Constant state the perturbation is taken around.
        domain_check: Optional callable raising DomainError outside the
            domain of definition of the flux.
        validity_radius: Sup-norm radius around the base state in which the
            system is declared strictly hyperbolic and non-characteristic.
    """
    name: str
    n: int
    flux: ArrayMap
    jacobian: ArrayMap
    base_state: np.ndarray
    domain_check: Optional[Callable[[np.ndarray], None]] = None
    validity_radius: float = 0.1
    description: str = field(default="", compare=False)

    def _checked(self, state) -> np.ndarray:
        state = np.asarray(state, dtype=float)
        if state.shape[-1:] != (self.n,):
            raise ConfigurationError(
                f"{self.name} expects states with {self.n} components, got shape {state.shape}"
            )
        if self.domain_check is not None:
            self.domain_check(state)
        return state

    def evaluate_flux(self, state) -> np.ndarray:
        """Evaluate F at one or many states."""
        return np.asarray(self.flux(self._checked(state)), dtype=float)

    def evaluate_jacobian(self, state) -> np.ndarray:
        """Evaluate A at one or many states."""
        return np.asarray(self.jacobian(self._checked(state)), dtype=float)

    def state(self, perturbation) -> np.ndarray:
        """Return ``Ubar + V`` for a perturbation V."""
        return self.base_state + np.asarray(perturbation, dtype=float)


def _scalar_jacobian(values: np.ndarray) -> np.ndarray:
    return values[..., None]


def _advection(speed: float = 1.0) -> FluxSystem:
    return FluxSystem(
        name="advection",
        n=1,
        flux=lambda U: speed * U,
        jacobian=lambda U: np.full(U.shape + (1,), speed),
        base_state=np.zeros(1),
        description=f"linear advection with speed {speed}",
    )


def _burgers() -> FluxSystem:
    return FluxSystem(
        name="burgers",
        n=1,
        flux=lambda U: 0.5 * U ** 2,
        jacobian=lambda U: _scalar_jacobian(U),
        base_state=np.ones(1),
        description="inviscid Burgers, F(U) = U^2/2",
    )


_LINEAR2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def _linear2() -> FluxSystem:
    return FluxSystem(
        name="linear2",
        n=2,
        flux=lambda U: U @ _LINEAR2.T,
        jacobian=lambda U: np.broadcast_to(_LINEAR2, U.shape[:-1] + (2, 2)).copy(),
        base_state=np.zeros(2),
        description="constant-coefficient wave system A = [[0,1],[1,0]]",
    )


def _psystem_domain(state: np.ndarray) -> None:
    v = state[..., 0]
    if np.any(~np.isfinite(v)) or np.any(v <= 0.0):
        raise DomainError(
            "p-system specific volume must be positive",
            details={"min_v": float(np.nanmin(v))},
        )


def _psystem_flux(U: np.ndarray) -> np.ndarray:
    v, u = U[..., 0], U[..., 1]
    return np.stack([-u, v ** -2.0], axis=-1)


def _psystem_jacobian(U: np.ndarray) -> np.ndarray:
    v = U[..., 0]
    A = np.zeros(U.shape[:-1] + (2, 2))
    A[..., 0, 1] = -1.0
    A[..., 1, 0] = -2.0 * v ** -3.0
    return A


def _psystem() -> FluxSystem:
    return FluxSystem(
        name="psystem",
        n=2,
        flux=_psystem_flux,
        jacobian=_psystem_jacobian,
        base_state=np.array([1.0, 0.0]),
        domain_check=_psystem_domain,
        description="isentropic p-system (v, u) with p(v) = v^-2",
    )


CATALOG: dict[str, Callable[[], FluxSystem]] = {
    "advection": _advection,
    "burgers": _burgers,
    "linear2": _linear2,
    "psystem": _psystem,
}


def get_system(name: str, **kwargs) -> FluxSystem:
    """Look up a catalog system by name.

    Args:
        name: One of ``advection``, ``burgers``, ``linear2``, ``psystem``.
        **kwargs: Extra parameters of the factory (``speed`` for advection).

    Returns:
        The FluxSystem.

    Raises:
        ConfigurationError: If the name is not in the catalog.
    """
    try:
        factory = CATALOG[name]
    except KeyError:
        available = ", ".join(sorted(CATALOG))
        raise ConfigurationError(
            f"Unknown flux system '{name}'. Available systems: {available}"
        ) from None
    return factory(**kwargs)


def list_systems() -> list[str]:
    """Names of the catalog systems."""
    return sorted(CATALOG)


def jacobian_fd_check(system: FluxSystem, state, step: Optional[float] = None) -> float:
    """Compare the analytic Jacobian with central differences of the flux.

    Args:
        system: System to check.
        state: State U with shape ``(n,)``.
        step: Difference step; defaults to the configured ``fd_step``.

    Returns:
        Max over entries of ``|A_ij(U) - (F_i(U + s e_j) - F_i(U - s e_j)) / 2s|``.

    Raises:
        DomainError: If the state or a stencil point lies outside the flux domain.
    """
    step = get_config().fd_step if step is None else step
    state = np.asarray(state, dtype=float)
    A = system.evaluate_jacobian(state)
    eye = np.eye(system.n)
    stencil_plus = state + step * eye
    stencil_minus = state - step * eye
    fd = (system.evaluate_flux(stencil_plus) - system.evaluate_flux(stencil_minus)) / (2.0 * step)
    # row j of fd holds dF/dU_j
    discrepancy = float(np.max(np.abs(A - fd.T)))
    logger.debug("jacobian check %s at %s: %.3e", system.name, state, discrepancy)
    return discrepancy
