"""Eigen-decomposition of flux Jacobians and characteristic unknowns.

The decomposition is made deterministic so that characteristic unknowns can
be compared across iterations:

    * eigenvalues sorted non-decreasingly,
    * right eigenvectors (columns of T) normalized to unit Euclidean length,
    * the first nonzero entry of every column positive.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config import get_config
from ..errors import CharacteristicDegeneracyError, HyperbolicityError
from .flux import FluxSystem

logger = logging.getLogger(__name__)

# Condition number of T beyond which the eigenbasis is treated as defective.
DEFECTIVE_CONDITION = 1e10


@dataclass(frozen=True)
class EigenDecomposition:
    """Diagonalization ``A = T diag(lambdas) T_inv``.

    Arrays may carry leading batch dimensions: ``lambdas`` has shape
    ``(..., n)`` and ``T``, ``T_inv`` have shape ``(..., n, n)``.
    """
    lambdas: np.ndarray
    T: np.ndarray
    T_inv: np.ndarray

    @property
    def n(self) -> int:
        return self.lambdas.shape[-1]

    def matrix(self) -> np.ndarray:
        """Reassemble ``T diag(lambdas) T_inv``."""
        return np.einsum("...ij,...j,...jk->...ik", self.T, self.lambdas, self.T_inv)

    def residual(self, A: np.ndarray) -> float:
        """Max-abs entry of ``A T - T Lambda``."""
        AT = A @ self.T
        TL = self.T * self.lambdas[..., None, :]
        return float(np.max(np.abs(AT - TL)))


@dataclass(frozen=True)
class CharacteristicUnknowns:
    """Characteristic unknowns ``f = T^-1 V`` and the good unknown ``g = T^-1 dV/dt``."""
    f: np.ndarray
    g: Optional[np.ndarray] = None


def decompose_matrices(
    A: np.ndarray,
    lambda_floor: Optional[float] = None,
) -> EigenDecomposition:
    """Diagonalize one matrix or a stack of matrices with the canonical framing.

    Args:
        A: Array of shape ``(..., n, n)``.
        lambda_floor: Smallest admissible |eigenvalue|. Defaults to the
            configured ``lambda_floor``; pass 0 to disable the check.

    Returns:
        The EigenDecomposition, batched like ``A``.

    Raises:
        HyperbolicityError: Complex, repeated or defective eigenstructure.
        CharacteristicDegeneracyError: An eigenvalue below ``lambda_floor``.
    """
    A = np.asarray(A, dtype=float)
    floor = get_config().lambda_floor if lambda_floor is None else lambda_floor
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)

    w, T = np.linalg.eig(A)
    if np.iscomplexobj(w):
        imag = float(np.max(np.abs(w.imag)))
        if imag > 1e-12 * scale:
            raise HyperbolicityError(
                "Jacobian has complex eigenvalues",
                details={"max_imag": imag},
            )
        w = w.real
        T = T.real

    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    T = np.take_along_axis(T, order[..., None, :], axis=-1)

    n = A.shape[-1]
    if n > 1:
        gap = float(np.min(np.diff(w, axis=-1)))
        if gap <= 1e-12 * scale:
            raise HyperbolicityError(
                "Jacobian has repeated eigenvalues; the eigenbasis framing is not unique",
                details={"min_gap": gap},
            )

    T = T / np.linalg.norm(T, axis=-2, keepdims=True)
    leading = np.argmax(np.abs(T) > 1e-12, axis=-2)
    lead_values = np.take_along_axis(T, leading[..., None, :], axis=-2)
    T = T * np.where(lead_values < 0.0, -1.0, 1.0)

    condition = np.linalg.cond(T)
    worst = float(np.max(condition))
    if not np.isfinite(worst) or worst > DEFECTIVE_CONDITION:
        raise HyperbolicityError(
            "Jacobian is not diagonalizable to working precision",
            details={"cond_T": worst},
        )

    smallest = float(np.min(np.abs(w)))
    if smallest < floor:
        raise CharacteristicDegeneracyError(
            f"Eigenvalue {smallest:.3e} below the floor {floor:.1e}; inflow condition is ill-posed",
            details={"min_abs_lambda": smallest, "lambda_floor": floor},
        )

    return EigenDecomposition(lambdas=w, T=T, T_inv=np.linalg.inv(T))


def eigendecompose(
    system: FluxSystem,
    state,
    lambda_floor: Optional[float] = None,
) -> EigenDecomposition:
    """Decompose ``A(state)`` for a single state of shape ``(n,)``."""
    return decompose_matrices(system.evaluate_jacobian(state), lambda_floor=lambda_floor)


def eigendecompose_field(
    system: FluxSystem,
    states: np.ndarray,
    lambda_floor: Optional[float] = None,
) -> EigenDecomposition:
    """Decompose ``A`` on a stack of states of shape ``(..., n)``.

    Used on whole space-time slabs; one batched LAPACK call.
    """
    states = np.asarray(states, dtype=float)
    logger.debug("batched eigendecomposition of %d states", int(np.prod(states.shape[:-1])))
    return decompose_matrices(system.evaluate_jacobian(states), lambda_floor=lambda_floor)


def to_characteristic(decomp: EigenDecomposition, V) -> np.ndarray:
    """f = T^-1 V."""
    return np.einsum("...ij,...j->...i", decomp.T_inv, np.asarray(V, dtype=float))


def from_characteristic(decomp: EigenDecomposition, f) -> np.ndarray:
    """V = T f."""
    return np.einsum("...ij,...j->...i", decomp.T, np.asarray(f, dtype=float))


def characteristic_unknowns(
    decomp: EigenDecomposition,
    V,
    dV_dt=None,
) -> CharacteristicUnknowns:
    """Build the pair (f, g) from V and, optionally, its time derivative."""
    f = to_characteristic(decomp, V)
    g = None if dV_dt is None else to_characteristic(decomp, dV_dt)
    return CharacteristicUnknowns(f=f, g=g)
