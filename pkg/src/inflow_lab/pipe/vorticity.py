"""Vorticity of the perturbation for a frozen velocity slab.

With the transporting field u = u_s + v frozen, the perturbation vorticity
solves

    d_t w + u . grad w = -v . grad w_s + (w_s . grad) v + (w . grad) u

with w = w_b on the inflow face. The last term is lagged and iterated.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config import get_config
from ..errors import DivergenceError
from .boundary import PipeBoundaryData
from .grid import PipeGrid, PipeSlab, advect, div, face_values, jacobian, lp_norm
from .profile import ShearProfile, shear_vorticity
from .transport3d import transport3d_march

logger = logging.getLogger(__name__)


@dataclass
class VorticityResult:
    times: np.ndarray
    omega: np.ndarray
    iterations: int
    distances: list[float] = field(default_factory=list)
    ratios: list[float] = field(default_factory=list)


def stretching(omega: np.ndarray, grad_u: np.ndarray) -> np.ndarray:
    """(w . grad) u for w of shape (3, ...) and J[i, j] = d_j u_i."""
    return np.einsum("j...,ij...->i...", omega, grad_u)


def _slab_distance(a: np.ndarray, b: np.ndarray, grid: PipeGrid, p: float) -> float:
    return max(lp_norm(a[k] - b[k], grid, p) for k in range(a.shape[0]))


def _slab_size(a: np.ndarray, grid: PipeGrid, p: float) -> float:
    return max(lp_norm(a[k], grid, p) for k in range(a.shape[0]))


def vorticity_iterate(
    profile: ShearProfile,
    grid: PipeGrid,
    times: np.ndarray,
    v: np.ndarray,
    omega0: np.ndarray,
    bdata: PipeBoundaryData,
    l_max: int = 20,
    tol: float = 1e-8,
    guess: Optional[np.ndarray] = None,
    p: Optional[float] = None,
    epsilon: Optional[float] = None,
    patience: Optional[int] = None,
) -> VorticityResult:
    """Solve for the perturbation vorticity on a slab of frozen velocity.

    Args:
        profile: Shear profile.
        grid: Pipe grid.
        times: Slab times.
        v: Velocity perturbation samples, shape (K, 3, n, n, n).
        omega0: Vorticity at times[0].
        bdata: Supplies the inflow vorticity.
        l_max: Iteration cap.
        tol: Relative tolerance on the sup-in-time L^p distance of iterates.
        guess: Starting slab; omega0 held constant if omitted.
        p: Norm exponent.
        epsilon: Lateral regularization of the transporting field.
        patience: Consecutive non-contracting steps tolerated.

    Returns:
        VorticityResult with the slab of shape (K, 3, n, n, n).

    Raises:
        DivergenceError: If successive distances stop contracting.
    """
    config = get_config()
    p = config.lp_exponent if p is None else p
    patience = config.divergence_patience if patience is None else patience
    h = grid.h
    v = np.asarray(v, dtype=float)
    omega0 = np.asarray(omega0, dtype=float)
    u_s = profile.velocity(grid)
    omega_s = shear_vorticity(profile, grid)
    grad_omega_s = jacobian(omega_s, h)

    u = u_s[None] + v
    grad_u = np.stack([jacobian(u[k], h) for k in range(times.size)])
    fixed = np.stack([
        -np.einsum("j...,ij...->i...", v[k], grad_omega_s) + advect(omega_s, v[k], h)
        for k in range(times.size)
    ])
    coupled = bool(np.any(grad_u != 0.0))
    velocity = PipeSlab(grid, times, u)
    c1 = float(np.min(u[:, 0]))

    def inflow(t, x2, x3):
        return bdata.omega_b_minus(t, x2, x3)

    omega = np.broadcast_to(omega0, (times.size,) + omega0.shape).copy() if guess is None else np.array(guess)
    distances: list[float] = []
    ratios: list[float] = []
    streak = 0
    iterations = 0
    for level in range(1, l_max + 1):
        forcing = fixed + np.stack([stretching(omega[k], grad_u[k]) for k in range(times.size)]) if coupled else fixed
        omega_next = transport3d_march(grid, times, velocity, omega0, b=inflow,
                                       h=PipeSlab(grid, times, forcing), epsilon=epsilon, c1=c1)
        distance = _slab_distance(omega_next, omega, grid, p)
        omega = omega_next
        iterations = level
        distances.append(distance)
        if not coupled:
            break
        if len(distances) > 1 and distances[-2] > 0:
            ratio = distance / distances[-2]
            ratios.append(ratio)
            streak = streak + 1 if ratio >= 1.0 else 0
            if streak >= patience:
                raise DivergenceError("vorticity iteration stopped contracting",
                                      details={"ratios": ratios[-patience:]})
        if distance <= tol * _slab_size(omega, grid, p):
            break
    else:
        logger.warning("vorticity iteration hit l_max=%d (last distance %.3e)", l_max, distances[-1])
    logger.debug("vorticity iteration: %d steps, ratios %s", iterations, ["%.3f" % r for r in ratios])
    return VorticityResult(times=times, omega=omega, iterations=iterations, distances=distances, ratios=ratios)


def div_omega_monitor(omega: np.ndarray, grid: PipeGrid, p: Optional[float] = None) -> np.ndarray:
    """||div w(t)||_p for every sample of a (K, 3, n, n, n) slab."""
    p = get_config().lp_exponent if p is None else p
    return np.array([lp_norm(div(w, grid.h), grid, p) for w in omega])


def tangential_vanish_monitor(omega: np.ndarray) -> np.ndarray:
    """sup of the tangential part of w on the lateral faces for every sample."""
    series = []
    for w in omega:
        parts = []
        for side in (0, -1):
            parts.append(np.max(np.abs(face_values(w[[0, 2]], 1, side))))
            parts.append(np.max(np.abs(face_values(w[[0, 1]], 2, side))))
        series.append(max(parts))
    return np.array(series, dtype=float)
