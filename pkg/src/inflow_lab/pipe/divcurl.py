"""Recovery of the velocity perturbation from its vorticity on the square pipe.

The velocity is split as ``v = v* + grad psi``:

    * ``psi`` is harmonic with ``d_1 psi = v_b`` on the inflow and outflow faces
      and zero normal derivative on the lateral faces;
    * every component of ``v*`` solves ``-Laplacian v*_i = (curl omega)_i``,
      odd across the faces it is normal to and even across the others.

Inflow and outflow faces carry the Neumann closure ``d_1 v*_2 = omega_3`` and
``d_1 v*_3 = -omega_2`` implied by ``curl v* = omega`` with ``v*_1 = 0`` there.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config import BoundaryKind
from ..errors import NoSolutionError, SolverFailureError
from .grid import PipeGrid, curl, div, face_lp_norm, face_values, grad, lp_norm, w1p_norm, w2p_norm
from .poisson import solve_box_poisson

logger = logging.getLogger(__name__)

D, N = BoundaryKind.DIRICHLET, BoundaryKind.NEUMANN

COMPONENT_KINDS = (
    (D, N, N),
    (N, D, N),
    (N, N, D),
)

FLUX_TOL = 1e-10
RESIDUAL_FACTOR = 50.0


@dataclass
class DivCurlResult:
    """Velocity, its two parts and the residuals of the reconstruction."""
    v: np.ndarray
    v_star: np.ndarray
    psi: np.ndarray
    curl_residual: float
    div_residual: float
    constants: dict = field(default_factory=dict)


def flux_imbalance(grid: PipeGrid, v_b_minus: np.ndarray, v_b_plus: np.ndarray) -> float:
    """Inflow flux minus outflow flux (trapezoidal)."""
    return grid.integrate_face(np.broadcast_to(v_b_minus, (grid.n, grid.n))) - \
        grid.integrate_face(np.broadcast_to(v_b_plus, (grid.n, grid.n)))


def harmonic_lift(grid: PipeGrid, v_b_minus: np.ndarray, v_b_plus: np.ndarray) -> np.ndarray:
    """Zero-mean psi with Laplacian 0, d_1 psi = v_b on x1 = -+1 and zero lateral flux.

    Raises:
        NoSolutionError: If the inflow and outflow fluxes differ.
    """
    shape = (grid.n, grid.n)
    v_b_minus = np.broadcast_to(np.asarray(v_b_minus, dtype=float), shape)
    v_b_plus = np.broadcast_to(np.asarray(v_b_plus, dtype=float), shape)
    imbalance = flux_imbalance(grid, v_b_minus, v_b_plus)
    scale = max(1.0, grid.integrate_face(np.abs(v_b_minus)), grid.integrate_face(np.abs(v_b_plus)))
    if abs(imbalance) > FLUX_TOL * scale:
        raise NoSolutionError(
            "inflow and outflow fluxes differ; no divergence-free velocity exists",
            details={"imbalance": imbalance},
        )
    return solve_box_poisson(np.zeros(grid.shape), grid.h, (N, N, N), {0: (v_b_minus, v_b_plus)})


def solenoidal_part(grid: PipeGrid, omega: np.ndarray) -> np.ndarray:
    """v* with curl v* = omega, div v* = 0 and v* . nu = 0 on the whole boundary."""
    source = -curl(omega, grid.h)
    parts = []
    for i, kinds in enumerate(COMPONENT_KINDS):
        data = {}
        if i == 1:
            data[0] = (face_values(omega[2], 0, 0), face_values(omega[2], 0, -1))
        elif i == 2:
            data[0] = (-face_values(omega[1], 0, 0), -face_values(omega[1], 0, -1))
        parts.append(solve_box_poisson(source[i], grid.h, kinds, data))
    return np.stack(parts)


def divcurl_solve(
    grid: PipeGrid,
    omega: np.ndarray,
    v_b_minus,
    v_b_plus,
    p: float = 4.0,
    check_residual: bool = True,
    residual_factor: Optional[float] = None,
) -> DivCurlResult:
    """Velocity perturbation from vorticity and inflow/outflow normal velocity.

    Args:
        grid: Pipe grid.
        omega: Vorticity samples, shape (3, n, n, n).
        v_b_minus: Normal velocity on x1 = -1, scalar or (n, n).
        v_b_plus: Normal velocity on x1 = +1, scalar or (n, n).
        p: Exponent of the reported norms.
        check_residual: Raise if curl v misses omega by more than the tolerance.
        residual_factor: Tolerance ``factor * h^2`` on the relative curl residual.

    Returns:
        DivCurlResult with the velocity and the estimate constants.

    Raises:
        NoSolutionError: Flux imbalance.
        SolverFailureError: Relative curl residual above tolerance.
    """
    omega = np.asarray(omega, dtype=float)
    psi = harmonic_lift(grid, v_b_minus, v_b_plus)
    v_star = solenoidal_part(grid, omega)
    v = v_star + grad(psi, grid.h)

    omega_norm = lp_norm(omega, grid, p)
    curl_residual = lp_norm(curl(v, grid.h) - omega, grid, p)
    div_residual = lp_norm(div(v, grid.h), grid, p)
    relative = curl_residual / omega_norm if omega_norm > 0 else curl_residual
    tolerance = (RESIDUAL_FACTOR if residual_factor is None else residual_factor) * grid.h**2
    if check_residual and relative > tolerance:
        raise SolverFailureError(
            "reconstructed velocity does not reproduce the vorticity",
            details={"relative_curl_residual": relative, "tolerance": tolerance},
        )

    shape = (grid.n, grid.n)
    faces = [np.broadcast_to(np.asarray(b, dtype=float), shape) for b in (v_b_minus, v_b_plus)]
    boundary_lp = sum(face_lp_norm(b, grid, p) for b in faces)
    boundary_w = sum(face_lp_norm(b, grid, p) + face_lp_norm(np.stack(np.gradient(b, grid.h, edge_order=2)), grid, p)
                     for b in faces)
    denominator1 = omega_norm + boundary_lp
    denominator2 = w1p_norm(omega, grid, p) + boundary_w
    constants = {
        "C1": w1p_norm(v, grid, p) / denominator1 if denominator1 > 0 else 0.0,
        "C2": w2p_norm(v, grid, p) / denominator2 if denominator2 > 0 else 0.0,
    }
    logger.debug("div-curl: |curl v - w|=%.3e, |div v|=%.3e, C1=%.3g, C2=%.3g",
                 curl_residual, div_residual, constants["C1"], constants["C2"])
    return DivCurlResult(v=v, v_star=v_star, psi=psi, curl_residual=curl_residual,
                         div_residual=div_residual, constants=constants)


def manufactured_fields(grid: PipeGrid) -> tuple[np.ndarray, np.ndarray]:
    """v = (0, d_3 phi, -d_2 phi) with phi = sin(pi x1) sin(pi x2) sin(pi x3), and omega = curl v."""
    x1, x2, x3 = grid.mesh()
    s1, s2, s3 = np.sin(np.pi * x1), np.sin(np.pi * x2), np.sin(np.pi * x3)
    c1, c2, c3 = np.cos(np.pi * x1), np.cos(np.pi * x2), np.cos(np.pi * x3)
    pi = np.pi
    v = np.stack([np.zeros_like(x1), pi * s1 * s2 * c3, -pi * s1 * c2 * s3])
    omega = np.stack([
        2.0 * pi**2 * s1 * s2 * s3,
        pi**2 * c1 * c2 * s3,
        pi**2 * c1 * s2 * c3,
    ])
    return v, omega


@dataclass
class ManufacturedCase:
    n: int
    h: float
    error: float
    relative_error: float
    curl_residual: float
    div_residual: float


def manufactured_divcurl(n: int, p: float = 4.0) -> ManufacturedCase:
    """Recover the manufactured velocity from its analytic vorticity on an n^3 grid."""
    grid = PipeGrid(n)
    v_exact, omega = manufactured_fields(grid)
    result = divcurl_solve(grid, omega, 0.0, 0.0, p=p, check_residual=False)
    error = lp_norm(result.v - v_exact, grid, p)
    return ManufacturedCase(
        n=n,
        h=grid.h,
        error=error,
        relative_error=error / lp_norm(v_exact, grid, p),
        curl_residual=result.curl_residual / lp_norm(omega, grid, p),
        div_residual=result.div_residual,
    )


@dataclass
class RefinementTable:
    rows: list[ManufacturedCase]

    @property
    def observed_order(self) -> float:
        """Order from the two finest grids."""
        if len(self.rows) < 2:
            return float("nan")
        coarse, fine = self.rows[-2], self.rows[-1]
        return float(np.log(coarse.error / fine.error) / np.log(coarse.h / fine.h))

    def as_rows(self) -> list[dict]:
        return [vars(row).copy() for row in self.rows]


def divcurl_refinement(grids=(16, 32), p: float = 4.0) -> RefinementTable:
    table = RefinementTable(rows=[manufactured_divcurl(n, p) for n in grids])
    logger.info("div-curl refinement over %s: observed order %.2f", list(grids), table.observed_order)
    return table
