"""Fast solver for the second-order discrete Poisson problem on the pipe box.

Each axis carries either a homogeneous Dirichlet condition (odd extension,
DST-I on the interior nodes) or a Neumann condition (even extension, DCT-I on
all nodes). Neumann data ``g = d_axis psi`` on the two faces are folded into
the boundary rows of the right-hand side through the reflected ghost node, so
the discrete operator is diagonal in the transformed variables.
"""

import logging
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import fft

from ..config import BoundaryKind
from ..errors import NoSolutionError

logger = logging.getLogger(__name__)

FaceData = Mapping[int, tuple[np.ndarray, np.ndarray]]


def _eigenvalues(count: int, h: float, kind: BoundaryKind, n: int) -> np.ndarray:
    k = np.arange(count) if kind is BoundaryKind.NEUMANN else np.arange(1, count + 1)
    return -(2.0 - 2.0 * np.cos(np.pi * k / (n - 1))) / h**2


def _forward(values: np.ndarray, axis: int, kind: BoundaryKind) -> np.ndarray:
    if kind is BoundaryKind.NEUMANN:
        return fft.dct(values, type=1, axis=axis)
    return fft.dst(values, type=1, axis=axis)


def _inverse(values: np.ndarray, axis: int, kind: BoundaryKind) -> np.ndarray:
    if kind is BoundaryKind.NEUMANN:
        return fft.idct(values, type=1, axis=axis)
    return fft.idst(values, type=1, axis=axis)


def neumann_defect(rhs: np.ndarray, weights: np.ndarray) -> float:
    """Trapezoidal integral of the folded right-hand side (zero when solvable)."""
    return float(np.sum(weights * rhs))


def solve_box_poisson(
    rhs: np.ndarray,
    h: float,
    kinds: Sequence[BoundaryKind],
    face_data: Optional[FaceData] = None,
    strict: bool = False,
) -> np.ndarray:
    """Solve ``Laplacian_h psi = rhs`` on the (n, n, n) node grid.

    Args:
        rhs: Right-hand side at every node.
        h: Grid spacing.
        kinds: Boundary kind of each axis.
        face_data: For Neumann axes, ``{axis: (g_minus, g_plus)}`` with the
            values of ``d_axis psi`` on the faces x_axis = -1 and +1, each of
            shape (n, n). Missing axes take zero data.
        strict: Raise instead of projecting when an all-Neumann problem is
            not solvable.

    Returns:
        psi at every node; zero on Dirichlet faces, zero trapezoidal mean when
        every axis is Neumann.

    Raises:
        NoSolutionError: ``strict`` and the Neumann compatibility fails.
    """
    kinds = [BoundaryKind(k) for k in kinds]
    rhs = np.array(rhs, dtype=float)
    n = rhs.shape[0]
    face_data = dict(face_data or {})

    for axis, kind in enumerate(kinds):
        if kind is not BoundaryKind.NEUMANN or axis not in face_data:
            continue
        g_minus, g_plus = face_data[axis]
        lower = [slice(None)] * 3
        upper = [slice(None)] * 3
        lower[axis], upper[axis] = 0, -1
        rhs[tuple(lower)] += 2.0 * np.asarray(g_minus) / h
        rhs[tuple(upper)] -= 2.0 * np.asarray(g_plus) / h

    all_neumann = all(k is BoundaryKind.NEUMANN for k in kinds)
    if all_neumann:
        w = np.full(n, h)
        w[[0, -1]] = 0.5 * h
        weights = w[:, None, None] * w[None, :, None] * w[None, None, :]
        defect = neumann_defect(rhs, weights)
        scale = float(np.sum(weights * np.abs(rhs))) or 1.0
        if abs(defect) > 1e-8 * scale:
            if strict:
                raise NoSolutionError("Neumann problem is not solvable",
                                      details={"defect": defect, "scale": scale})
            logger.debug("projecting out Neumann defect %.3e (scale %.3e)", defect, scale)

    interior = tuple(slice(1, -1) if k is BoundaryKind.DIRICHLET else slice(None) for k in kinds)
    work = rhs[interior]
    for axis, kind in enumerate(kinds):
        work = _forward(work, axis, kind)

    shape = work.shape
    mu = sum(
        _eigenvalues(shape[axis], h, kind, n).reshape([-1 if a == axis else 1 for a in range(3)])
        for axis, kind in enumerate(kinds)
    )
    if all_neumann:
        mu = np.array(mu, copy=True)
        mu[0, 0, 0] = 1.0
        work[0, 0, 0] = 0.0
    work = work / mu

    for axis, kind in enumerate(kinds):
        work = _inverse(work, axis, kind)

    psi = np.zeros_like(rhs)
    psi[interior] = work
    return psi
