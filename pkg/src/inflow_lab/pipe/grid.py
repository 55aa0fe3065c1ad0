"""Uniform collocated grid on the square pipe (-1, 1)^3 and discrete operators.

Vector fields are arrays of shape (3, n, n, n) with axis order (x1, x2, x3);
scalars drop the leading component axis. Derivatives are second-order centred
differences with second-order one-sided stencils on the faces.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates, spline_filter

from ..errors import PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipeGrid:
    """n nodes per axis, faces included."""
    n: int

    def __post_init__(self):
        if self.n < 5:
            raise PreconditionError(f"pipe grid needs at least 5 nodes per axis, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.n)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    def mesh(self) -> np.ndarray:
        """Node coordinates, shape (3, n, n, n)."""
        return np.stack(np.meshgrid(self.nodes, self.nodes, self.nodes, indexing="ij"))

    def face_mesh(self) -> np.ndarray:
        """Coordinates on a face, shape (2, n, n)."""
        return np.stack(np.meshgrid(self.nodes, self.nodes, indexing="ij"))

    def line_weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[[0, -1]] = 0.5 * self.h
        return w

    def face_weights(self) -> np.ndarray:
        w = self.line_weights()
        return w[:, None] * w[None, :]

    def volume_weights(self) -> np.ndarray:
        w = self.line_weights()
        return w[:, None, None] * w[None, :, None] * w[None, None, :]

    def integrate(self, values: np.ndarray) -> float:
        """Trapezoidal volume integral of a scalar field."""
        return float(np.sum(self.volume_weights() * values))

    def integrate_face(self, values: np.ndarray) -> float:
        return float(np.sum(self.face_weights() * values))


def grad(f: np.ndarray, h: float) -> np.ndarray:
    """Gradient of a scalar (n, n, n) -> (3, n, n, n)."""
    return np.stack(np.gradient(f, h, edge_order=2))


def jacobian(v: np.ndarray, h: float) -> np.ndarray:
    """J[i, j] = d_j v_i, shape (3, 3, n, n, n)."""
    return np.stack([grad(v[i], h) for i in range(v.shape[0])])


def div(v: np.ndarray, h: float) -> np.ndarray:
    return sum(np.gradient(v[i], h, axis=i, edge_order=2) for i in range(3))


def curl(v: np.ndarray, h: float) -> np.ndarray:
    J = jacobian(v, h)
    return np.stack([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def laplacian(f: np.ndarray, h: float) -> np.ndarray:
    """Componentwise Laplacian by repeated centred differences."""
    if f.ndim == 4:
        return np.stack([laplacian(fi, h) for fi in f])
    return sum(np.gradient(np.gradient(f, h, axis=i, edge_order=2), h, axis=i, edge_order=2) for i in range(3))


def advect(u: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    """(u . grad) f for a vector f, shape (3, n, n, n)."""
    return np.einsum("j...,ij...->i...", u, jacobian(f, h))


def magnitude(values: np.ndarray) -> np.ndarray:
    """Pointwise Euclidean magnitude over all leading component axes."""
    values = np.asarray(values, dtype=float)
    if values.ndim <= 3:
        return np.abs(values)
    flat = values.reshape((-1,) + values.shape[-3:])
    return np.sqrt(np.sum(flat**2, axis=0))


def lp_norm(values: np.ndarray, grid: PipeGrid, p: float) -> float:
    """Trapezoidal L^p norm of the pointwise magnitude."""
    return grid.integrate(magnitude(values) ** p) ** (1.0 / p)


def face_lp_norm(values: np.ndarray, grid: PipeGrid, p: float) -> float:
    """L^p norm on a face of shape (..., n, n)."""
    values = np.asarray(values, dtype=float)
    mag = np.abs(values) if values.ndim == 2 else np.sqrt(np.sum(values.reshape((-1,) + values.shape[-2:]) ** 2, axis=0))
    return grid.integrate_face(mag**p) ** (1.0 / p)


def w1p_norm(values: np.ndarray, grid: PipeGrid, p: float) -> float:
    """||f||_p + ||D f||_p."""
    values = np.asarray(values, dtype=float)
    D = grad(values, grid.h) if values.ndim == 3 else jacobian(values, grid.h)
    return lp_norm(values, grid, p) + lp_norm(D, grid, p)


def w2p_norm(values: np.ndarray, grid: PipeGrid, p: float) -> float:
    """||f||_p + ||D f||_p + ||D^2 f||_p."""
    values = np.asarray(values, dtype=float)
    components = values[None] if values.ndim == 3 else values
    first = np.stack([grad(c, grid.h) for c in components])
    second = np.stack([jacobian(d, grid.h) for d in first])
    return lp_norm(values, grid, p) + lp_norm(first, grid, p) + lp_norm(second, grid, p)


def face_values(values: np.ndarray, axis: int, side: int) -> np.ndarray:
    """Trace on the face x_axis = -1 (side 0) or +1 (side -1)."""
    index = [slice(None)] * values.ndim
    index[values.ndim - 3 + axis] = side
    return values[tuple(index)]


class GridInterpolator:
    """Cubic B-spline interpolation of grid samples at arbitrary points.

    Samples are prefiltered once; positions outside the pipe are clamped to
    the nearest face.
    """

    def __init__(self, grid: PipeGrid, values: np.ndarray):
        self.grid = grid
        values = np.asarray(values, dtype=float)
        self._vector = values.ndim == 4
        comps = values if self._vector else values[None]
        self._coeffs = [spline_filter(c, order=3, mode="nearest") for c in comps]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (3, ...); returns (m, ...) or (...)."""
        points = np.asarray(points, dtype=float)
        coords = (np.clip(points, -1.0, 1.0) + 1.0) / self.grid.h
        out = np.stack([
            map_coordinates(c, coords, order=3, mode="nearest", prefilter=False)
            for c in self._coeffs
        ])
        return out if self._vector else out[0]


@dataclass
class PipeField3D:
    """Scalar or vector samples on the pipe grid at one time."""
    grid: PipeGrid
    values: np.ndarray
    t: float = 0.0

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 4

    def face(self, axis: int, side: int) -> np.ndarray:
        return face_values(self.values, axis, side)

    def div(self) -> np.ndarray:
        return div(self.values, self.grid.h)

    def curl(self) -> "PipeField3D":
        return PipeField3D(self.grid, curl(self.values, self.grid.h), self.t)

    def grad(self) -> "PipeField3D":
        return PipeField3D(self.grid, grad(self.values, self.grid.h), self.t)

    def lp(self, p: float) -> float:
        return lp_norm(self.values, self.grid, p)

    def w1p(self, p: float) -> float:
        return w1p_norm(self.values, self.grid, p)

    def w2p(self, p: float) -> float:
        return w2p_norm(self.values, self.grid, p)

    def sup(self) -> float:
        return float(np.max(magnitude(self.values)))

    def interpolator(self) -> GridInterpolator:
        return GridInterpolator(self.grid, self.values)


@dataclass
class PipeSlab:
    """Uniform time samples of a field, shape (K, ...) with K >= 2."""
    grid: PipeGrid
    times: np.ndarray
    values: np.ndarray
    _interpolators: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.values.shape[0] != self.times.size:
            raise PreconditionError("slab values and times disagree in length")

    def at(self, k: int) -> PipeField3D:
        return PipeField3D(self.grid, self.values[k], float(self.times[k]))

    def interpolator(self, k: int) -> GridInterpolator:
        interp = self._interpolators.get(k)
        if interp is None:
            if len(self._interpolators) > 3:
                self._interpolators.pop(max(self._interpolators, key=lambda key: abs(key - k)))
            interp = GridInterpolator(self.grid, self.values[k])
            self._interpolators[k] = interp
        return interp

    def sample(self, k: int, tau, points: np.ndarray) -> np.ndarray:
        """Linear in time between samples k and k + 1, cubic in space.

        ``tau`` is a scalar or an array broadcasting against ``points[0]``.
        """
        k1 = min(k + 1, self.times.size - 1)
        t0, t1 = self.times[k], self.times[k1]
        lower = self.interpolator(k)(points)
        if t1 == t0:
            return lower
        theta = np.clip((np.asarray(tau, dtype=float) - t0) / (t1 - t0), 0.0, 1.0)
        if not np.any(theta):
            return lower
        return (1.0 - theta) * lower + theta * self.interpolator(k1)(points)
