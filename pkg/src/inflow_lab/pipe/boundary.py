"""Inflow/outflow data and initial perturbations for the pipe problem."""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Union

import numpy as np

from ..errors import ConfigurationError
from .grid import PipeGrid, face_lp_norm

logger = logging.getLogger(__name__)

FaceFunc = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
VolumeFunc = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _zero_face(t, x2, x3):
    return np.zeros(np.broadcast(t, x2, x3).shape)


def _zero_face_vector(t, x2, x3):
    return np.zeros((3,) + np.broadcast(t, x2, x3).shape)


def _zero_volume(x1, x2, x3):
    return np.zeros((3,) + np.broadcast(x1, x2, x3).shape)


@dataclass(frozen=True)
class PipeBoundaryData:
    """Boundary data and a matching initial perturbation.

    Attributes:
        v_b_minus: Normal velocity v_b(t, x2, x3) on the inflow face x1 = -1;
            face functions broadcast over array-valued t.
        v_b_plus: Normal velocity on the outflow face x1 = +1.
        omega_b_minus: Vorticity (3, ...) prescribed on the inflow face.
        v0: Initial velocity perturbation (3, ...) of (x1, x2, x3).
        omega0: Its vorticity; analytic so face conditions can be checked exactly.
        name: Preset name.
    """
    v_b_minus: FaceFunc = _zero_face
    v_b_plus: FaceFunc = _zero_face
    omega_b_minus: FaceFunc = _zero_face_vector
    v0: VolumeFunc = _zero_volume
    omega0: VolumeFunc = _zero_volume
    name: str = "zero"

    def _face(self, func: FaceFunc, grid: PipeGrid, t: float) -> np.ndarray:
        x2, x3 = grid.face_mesh()
        values = np.asarray(func(t, x2, x3), dtype=float)
        return np.broadcast_to(values, values.shape[:-2] + (grid.n, grid.n)).copy()

    def inflow(self, grid: PipeGrid, t: float) -> np.ndarray:
        return self._face(self.v_b_minus, grid, t)

    def outflow(self, grid: PipeGrid, t: float) -> np.ndarray:
        return self._face(self.v_b_plus, grid, t)

    def inflow_vorticity(self, grid: PipeGrid, t: float) -> np.ndarray:
        return self._face(self.omega_b_minus, grid, t)

    def initial_velocity(self, grid: PipeGrid) -> np.ndarray:
        x1, x2, x3 = grid.mesh()
        return np.broadcast_to(self.v0(x1, x2, x3), (3,) + grid.shape).astype(float)

    def initial_vorticity(self, grid: PipeGrid) -> np.ndarray:
        x1, x2, x3 = grid.mesh()
        return np.broadcast_to(self.omega0(x1, x2, x3), (3,) + grid.shape).astype(float)


def zero_data() -> PipeBoundaryData:
    return PipeBoundaryData()


def pulse_data(amplitude: float = 1e-3, duration: float = 1.0) -> PipeBoundaryData:
    """Uniform pulse v_b = a sin^2(pi t / tau) on both faces for t < tau."""
    def v_b(t, x2, x3):
        t = np.asarray(t, dtype=float)
        level = np.where((t >= 0.0) & (t < duration), amplitude * np.sin(np.pi * t / duration) ** 2, 0.0)
        return level + np.zeros(np.broadcast(t, x2, x3).shape)

    return PipeBoundaryData(v_b_minus=v_b, v_b_plus=v_b, name="pulse")


def lateral_swirl_data(amplitude: float = 1e-2) -> PipeBoundaryData:
    """Swirl chi(x1) (0, d_3 phi, -d_2 phi), phi = sin(pi x2) sin(pi x3), chi = ((1 + x1) / 2)^4.

    Divergence free, tangent to the lateral faces, and switched off at the
    inflow together with its vorticity, so it is compatible with zero data.
    """
    pi = np.pi

    def chi(x1):
        return ((1.0 + x1) / 2.0) ** 4

    def dchi(x1):
        return 2.0 * ((1.0 + x1) / 2.0) ** 3

    def v0(x1, x2, x3):
        s2, s3, c2, c3 = np.sin(pi * x2), np.sin(pi * x3), np.cos(pi * x2), np.cos(pi * x3)
        return amplitude * np.stack(np.broadcast_arrays(
            0.0 * x1, chi(x1) * pi * s2 * c3, -chi(x1) * pi * c2 * s3))

    def omega0(x1, x2, x3):
        s2, s3, c2, c3 = np.sin(pi * x2), np.sin(pi * x3), np.cos(pi * x2), np.cos(pi * x3)
        return amplitude * np.stack(np.broadcast_arrays(
            2.0 * pi**2 * chi(x1) * s2 * s3,
            dchi(x1) * pi * c2 * s3,
            dchi(x1) * pi * s2 * c3,
        ))

    return PipeBoundaryData(v0=v0, omega0=omega0, name="lateral-swirl")


BOUNDARY_PRESETS = {
    "zero": zero_data,
    "pulse": pulse_data,
    "lateral-swirl": lateral_swirl_data,
}


def boundary_from_spec(spec: Union[None, str, Mapping[str, Any], PipeBoundaryData]) -> PipeBoundaryData:
    """Build boundary data from a preset name or ``{"kind": name, **params}``."""
    if spec is None:
        return zero_data()
    if isinstance(spec, PipeBoundaryData):
        return spec
    if isinstance(spec, str):
        spec = {"kind": spec}
    params = dict(spec)
    kind = params.pop("kind", "zero")
    factory = BOUNDARY_PRESETS.get(kind)
    if factory is None:
        raise ConfigurationError(f"unknown boundary data '{kind}'", details={"available": sorted(BOUNDARY_PRESETS)})
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigurationError(f"invalid parameters for boundary data '{kind}': {exc}") from exc


def boundary_norm(bdata: PipeBoundaryData, grid: PipeGrid, times: np.ndarray, p: float,
                  dt: Optional[float] = None) -> float:
    """sup_t of the face L^p sizes of v_b, d_t v_b and omega_b (data side of the stability bound)."""
    dt = dt or 1e-4
    worst = 0.0
    for t in np.atleast_1d(times):
        t = float(t)
        size = 0.0
        for func in (bdata.inflow, bdata.outflow):
            now = func(grid, t)
            later = func(grid, t + dt)
            size += face_lp_norm(now, grid, p) + face_lp_norm((later - now) / dt, grid, p)
        size += face_lp_norm(bdata.inflow_vorticity(grid, t), grid, p)
        worst = max(worst, size)
    return worst
