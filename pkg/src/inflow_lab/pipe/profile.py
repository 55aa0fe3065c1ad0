"""Background shear flows u_s = (U(x2, x3), 0, 0) of the pipe."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Union

import numpy as np

from ..errors import ConfigurationError
from .grid import PipeGrid, face_values, lp_norm

logger = logging.getLogger(__name__)

LATERAL_TOL = 1e-10

ProfileFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ShearProfile:
    """Streamwise speed U with analytic first and second derivatives.

    Attributes:
        U: Speed as a function of (x2, x3).
        grad: Returns (d_2 U, d_3 U).
        hess: Returns (d_22 U, d_23 U, d_33 U).
        name: Preset name.
    """
    U: ProfileFunc
    grad: Callable[[np.ndarray, np.ndarray], tuple]
    hess: Callable[[np.ndarray, np.ndarray], tuple]
    name: str = "profile"

    def speed(self, grid: PipeGrid) -> np.ndarray:
        """U on every node, shape (n, n, n)."""
        _, x2, x3 = grid.mesh()
        return np.broadcast_to(self.U(x2, x3), grid.shape).astype(float)

    def velocity(self, grid: PipeGrid) -> np.ndarray:
        """u_s on every node, shape (3, n, n, n)."""
        out = np.zeros((3,) + grid.shape)
        out[0] = self.speed(grid)
        return out

    def min_speed(self, grid: PipeGrid) -> float:
        return float(np.min(self.speed(grid)))

    def max_speed(self, grid: PipeGrid) -> float:
        return float(np.max(self.speed(grid)))

    def lateral_residual(self, grid: PipeGrid) -> float:
        """max |d_2 U| on x2 = +-1 and |d_3 U| on x3 = +-1."""
        s = grid.nodes
        ones = np.ones_like(s)
        d2_lo, _ = self.grad(-ones, s)
        d2_hi, _ = self.grad(ones, s)
        _, d3_lo = self.grad(s, -ones)
        _, d3_hi = self.grad(s, ones)
        return float(max(np.max(np.abs(v)) for v in (d2_lo, d2_hi, d3_lo, d3_hi)))

    def smallness(self, grid: PipeGrid, delta: float, p: float = 4.0) -> dict[str, Any]:
        """||grad U||_{W^{1,p}} plus the Hessian part against delta min U^2 / (1 + min U)."""
        _, x2, x3 = grid.mesh()
        d2, d3 = self.grad(x2, x3)
        h22, h23, h33 = self.hess(x2, x3)
        first = np.stack(np.broadcast_arrays(d2, d3)).astype(float)
        second = np.stack(np.broadcast_arrays(h22, h23, h23, h33)).astype(float)
        lhs = lp_norm(first, grid, p) + lp_norm(second, grid, p)
        u_min = self.min_speed(grid)
        rhs = delta * u_min**2 / (1.0 + u_min)
        return {"lhs": lhs, "rhs": rhs, "passed": bool(lhs <= rhs)}

    def validate(self, grid: PipeGrid) -> None:
        """Raises ConfigurationError unless U > 0 on the grid."""
        u_min = self.min_speed(grid)
        if u_min <= 0:
            raise ConfigurationError(f"shear speed must be positive, min U = {u_min:.4g}",
                                     details={"min_U": u_min, "profile": self.name})

    @classmethod
    def plug(cls, c: float = 1.0) -> "ShearProfile":
        def zero(x2, x3):
            return np.zeros(np.broadcast(x2, x3).shape)

        return cls(
            U=lambda x2, x3: c + zero(x2, x3),
            grad=lambda x2, x3: (zero(x2, x3), zero(x2, x3)),
            hess=lambda x2, x3: (zero(x2, x3), zero(x2, x3), zero(x2, x3)),
            name="plug",
        )

    @classmethod
    def cosine_shear(cls, c: float = 2.0, m: float = math.pi, amplitude: float = 1.0) -> "ShearProfile":
        """U = c + A cos(m x2); admissible when sin(m) = 0."""
        def zero(x2, x3):
            return np.zeros(np.broadcast(x2, x3).shape)

        def U(x2, x3):
            return c + amplitude * np.cos(m * x2) + zero(x2, x3)

        def grad(x2, x3):
            return (-amplitude * m * np.sin(m * x2) + zero(x2, x3), zero(x2, x3))

        def hess(x2, x3):
            return (-amplitude * m**2 * np.cos(m * x2) + zero(x2, x3), zero(x2, x3), zero(x2, x3))

        return cls(U=U, grad=grad, hess=hess, name="cosine-shear")

    @classmethod
    def product_cosine(cls, c: float = 2.0, amplitude: float = 1.0) -> "ShearProfile":
        """U = c + A cos(pi x2) cos(pi x3)."""
        pi = np.pi

        def U(x2, x3):
            return c + amplitude * np.cos(pi * x2) * np.cos(pi * x3)

        def grad(x2, x3):
            return (-amplitude * pi * np.sin(pi * x2) * np.cos(pi * x3),
                    -amplitude * pi * np.cos(pi * x2) * np.sin(pi * x3))

        def hess(x2, x3):
            return (-amplitude * pi**2 * np.cos(pi * x2) * np.cos(pi * x3),
                    amplitude * pi**2 * np.sin(pi * x2) * np.sin(pi * x3),
                    -amplitude * pi**2 * np.cos(pi * x2) * np.cos(pi * x3))

        return cls(U=U, grad=grad, hess=hess, name="product-cosine")


PROFILE_PRESETS = {
    "plug": ShearProfile.plug,
    "cosine-shear": ShearProfile.cosine_shear,
    "product-cosine": ShearProfile.product_cosine,
}


def profile_from_spec(spec: Union[str, Mapping[str, Any], ShearProfile]) -> ShearProfile:
    """Build a profile from a preset name or ``{"kind": name, **params}``."""
    if isinstance(spec, ShearProfile):
        return spec
    if isinstance(spec, str):
        spec = {"kind": spec}
    params = dict(spec)
    kind = params.pop("kind", "plug")
    factory = PROFILE_PRESETS.get(kind)
    if factory is None:
        raise ConfigurationError(f"unknown profile '{kind}'", details={"available": sorted(PROFILE_PRESETS)})
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigurationError(f"invalid parameters for profile '{kind}': {exc}") from exc


def shear_vorticity(profile: ShearProfile, grid: PipeGrid) -> np.ndarray:
    """omega_s = curl u_s = (0, d_3 U, -d_2 U) on every node.

    Logs a warning when omega_s x nu does not vanish on the lateral faces.
    """
    _, x2, x3 = grid.mesh()
    d2, d3 = profile.grad(x2, x3)
    omega = np.zeros((3,) + grid.shape)
    omega[1] = np.broadcast_to(d3, grid.shape)
    omega[2] = -np.broadcast_to(d2, grid.shape)
    residual = tangential_residual(omega)
    if residual > LATERAL_TOL:
        logger.warning("shear vorticity of profile %s is not normal to the lateral faces (%.3e)",
                       profile.name, residual)
    return omega


def tangential_residual(omega: np.ndarray) -> float:
    """sup of omega x nu on the lateral faces of a (3, n, n, n) field."""
    parts = []
    for side in (0, -1):
        parts.append(face_values(omega[[0, 2]], 1, side))
        parts.append(face_values(omega[[0, 1]], 2, side))
    return float(max(np.max(np.abs(p)) for p in parts))
