"""Data carriers for the 1D transport problem."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigurationError


def uniform_grid(n: int) -> np.ndarray:
    """n equally spaced nodes on [-1, 1], endpoints included."""
    if n < 3:
        raise ConfigurationError(f"grid needs at least 3 nodes, got {n}")
    return np.linspace(-1.0, 1.0, n)


@dataclass(frozen=True)
class Datum:
    """A data function with declared bounds.

    ``func`` takes the same arguments as the datum it represents: ``f0(x)``,
    ``b(t)`` or ``h(t, x)``. ``deriv`` differentiates with respect to the
    first argument (x for f0, t for b and h); without it a central difference
    is used.
    """
    func: Callable[..., np.ndarray]
    sup: float = float("inf")
    lip: float = float("inf")
    deriv: Optional[Callable[..., np.ndarray]] = None
    name: str = ""

    def __call__(self, *args) -> np.ndarray:
        args = [np.asarray(a, dtype=float) for a in args]
        return np.asarray(self.func(*args), dtype=float) * np.ones(np.broadcast(*args).shape)

    def derivative(self, *args, step: float = 1e-6) -> np.ndarray:
        """Derivative with respect to the first argument."""
        args = [np.asarray(a, dtype=float) for a in args]
        if self.deriv is not None:
            return np.asarray(self.deriv(*args), dtype=float) * np.ones(np.broadcast(*args).shape)
        first, rest = args[0], args[1:]
        return (self(first + step, *rest) - self(first - step, *rest)) / (2.0 * step)

    def derivative_datum(self, sup: float = float("inf"), lip: float = float("inf")) -> "Datum":
        """The derivative as a datum of its own."""
        return Datum(func=lambda *a: self.derivative(*a), sup=sup, lip=lip,
                     name=f"d({self.name})")

    def shifted(self, t1: float) -> "Datum":
        """The datum seen from time t1 on; the first argument must be time."""
        func, deriv = self.func, self.deriv
        return Datum(
            func=lambda t, *rest: func(np.asarray(t) + t1, *rest),
            sup=self.sup,
            lip=self.lip,
            deriv=None if deriv is None else (lambda t, *rest: deriv(np.asarray(t) + t1, *rest)),
            name=f"{self.name}+{t1:g}",
        )

    @classmethod
    def zero(cls) -> "Datum":
        return cls(func=lambda *a: np.zeros(np.broadcast(*a).shape),
                   sup=0.0, lip=0.0, deriv=lambda *a: np.zeros(np.broadcast(*a).shape), name="zero")

    @classmethod
    def constant(cls, c: float) -> "Datum":
        return cls(func=lambda *a: np.full(np.broadcast(*a).shape, float(c)),
                   sup=abs(c), lip=0.0, deriv=lambda *a: np.zeros(np.broadcast(*a).shape),
                   name=f"const({c:g})")


@dataclass(frozen=True)
class WeightParams:
    """Exponential weight w(x) = exp(-alpha * sign * x) and the speed floor."""
    alpha: float
    lambda_m: float
    sign: int = 1

    def __post_init__(self):
        if self.alpha <= 0 or self.lambda_m <= 0:
            raise ConfigurationError("alpha and lambda_m must be positive")

    def weight(self, x) -> np.ndarray:
        return np.exp(-self.alpha * self.sign * np.asarray(x, dtype=float))

    @property
    def decay_rate(self) -> float:
        """alpha * lambda_m, the exponential damping rate of weighted norms."""
        return self.alpha * self.lambda_m

    @classmethod
    def for_speed(cls, speed, t_max: float = 1.0, alpha: Optional[float] = None) -> "WeightParams":
        """Weight matched to a speed.

        The default rate satisfies ``alpha * lambda_m = 2 |d_t lambda / lambda| + 2``,
        which reduces to ``alpha = 2 / lambda_m`` for autonomous speeds.
        """
        if alpha is None:
            log_rate = speed.time_log_derivative_bound(t_max)
            alpha = (2.0 * log_rate + 2.0) / speed.lambda_m
        return cls(alpha=float(alpha), lambda_m=speed.lambda_m, sign=speed.sign)


@dataclass(frozen=True)
class Discontinuity:
    """Jump between the two mild-solution branches at a Gamma point."""
    t: float
    x: float
    jump: float


@dataclass
class ScalarField1D:
    """Samples of a scalar function on a uniform grid of [-1, 1] at time t."""
    x: np.ndarray
    values: np.ndarray
    t: float = 0.0
    regions: Optional[np.ndarray] = None
    discontinuities: list[Discontinuity] = field(default_factory=list)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def weighted_sup_norm(self, params: WeightParams) -> float:
        """sup_x w(x) |f(x)|."""
        return float(np.max(params.weight(self.x) * np.abs(self.values)))

    def lipschitz_seminorm(self) -> float:
        """Largest divided difference between neighbouring nodes."""
        return float(np.max(np.abs(np.diff(self.values)))) / self.dx

    def w1inf_norm(self) -> float:
        return self.sup_norm() + self.lipschitz_seminorm()

    def gradient(self) -> np.ndarray:
        """Second-order finite-difference derivative in x."""
        return np.gradient(self.values, self.x, edge_order=2)

    def trace(self, side: float) -> float:
        """Boundary value at x = -1 (side < 0) or x = +1 (side > 0)."""
        return float(self.values[0] if side < 0 else self.values[-1])

    def region_mask(self, region) -> np.ndarray:
        if self.regions is None:
            raise ValueError("field carries no region labels")
        return self.regions == getattr(region, "value", region)

    @property
    def max_jump(self) -> float:
        return max((d.jump for d in self.discontinuities), default=0.0)


@dataclass
class VectorField1D:
    """Samples of an n-vector function on a uniform grid of [-1, 1] at time t."""
    x: np.ndarray
    values: np.ndarray
    t: float = 0.0

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    def component(self, i: int) -> ScalarField1D:
        return ScalarField1D(x=self.x, values=self.values[:, i], t=self.t)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def lipschitz_seminorm(self) -> float:
        dx = float(self.x[1] - self.x[0])
        return float(np.max(np.abs(np.diff(self.values, axis=0)))) / dx

    def w1inf_norm(self) -> float:
        return self.sup_norm() + self.lipschitz_seminorm()
