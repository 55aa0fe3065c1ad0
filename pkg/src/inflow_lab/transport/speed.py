"""Transport speeds on [-1, 1] with declared bounds."""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigurationError

logger = logging.getLogger(__name__)

SpeedCallable = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SpeedField1D:
    """A sign-definite speed lambda(t, x) on [0, inf) x [-1, 1].

    Attributes:
        func: Vectorized map (t, x) -> lambda(t, x).
        lambda_m: Lower bound of |lambda|.
        lip_bound: W^{1,inf} bound of lambda.
        sign: +1 or -1, the constant sign of lambda.
        dt_func: Optional time derivative of lambda.
        autonomous: True when lambda does not depend on t.
        name: Label used in logs and reports.
    """
    func: SpeedCallable
    lambda_m: float
    lip_bound: float
    sign: int
    dt_func: Optional[SpeedCallable] = None
    autonomous: bool = False
    name: str = "speed"

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ConfigurationError(f"speed sign must be +1 or -1, got {self.sign}")
        if self.lambda_m <= 0:
            raise ConfigurationError("lambda_m must be positive")

    def eval(self, t, x) -> np.ndarray:
        """Evaluate lambda, with x clamped to [-1, 1]."""
        t = np.asarray(t, dtype=float)
        x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        return np.asarray(self.func(t, x), dtype=float) * np.ones(np.broadcast(t, x).shape)

    def eval_dt(self, t, x) -> np.ndarray:
        """Time derivative of lambda; zero for autonomous speeds."""
        t = np.asarray(t, dtype=float)
        x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        shape = np.broadcast(t, x).shape
        if self.autonomous:
            return np.zeros(shape)
        if self.dt_func is not None:
            return np.asarray(self.dt_func(t, x), dtype=float) * np.ones(shape)
        step = 1e-6
        return (self.func(t + step, x) - self.func(np.maximum(t - step, 0.0), x)) / (
            t + step - np.maximum(t - step, 0.0)
        )

    @property
    def inflow_point(self) -> float:
        """Boundary point where characteristics enter."""
        return -float(self.sign)

    @property
    def outflow_point(self) -> float:
        """Boundary point where characteristics leave."""
        return float(self.sign)

    def validate(self, t_max: float = 1.0, samples: int = 64) -> None:
        """Audit sign and lower bound on a tensor sample of [0, t_max] x [-1, 1].

        Raises:
            ConfigurationError: If |lambda| < lambda_m or the sign changes.
        """
        ts, xs = np.meshgrid(np.linspace(0.0, t_max, samples), np.linspace(-1.0, 1.0, samples))
        values = self.eval(ts, xs)
        if np.any(np.sign(values) != self.sign):
            raise ConfigurationError(f"speed '{self.name}' changes sign on the audit sample")
        if np.min(np.abs(values)) < self.lambda_m * (1.0 - 1e-12):
            raise ConfigurationError(
                f"speed '{self.name}' violates its declared lower bound",
                details={"min_abs": float(np.min(np.abs(values))), "lambda_m": self.lambda_m},
            )

    def time_log_derivative_bound(self, t_max: float = 1.0, samples: int = 64) -> float:
        """Sampled sup of |d_t lambda / lambda|."""
        if self.autonomous:
            return 0.0
        ts, xs = np.meshgrid(np.linspace(0.0, t_max, samples), np.linspace(-1.0, 1.0, samples))
        return float(np.max(np.abs(self.eval_dt(ts, xs) / self.eval(ts, xs))))

    def shifted(self, t1: float) -> "SpeedField1D":
        """The speed seen by a problem restarted at time t1."""
        if self.autonomous:
            return self
        func, dt_func = self.func, self.dt_func
        return replace(
            self,
            func=lambda t, x: func(np.asarray(t) + t1, x),
            dt_func=None if dt_func is None else (lambda t, x: dt_func(np.asarray(t) + t1, x)),
            name=f"{self.name}+{t1:g}",
        )

    @classmethod
    def constant(cls, c: float) -> "SpeedField1D":
        """lambda(t, x) = c."""
        if c == 0:
            raise ConfigurationError("constant speed must be nonzero")
        return cls(
            func=lambda t, x: np.full(np.broadcast(t, x).shape, float(c)),
            lambda_m=abs(c),
            lip_bound=abs(c),
            sign=1 if c > 0 else -1,
            autonomous=True,
            name=f"constant({c:g})",
        )

    @classmethod
    def affine(cls, a: float, b: float) -> "SpeedField1D":
        """lambda(t, x) = a + b x, sign-definite on [-1, 1] when |b| < |a|."""
        if abs(b) >= abs(a):
            raise ConfigurationError("affine speed a + b x must not vanish on [-1, 1]")
        return cls(
            func=lambda t, x: a + b * np.asarray(x, dtype=float) + 0.0 * np.asarray(t, dtype=float),
            lambda_m=abs(a) - abs(b),
            lip_bound=abs(a) + 2.0 * abs(b),
            sign=1 if a > 0 else -1,
            autonomous=True,
            name=f"affine({a:g},{b:g})",
        )

    @classmethod
    def pulsating(cls, c: float, amplitude: float, frequency: float = 1.0) -> "SpeedField1D":
        """lambda(t, x) = c (1 + amplitude sin(frequency t)) with |amplitude| < 1."""
        if abs(amplitude) >= 1.0 or c == 0:
            raise ConfigurationError("pulsating speed must stay sign-definite")
        return cls(
            func=lambda t, x: c * (1.0 + amplitude * np.sin(frequency * np.asarray(t, dtype=float)))
            + 0.0 * np.asarray(x, dtype=float),
            dt_func=lambda t, x: c * amplitude * frequency * np.cos(frequency * np.asarray(t, dtype=float))
            + 0.0 * np.asarray(x, dtype=float),
            lambda_m=abs(c) * (1.0 - abs(amplitude)),
            lip_bound=abs(c) * (1.0 + abs(amplitude)) * (1.0 + abs(frequency)),
            sign=1 if c > 0 else -1,
            autonomous=False,
            name=f"pulsating({c:g},{amplitude:g})",
        )


SPEED_PRESETS: dict[str, Callable[..., SpeedField1D]] = {
    "constant": SpeedField1D.constant,
    "affine": SpeedField1D.affine,
    "pulsating": SpeedField1D.pulsating,
}


def speed_from_spec(spec) -> SpeedField1D:
    """Build a speed from a config entry.

    Accepts a number (constant speed), or a mapping ``{"kind": ..., **params}``
    naming one of ``constant``, ``affine``, ``pulsating``.
    """
    if isinstance(spec, SpeedField1D):
        return spec
    if isinstance(spec, (int, float)):
        return SpeedField1D.constant(float(spec))
    if isinstance(spec, dict):
        params = dict(spec)
        kind = params.pop("kind", "constant")
        if kind not in SPEED_PRESETS:
            raise ConfigurationError(
                f"Unknown speed kind '{kind}'. Available: {', '.join(sorted(SPEED_PRESETS))}"
            )
        return SPEED_PRESETS[kind](**params)
    raise ConfigurationError(f"Cannot build a speed field from {spec!r}")
