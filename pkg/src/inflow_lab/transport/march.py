"""Step-by-step evaluation of the mild formula on a space-time slab.

Each step restarts the mild formula from the previous time level. Departure
points come from fixed-step RK4 on the speed, which is interpolated linearly in
time and by cubic splines in space; the previous level is interpolated by a
cubic spline at the departure points. Characteristics that reach the inflow
point inside a step take the boundary datum at the crossing time, located by
linear interpolation within the substep. The forcing is integrated along the
path by the trapezoidal rule.
"""

import logging
import math
from typing import Callable, Union

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import PreconditionError
from .speed import SpeedField1D

logger = logging.getLogger(__name__)

SpeedInput = Union[np.ndarray, SpeedField1D]
BoundaryInput = Union[np.ndarray, Callable[[np.ndarray], np.ndarray], None]
ForcingInput = Union[np.ndarray, Callable[[np.ndarray, np.ndarray], np.ndarray], None]


class _SlabSampler:
    """Evaluates a (K, N) slab at (tau, X) for tau inside step k."""

    def __init__(self, times: np.ndarray, x: np.ndarray, slab: np.ndarray):
        self.times = times
        self.x = x
        self.slab = slab
        self._cache: dict[int, CubicSpline] = {}

    def _spline(self, k: int) -> CubicSpline:
        spline = self._cache.get(k)
        if spline is None:
            if len(self._cache) > 4:
                self._cache.pop(min(self._cache))
            spline = CubicSpline(self.x, self.slab[k])
            self._cache[k] = spline
        return spline

    def __call__(self, k: int, tau, X) -> np.ndarray:
        t0, t1 = self.times[k], self.times[k + 1]
        theta = np.clip((np.asarray(tau) - t0) / (t1 - t0), 0.0, 1.0)
        Xc = np.clip(X, -1.0, 1.0)
        return (1.0 - theta) * self._spline(k)(Xc) + theta * self._spline(k + 1)(Xc)


def _speed_sampler(times, x, speed: SpeedInput):
    if isinstance(speed, SpeedField1D):
        return (lambda k, tau, X: speed.eval(tau, X)), speed.sign, speed.lambda_m
    slab = np.asarray(speed, dtype=float)
    if slab.shape != (times.size, x.size):
        raise PreconditionError(f"speed slab shape {slab.shape} does not match ({times.size}, {x.size})")
    signs = np.sign(slab)
    sign = int(signs.flat[0])
    if sign == 0 or np.any(signs != sign):
        raise PreconditionError("speed slab must be sign-definite")
    sampler = _SlabSampler(times, x, slab)
    return sampler, sign, float(np.min(np.abs(slab)))


def _forcing_sampler(times, x, h: ForcingInput):
    if h is None:
        return None
    if callable(h):
        return lambda k, tau, X: np.asarray(h(np.broadcast_to(tau, np.shape(X)), X), dtype=float) * np.ones_like(X)
    slab = np.asarray(h, dtype=float)
    if slab.shape != (times.size, x.size):
        raise PreconditionError(f"forcing slab shape {slab.shape} does not match ({times.size}, {x.size})")
    return _SlabSampler(times, x, slab)


def _boundary_sampler(times, b: BoundaryInput):
    if b is None:
        return lambda s: np.zeros_like(np.asarray(s, dtype=float))
    if callable(b):
        return lambda s: np.asarray(b(np.asarray(s, dtype=float)), dtype=float) * np.ones_like(s)
    values = np.asarray(b, dtype=float)
    return lambda s: np.interp(s, times, values)


def march_mild(
    times,
    x,
    speed: SpeedInput,
    f0,
    b: BoundaryInput = None,
    h: ForcingInput = None,
) -> np.ndarray:
    """March the mild formula across a time slab.

    Args:
        times: Increasing sample times, shape (K,).
        x: Uniform nodes on [-1, 1], shape (N,).
        speed: Speed samples of shape (K, N) or a SpeedField1D.
        f0: Initial values at the nodes, shape (N,).
        b: Inflow datum: samples of shape (K,), a callable of t, or None for zero.
        h: Forcing: samples of shape (K, N), a callable of (t, x), or None.

    Returns:
        Array of shape (K, N) with the solution at every sample time.

    Raises:
        PreconditionError: Shapes mismatch or the speed changes sign.
    """
    times = np.asarray(times, dtype=float)
    x = np.asarray(x, dtype=float)
    lam_at, sign, _ = _speed_sampler(times, x, speed)
    h_at = _forcing_sampler(times, x, h)
    b_at = _boundary_sampler(times, b)
    x_in = -float(sign)
    dx = float(x[1] - x[0])

    K, N = times.size, x.size
    f = np.empty((K, N))
    f[0] = np.asarray(f0, dtype=float)
    lam_max = None

    for k in range(K - 1):
        t_next = times[k + 1]
        dt = t_next - times[k]
        lam_here = np.abs(lam_at(k, t_next, x))
        lam_max = float(np.max(lam_here))
        nsub = max(1, math.ceil(lam_max * dt / dx - 1e-9))
        dtau = dt / nsub

        X = x.copy()
        tau = t_next
        active = np.ones(N, dtype=bool)
        value = np.zeros(N)
        integral = np.zeros(N)
        h_prev = h_at(k, tau, X) if h_at is not None else None

        for _ in range(nsub):
            k1 = lam_at(k, tau, X)
            k2 = lam_at(k, tau - 0.5 * dtau, X - 0.5 * dtau * k1)
            k3 = lam_at(k, tau - 0.5 * dtau, X - 0.5 * dtau * k2)
            k4 = lam_at(k, tau - dtau, X - dtau * k3)
            X_new = X - dtau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

            d_old = sign * (X - x_in)
            d_new = sign * (X_new - x_in)
            crossing = active & (d_new < 0.0)
            if np.any(crossing):
                theta = d_old[crossing] / (d_old[crossing] - d_new[crossing])
                s = tau - theta * dtau
                entry = b_at(s)
                if h_at is not None:
                    h_cross = h_at(k, s, np.full(s.shape, x_in))
                    integral[crossing] += 0.5 * theta * dtau * (h_prev[crossing] + h_cross)
                value[crossing] = entry + integral[crossing]
                active &= ~crossing

            if h_at is not None:
                h_new = h_at(k, tau - dtau, X_new)
                integral[active] += 0.5 * dtau * (h_prev[active] + h_new[active])
                h_prev = h_new
            X = np.where(active, X_new, X)
            tau -= dtau
            if not np.any(active):
                break

        if np.any(active):
            previous = CubicSpline(x, f[k])
            value[active] = previous(np.clip(X[active], -1.0, 1.0)) + integral[active]
        f[k + 1] = value

    logger.debug("marched %d steps on %d nodes (last max|lambda|=%s)", K - 1, N, lam_max)
    return f
