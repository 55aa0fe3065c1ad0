"""Tensor-product smoothing of space-time slabs with a compactly supported bump."""

import math

import numpy as np
from scipy.ndimage import convolve1d


def bump_kernel(radius: float, spacing: float) -> np.ndarray:
    """Normalized samples of exp(-1 / (1 - s^2)) on a grid of the given spacing.

    Args:
        radius: Support radius of the bump.
        spacing: Grid spacing.

    Returns:
        Symmetric, non-negative weights of unit sum. A single unit weight
        when the radius does not reach the neighbouring node.
    """
    half = int(math.floor(radius / spacing + 1e-12))
    if half < 1:
        return np.ones(1)
    s = np.arange(-half, half + 1) * spacing / radius
    weights = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    weights[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    if weights.sum() <= 0.0:
        return np.ones(1)
    return weights / weights.sum()


def mollify(field: np.ndarray, level: int, dt: float, dx: float) -> np.ndarray:
    """Smooth a slab of shape (K, N, ...) with a bump of radius 1/level in t and x.

    Values beyond t = 0, the final time and x = +-1 are extended by the
    nearest sample, so constants are reproduced exactly and the output sup
    and Lipschitz constants never exceed those of the input.

    Args:
        field: Samples with time along axis 0 and space along axis 1.
        level: Iteration level l >= 1.
        dt: Time spacing.
        dx: Space spacing.

    Returns:
        Smoothed array of the same shape.
    """
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    radius = 1.0 / level
    out = np.asarray(field, dtype=float)
    kernel_t = bump_kernel(radius, dt)
    if kernel_t.size > 1:
        out = convolve1d(out, kernel_t, axis=0, mode="nearest")
    kernel_x = bump_kernel(radius, dx)
    if kernel_x.size > 1:
        out = convolve1d(out, kernel_x, axis=1, mode="nearest")
    return out
