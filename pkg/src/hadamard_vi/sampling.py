"""Deterministic low-discrepancy samples of balls and spheres."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats import qmc


def halton(n: int, d: int, seed: int) -> np.ndarray:
    """First ``n`` points of a scrambled Halton sequence in ``(0,1)^d``.

    Prefixes are stable: ``halton(n, d, s)`` equals ``halton(m, d, s)[:n]``
    for ``m >= n``, which keeps sample-based estimators monotone under
    refinement.
    """
    if n <= 0:
        return np.zeros((0, d))
    pts = qmc.Halton(d=d, scramble=True, seed=seed).random(n)
    return np.clip(pts, 1e-12, 1 - 1e-12)


def sphere_directions(dim: int, k: int = 32) -> np.ndarray:
    """Deterministic unit vectors in ``R^dim``.

    dim 1 gives ``{-1, +1}``, dim 2 gives ``k`` equally spaced angles,
    dim 3 a Fibonacci lattice of ``k`` points.  Higher dimensions use the
    ``2 dim`` signed axes followed by normalised Halton directions.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(k) / k
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        i = np.arange(k) + 0.5
        z = 1.0 - 2.0 * i / k
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = np.pi * (1.0 + math.sqrt(5.0)) * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    extra = max(0, k - 2 * dim)
    if extra == 0:
        return axes
    g = _normal.ppf(halton(extra, dim, seed=12345))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack([axes, g])


def _directions(u: np.ndarray, dim: int) -> np.ndarray:
    """Unit vectors from uniform coordinates: one column for ``dim <= 2``, else ``dim``."""
    if dim == 1:
        return np.where(u[:, :1] < 0.5, -1.0, 1.0)
    if dim == 2:
        ang = 2.0 * np.pi * u[:, 0]
        return np.column_stack([np.cos(ang), np.sin(ang)])
    g = _normal.ppf(u[:, :dim])
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball_coefficients(n: int, dim: int, radius: float, seed: int,
                      boundary_fraction: float = 0.5) -> np.ndarray:
    """``n`` points of the closed ball of given radius in ``R^dim``.

    Every ``1/boundary_fraction``-th point (starting at index 0) is placed
    on the boundary sphere; the rest fill the ball with uniform density.
    Boundary and interior points come from separate Halton streams, since
    the base-2 coordinate of a single stream is correlated with index parity.
    """
    if n <= 0:
        return np.zeros((0, dim))
    k = 1 if dim <= 2 else dim
    on = np.zeros(n, dtype=bool)
    if boundary_fraction > 0:
        period = max(1, int(round(1.0 / boundary_fraction)))
        on = (np.arange(n) % period) == 0
    out = np.empty((n, dim))
    out[on] = radius * _directions(halton(int(on.sum()), k, seed), dim)
    ui = halton(int((~on).sum()), k + 1, seed + 7919)
    out[~on] = _directions(ui, dim) * (radius * ui[:, k] ** (1.0 / dim))[:, None]
    return out
