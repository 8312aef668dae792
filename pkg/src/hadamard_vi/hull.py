"""Minimum-norm points of finite convex hulls (Wolfe's algorithm).

Vectors are plain Euclidean coordinate rows; callers working on a curved
tangent space express generators in an orthonormal frame first.
"""

from __future__ import annotations

import numpy as np


def min_norm_point(points, tol: float = 1e-14, max_iter: int = 1000):
    """Minimum-norm point of ``conv(points)``.

    Parameters
    ----------
    points : array_like, shape (m, n)
        Hull generators.
    tol : float
        Relative optimality tolerance of the Wolfe gap ``|x|^2 - min_j <x, p_j>``.

    Returns
    -------
    x : ndarray, shape (n,)
        The minimum-norm point.
    weights : ndarray, shape (m,)
        Convex weights with ``weights @ points == x``.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    m = P.shape[0]
    if m == 0:
        raise ValueError("empty generator set")
    scale = max(float(np.max(np.sum(P * P, axis=1))), np.finfo(float).tiny)
    j0 = int(np.argmin(np.sum(P * P, axis=1)))
    active = [j0]
    lam = np.array([1.0])
    x = P[j0].copy()

    for _ in range(max_iter):
        g = P @ x
        k = int(np.argmin(g))
        if float(x @ x) - float(g[k]) <= tol * scale or k in active:
            break
        active.append(k)
        lam = np.append(lam, 0.0)
        while True:
            S = P[active]
            ns = len(active)
            kkt = np.zeros((ns + 1, ns + 1))
            kkt[:ns, :ns] = S @ S.T
            kkt[:ns, ns] = 1.0
            kkt[ns, :ns] = 1.0
            rhs = np.zeros(ns + 1)
            rhs[ns] = 1.0
            mu = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:ns]
            if np.all(mu > 1e-15):
                lam = mu
                break
            # move from lam toward mu until a weight hits zero
            leaving = mu <= 1e-15
            denom = lam[leaving] - mu[leaving]
            ratios = np.where(denom > 0, lam[leaving] / np.where(denom > 0, denom, 1.0), 0.0)
            theta = float(np.min(ratios)) if ratios.size else 1.0
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-15
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            active = [a for a, kp in zip(active, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[active]

    weights = np.zeros(m)
    weights[active] = lam
    return x, weights


def project_onto_hull(y, points, tol: float = 1e-14):
    """Euclidean projection of ``y`` onto ``conv(points)``."""
    y = np.asarray(y, dtype=float)
    P = np.atleast_2d(np.asarray(points, dtype=float))
    x, w = min_norm_point(P - y, tol=tol)
    return x + y, w


def hull_distance(y, points) -> float:
    """Distance from ``y`` to ``conv(points)``."""
    proj, _ = project_onto_hull(y, points)
    return float(np.linalg.norm(proj - np.asarray(y, dtype=float)))
