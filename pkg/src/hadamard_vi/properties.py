"""Randomised property suites shared by the command-line harness and the tests."""

from __future__ import annotations

import numpy as np

from .fields import SampleSpec, SubdifferentialField, WeightedDistances, membership_check
from .manifold import Euclidean, Manifold, Point, Tangent


def random_points(m: Manifold, n: int, rng: np.random.Generator, radius: float = 3.0) -> np.ndarray:
    o = m.origin_arr()
    c = rng.normal(size=(n, m.dim))
    c *= radius * rng.uniform(size=(n, 1)) / np.linalg.norm(c, axis=1, keepdims=True)
    return m.exp_arr(o, m.embed_coefficients(o, c))


def random_tangents(m: Manifold, x: np.ndarray, rng: np.random.Generator,
                    scale: float = 2.0) -> np.ndarray:
    w = rng.normal(size=x.shape) * scale
    return m.to_tangent_arr(x, w)


def geometry_suite(m: Manifold, n: int = 10_000, seed: int = 0) -> dict:
    """Worst violations of the comparison inequalities, transport isometry and exp/log round trip."""
    rng = np.random.default_rng(seed)
    p1, p2, p3 = (random_points(m, n, rng) for _ in range(3))
    d = m.dist_arr
    l31, l32 = m.log_arr(p3, p1), m.log_arr(p3, p2)
    l21, l23 = m.log_arr(p2, p1), m.log_arr(p2, p3)
    coslaw = d(p1, p3) ** 2 + d(p3, p2) ** 2 - 2 * m.inner_arr(l31, l32) - d(p1, p2) ** 2
    coslaw2 = d(p2, p3) ** 2 - m.inner_arr(l21, l23) - m.inner_arr(l31, l32)
    u = random_tangents(m, p1, rng)
    tu = m.transport_arr(p1, p2, u)
    iso = np.abs(m.norm_arr(tu) - m.norm_arr(u))
    back = m.dist_arr(m.exp_arr(p1, m.log_arr(p1, p2)), p2)
    return {
        "coslaw_violation": float(np.max(coslaw)),
        "coslaw2_violation": float(np.max(coslaw2)),
        "transport_isometry_error": float(np.max(iso)),
        "exp_log_roundtrip_error": float(np.max(back)),
    }


def abs_value_field() -> SubdifferentialField:
    """``partial |x|`` on the real line."""
    return SubdifferentialField(WeightedDistances(Euclidean(1), [[0.0]]))


def abs_eps_subdifferential_grid(p: float, eps: float, step: float = 1e-3,
                                 q_range: float = 10.0) -> tuple[float, float]:
    """Interval of ``u`` on a ``step`` grid with ``|q| >= |p| + u (q - p) - eps`` on a grid of ``q``.

    The ``q`` grid covers ``[-q_range, q_range]`` finely plus log-spaced far
    points, since the upper endpoint is only pinned down as ``q -> inf``.
    """
    us = np.arange(-2.0, 2.0 + step / 2, step)
    far = np.geomspace(q_range, 1e6, 200)
    qs = np.concatenate([-far, np.linspace(-q_range, q_range, 20_001), far])
    ok = np.all(np.abs(qs)[None, :] >= abs(p) + us[:, None] * (qs[None, :] - p) - eps - 1e-12,
                axis=1)
    good = us[ok]
    return float(good.min()), float(good.max())


def enlargement_suite(eps_values=(0.05, 0.1, 0.25, 0.5, 0.8)) -> dict:
    """Zero-eps exactness and nesting on the ``|x|`` family at ``p = 1``."""
    X = abs_value_field()
    m = X.manifold
    p = Point(m, [1.0])
    exact = np.array_equal(np.vstack([t.components for t in X.enlargement(p, 0.0)]),
                           np.vstack([t.components for t in X.eval(p)]))
    worst_nesting = np.inf
    worst_interval = 0.0
    for i, e2 in enumerate(eps_values):
        gens = X.enlargement(p, e2)
        lo = min(float(g.components[0]) for g in gens)
        hi = max(float(g.components[0]) for g in gens)
        glo, ghi = abs_eps_subdifferential_grid(1.0, e2)
        worst_interval = max(worst_interval, abs(lo - glo), abs(hi - ghi))
        for e1 in eps_values[i:]:
            for g in gens:
                rep = membership_check(X, p, Tangent(p, g.components), e1, SampleSpec(n=256))
                worst_nesting = min(worst_nesting, rep.worst_margin)
    return {"zero_eps_exact": bool(exact), "nesting_worst_margin": float(worst_nesting),
            "interval_error": float(worst_interval)}
