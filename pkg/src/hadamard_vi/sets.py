"""Closed geodesically convex sets with membership and metric projection.

Projections onto balls and half-spaces are closed form.  On the hyperboloid
a log half-space ``{x : <v, log_y x> <= 0}`` coincides with the Minkowski
half-space ``{x : <<v, x>> <= 0}`` (``<v, log_y x> = d/sinh(d) <<v, x>>``
because ``v`` is tangent at ``y``), whose boundary is a totally geodesic
hypersurface; that identity is what makes the projection explicit.
Intersections are handled by cyclic projections.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InfeasibleSet,
    InvalidSet,
    NoConvergence,
    PointNotInSet,
    ZeroVector,
)
from .manifold import (
    Euclidean,
    Hyperboloid,
    Manifold,
    Point,
    Tangent,
    check_same_base,
    check_same_manifold,
    minkowski,
)
from .sampling import ball_coefficients

MEMBERSHIP_TOL = 1e-9
MAX_SWEEPS = 10_000
SWEEP_TOL = 1e-10
ACTIVE_TOL = 1e-7
DEFAULT_SAMPLE_RADIUS = 5.0
NORMAL_CONE_SAMPLES = 1024


@dataclass(frozen=True)
class ProjectionResult:
    """Outcome of a metric projection.

    ``residual`` is an a-priori bound on how far the result may be from
    the exact projection: 0 for closed-form projections, and the last
    sweep displacement plus the worst member violation for cyclic
    projections.  The sampled variational-inequality residual is computed
    separately by :func:`vi_residual`.
    """

    point: Point
    distance: float
    converged: bool = True
    residual: float = 0.0
    sweeps: int = 0


class ConvexSet:
    manifold: Manifold

    # -- to be provided by variants ---------------------------------------
    def _violation_arr(self, x) -> np.ndarray:
        """Signed constraint value; ``<= 0`` inside the set."""
        raise NotImplementedError

    def _project_arr(self, x) -> np.ndarray:
        raise NotImplementedError

    def reference_arr(self) -> np.ndarray:
        """Coordinates of a point of the set used to centre samples."""
        raise NotImplementedError

    def _normals_arr(self, x) -> list:
        """Unit outward normals at ``x`` of the constraints active there."""
        return []

    def to_json(self) -> dict:
        raise NotImplementedError

    @property
    def bounded(self) -> bool:
        return False

    # -- public API ----------------------------------------------------------
    def _check(self, p: Point) -> None:
        check_same_manifold(self.manifold, p.manifold)

    def contains(self, p: Point, tol: float = MEMBERSHIP_TOL) -> bool:
        self._check(p)
        return bool(self._violation_arr(p.coords) <= tol)

    def contains_arr(self, x, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return self._violation_arr(np.asarray(x, dtype=float)) <= tol

    def project(self, p: Point) -> ProjectionResult:
        self._check(p)
        if self._violation_arr(p.coords) <= 0.0:
            return ProjectionResult(p, 0.0)
        y = self._project_arr(p.coords)
        q = Point._wrap(self.manifold, y)
        return ProjectionResult(q, float(self.manifold.dist_arr(p.coords, y)))

    def project_arr(self, x) -> np.ndarray:
        return self._project_arr(np.asarray(x, dtype=float))

    def distance_to_set(self, p: Point) -> float:
        return self.project(p).distance

    def sample(self, n: int, seed: int = 0, center: Optional[Point] = None,
               radius: Optional[float] = None) -> np.ndarray:
        """Deterministic boundary-biased sample of ``n`` points of the set.

        Unbounded sets are sampled by projecting a low-discrepancy sample of
        the ball ``B(center, radius)`` onto the set; points that land outside
        are mapped to the boundary, which biases the sample toward it.
        """
        m = self.manifold
        c = self.reference_arr() if center is None else center.coords
        r = DEFAULT_SAMPLE_RADIUS if radius is None else float(radius)
        coeffs = ball_coefficients(n, m.dim, r, seed)
        x = m.exp_arr(c, m.embed_coefficients(c, coeffs))
        return self._project_arr(x) if len(x) else x

    def normal_directions(self, p: Point) -> list[Tangent]:
        self._check(p)
        return [Tangent._wrap(p, n) for n in self._normals_arr(p.coords)]

    def normal_cone_contains(self, p: Point, w: Tangent, tol: float = MEMBERSHIP_TOL,
                             n_samples: int = NORMAL_CONE_SAMPLES, seed: int = 0) -> bool:
        """Whether ``w`` is not refuted as a member of the normal cone at ``p``.

        Checks ``<w, log_p q> <= tol`` over a deterministic boundary-biased
        sample of the set plus probes ``P(exp_p(t w/|w|))`` that catch any
        inward component of ``w``.  ``True`` means "not refuted".
        """
        if not self.contains(p, tol=max(tol, MEMBERSHIP_TOL)):
            raise PointNotInSet("normal cone is only defined at points of the set")
        check_same_base(p, w.base)
        m = self.manifold
        wn = w.norm()
        if wn == 0.0:
            return True
        qs = [self.sample(n_samples, seed=seed, center=p, radius=DEFAULT_SAMPLE_RADIUS)]
        dirs = [w.components / wn] + list(m.tangent_basis_arr(p.coords))
        dirs += [-d for d in dirs[1:]]
        ts = np.array([1e-3, 1e-2, 1e-1, 1.0])
        for d in dirs:
            probes = m.exp_arr(p.coords, ts[:, None] * d)
            qs.append(self._project_arr(probes))
        q = np.vstack(qs)
        vals = m.inner_arr(w.components, m.log_arr(p.coords, q))
        return bool(np.max(vals) <= tol)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


class WholeManifold(ConvexSet):
    def __init__(self, manifold: Manifold):
        self.manifold = manifold

    def _violation_arr(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], -np.inf)

    def _project_arr(self, x):
        return np.array(x, dtype=float)

    def reference_arr(self):
        return self.manifold.origin_arr()

    def to_json(self):
        return {"type": "whole"}


class GeodesicBall(ConvexSet):
    def __init__(self, center: Point, radius: float):
        if not radius > 0:
            raise InvalidSet(f"ball radius must be positive, got {radius}")
        self.manifold = center.manifold
        self.center = center
        self.radius = float(radius)

    @property
    def bounded(self) -> bool:
        return True

    def _violation_arr(self, x):
        return self.manifold.dist_arr(self.center.coords, x) - self.radius

    def _project_arr(self, x):
        m = self.manifold
        x = np.asarray(x, dtype=float)
        c = self.center.coords
        d = m.dist_arr(c, x)
        outside = d > self.radius
        t = np.where(outside, self.radius / np.where(outside, d, 1.0), 1.0)
        y = m.exp_arr(c, t[..., None] * m.log_arr(c, x))
        return np.where(outside[..., None], y, x)

    def reference_arr(self):
        return self.center.coords

    def sample(self, n, seed=0, center=None, radius=None):
        m = self.manifold
        c = self.center.coords
        coeffs = ball_coefficients(n, m.dim, self.radius, seed)
        return m.exp_arr(c, m.embed_coefficients(c, coeffs))

    def _normals_arr(self, x):
        m = self.manifold
        if self._violation_arr(x) < -ACTIVE_TOL:
            return []
        out = -m.log_arr(x, self.center.coords)
        n = float(m.norm_arr(out))
        return [out / n] if n > 0 else []

    def to_json(self):
        return {"type": "ball", "center": self.center.to_json(), "radius": self.radius}


class LogHalfSpace(ConvexSet):
    """``{x : <normal, log_anchor x> <= 0}``.

    Supported on the Euclidean space (an affine half-space) and on the
    hyperboloid (a Minkowski half-space through the anchor).
    """

    def __init__(self, anchor: Point, normal: Tangent):
        check_same_base(anchor, normal.base)
        m = anchor.manifold
        if not isinstance(m, (Euclidean, Hyperboloid)):
            raise InvalidSet(f"log half-spaces are not supported on {m}")
        nn = normal.norm()
        if not nn > 0:
            raise ZeroVector("half-space normal must be nonzero")
        self.manifold = m
        self.anchor = anchor
        self.normal = normal
        self._unit = normal.components / nn

    def _violation_arr(self, x):
        m = self.manifold
        return m.inner_arr(self._unit, m.log_arr(self.anchor.coords, x))

    def minkowski_value_arr(self, x):
        """``<<a, x>>`` with ``a`` the unit normal (hyperboloid only)."""
        return minkowski(self._unit, x)

    def _project_arr(self, x):
        x = np.asarray(x, dtype=float)
        a = self._unit
        if isinstance(self.manifold, Hyperboloid):
            s = np.maximum(minkowski(a, x), 0.0)
            y = (x - s[..., None] * a) / np.sqrt(1.0 + s * s)[..., None]
            return self.manifold.normalize_arr(y)
        s = np.maximum(np.sum((x - self.anchor.coords) * a, axis=-1), 0.0)
        return x - s[..., None] * a

    def reference_arr(self):
        return self.anchor.coords

    def _normals_arr(self, x):
        if self._violation_arr(x) < -ACTIVE_TOL:
            return []
        m = self.manifold
        if isinstance(m, Hyperboloid):
            n = m.to_tangent_arr(x, self._unit)
            return [n / float(m.norm_arr(n))]
        return [self._unit.copy()]

    def to_json(self):
        return {"type": "log_halfspace", "anchor": self.anchor.to_json(),
                "normal": self.normal.to_json()}


class EuclideanHalfSpace(ConvexSet):
    """``{x : <a, x> <= b}`` on a Euclidean manifold."""

    def __init__(self, manifold: Manifold, a: Sequence[float], b: float):
        if not isinstance(manifold, Euclidean):
            raise InvalidSet("EuclideanHalfSpace requires a Euclidean manifold")
        a = np.array(a, dtype=float).reshape(-1)
        if a.shape != (manifold.dim,):
            raise InvalidSet(f"normal has {a.size} entries, manifold dim is {manifold.dim}")
        na = float(np.linalg.norm(a))
        if not na > 0:
            raise ZeroVector("half-space normal must be nonzero")
        self.manifold = manifold
        self.a = a
        self.b = float(b)
        self._na = na

    def _violation_arr(self, x):
        return (np.asarray(x, dtype=float) @ self.a - self.b) / self._na

    def _project_arr(self, x):
        x = np.asarray(x, dtype=float)
        s = np.maximum(x @ self.a - self.b, 0.0) / self._na ** 2
        return x - s[..., None] * self.a

    def reference_arr(self):
        return self._project_arr(self.manifold.origin_arr())

    def _normals_arr(self, x):
        if self._violation_arr(x) < -ACTIVE_TOL:
            return []
        return [self.a / self._na]

    def to_json(self):
        return {"type": "halfspace", "a": self.a.tolist(), "b": self.b}


class Intersection(ConvexSet):
    """Intersection of convex sets, projected onto by cyclic projections."""

    def __init__(self, members: Sequence[ConvexSet], max_sweeps: int = MAX_SWEEPS,
                 sweep_tol: float = SWEEP_TOL):
        members = list(members)
        if not members:
            raise InvalidSet("intersection needs at least one member")
        self.manifold = members[0].manifold
        for s in members[1:]:
            check_same_manifold(self.manifold, s.manifold)
        self.members = members
        self.max_sweeps = int(max_sweeps)
        self.sweep_tol = float(sweep_tol)
        start = members[0].reference_arr()
        y, moved, sweeps = self._cyclic(start[None, :])
        if moved[0] >= self.sweep_tol or self._violation_arr(y[0]) > ACTIVE_TOL:
            raise InfeasibleSet(
                f"cyclic projection stalled after {sweeps} sweeps "
                f"(last move {moved[0]:.3e}); the intersection looks empty"
            )
        self._reference = y[0]

    @property
    def bounded(self) -> bool:
        return any(s.bounded for s in self.members)

    def _violation_arr(self, x):
        return np.max(np.stack([s._violation_arr(x) for s in self.members]), axis=0)

    def _cyclic(self, x):
        m = self.manifold
        y = np.array(x, dtype=float)
        moved = np.full(y.shape[:-1], np.inf)
        for sweep in range(1, self.max_sweeps + 1):
            # largest single-member move, so a zigzag between nearly parallel
            # members does not read as settled
            moved = np.zeros(y.shape[:-1])
            for s in self.members:
                nxt = s._project_arr(y)
                moved = np.maximum(moved, m.dist_arr(y, nxt))
                y = nxt
            if np.all(moved < self.sweep_tol):
                return y, moved, sweep
        return y, moved, self.max_sweeps

    def _project_arr(self, x):
        return self._cyclic(x)[0]

    def project(self, p: Point) -> ProjectionResult:
        self._check(p)
        if self._violation_arr(p.coords) <= 0.0:
            return ProjectionResult(p, 0.0)
        y, moved, sweeps = self._cyclic(p.coords[None, :])
        q = Point._wrap(self.manifold, y[0])
        move = float(moved[0])
        if move >= self.sweep_tol:
            raise NoConvergence(
                f"cyclic projection did not settle within {sweeps} sweeps", best=q)
        residual = move + max(0.0, float(self._violation_arr(y[0])))
        return ProjectionResult(q, float(self.manifold.dist_arr(p.coords, y[0])),
                                True, residual, sweeps)

    def reference_arr(self):
        return self._reference

    def sample(self, n, seed=0, center=None, radius=None):
        for s in self.members:
            if s.bounded:
                return self._project_arr(s.sample(n, seed))
        if radius is None:
            # shrink the sampling ball to the extent of the set seen from the centre,
            # so bounded intersections of unbounded members (boxes) get interior points
            c = self.reference_arr() if center is None else center.coords
            probe = super().sample(256, seed, center, DEFAULT_SAMPLE_RADIUS)
            extent = float(np.max(self.manifold.dist_arr(c, probe)))
            radius = min(DEFAULT_SAMPLE_RADIUS, 1.05 * extent) if extent > 0 else None
        return super().sample(n, seed, center, radius)

    def _normals_arr(self, x):
        out = []
        for s in self.members:
            out.extend(s._normals_arr(x))
        return out

    def to_json(self):
        return {"type": "intersection", "members": [s.to_json() for s in self.members]}


def box(manifold: Manifold, lower: Sequence[float], upper: Sequence[float]) -> Intersection:
    """Axis-aligned box ``lower <= x <= upper`` on a Euclidean manifold."""
    members = []
    for i, (lo, hi) in enumerate(zip(lower, upper)):
        e = np.zeros(manifold.dim)
        e[i] = 1.0
        members.append(EuclideanHalfSpace(manifold, e, hi))
        members.append(EuclideanHalfSpace(manifold, -e, -lo))
    return Intersection(members)


def vi_residual(omega: ConvexSet, p: Point, projected: Point, n_samples: int = 1000,
                seed: int = 0) -> float:
    """Worst value of ``<log_pi q, log_pi p>`` over a sample of ``q`` in the set.

    Nonpositive (up to rounding) exactly when ``projected`` satisfies the
    variational characterisation of the projection of ``p``.
    """
    m = omega.manifold
    q = omega.sample(n_samples, seed=seed, center=projected)
    lp = m.log_arr(projected.coords, p.coords)
    vals = m.inner_arr(m.log_arr(projected.coords, q), lp)
    return float(np.max(vals))


def set_from_json(manifold: Manifold, obj: dict) -> ConvexSet:
    try:
        kind = obj["type"]
    except (KeyError, TypeError) as exc:
        raise InvalidSet(f"malformed set descriptor {obj!r}") from exc
    try:
        if kind == "whole":
            return WholeManifold(manifold)
        if kind == "ball":
            return GeodesicBall(Point(manifold, obj["center"]), float(obj["radius"]))
        if kind == "log_halfspace":
            anchor = Point(manifold, obj["anchor"])
            return LogHalfSpace(anchor, Tangent(anchor, obj["normal"]))
        if kind == "halfspace":
            return EuclideanHalfSpace(manifold, obj["a"], float(obj["b"]))
        if kind == "box":
            return box(manifold, obj["lower"], obj["upper"])
        if kind == "intersection":
            return Intersection([set_from_json(manifold, o) for o in obj["members"]])
    except KeyError as exc:
        raise InvalidSet(f"set descriptor {kind!r} is missing field {exc}") from exc
    raise InvalidSet(f"unknown set type {kind!r}")
