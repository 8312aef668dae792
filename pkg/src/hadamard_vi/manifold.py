"""Hadamard manifold kernel.

Two concrete manifolds are provided: flat Euclidean space ``R^n`` and the
hyperboloid model of hyperbolic space ``H^n`` (sectional curvature -1),
embedded in Minkowski space ``R^{n,1}`` with signature ``(-, +, ..., +)``.

Every manifold exposes vectorised ``*_arr`` methods that act on raw ambient
coordinate arrays with arbitrary leading batch axes.  The typed, checked
API (:class:`Point`, :class:`Tangent`, :func:`exp`, :func:`log`, ...) is a
thin layer over those methods.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BasePointMismatch,
    InvalidPoint,
    InvalidTangent,
    ManifoldMismatch,
    TOutOfRange,
)

# Tolerances.  Module constants so callers can tune them globally.
POINT_TOL = 1e-9       # embedding constraint <x,x> = -1 (hyperboloid)
TANGENT_TOL = 1e-9     # tangency <p,u> = 0 (hyperboloid)
BASE_TOL = 1e-12       # base-point identity for tangent arithmetic
TAYLOR_THRESHOLD = 1e-12


def minkowski(u, v):
    """Minkowski bilinear form ``-u0 v0 + sum_i ui vi`` over the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


class Manifold:
    """Common interface of the implemented Hadamard manifolds."""

    kind: str
    dim: int

    @property
    def ambient_dim(self) -> int:
        raise NotImplementedError

    # -- array level -------------------------------------------------------
    def inner_arr(self, u, v):
        raise NotImplementedError

    def norm_arr(self, u):
        return np.sqrt(np.maximum(self.inner_arr(u, u), 0.0))

    def exp_arr(self, p, v):
        raise NotImplementedError

    def log_arr(self, p, q):
        raise NotImplementedError

    def dist_arr(self, p, q):
        raise NotImplementedError

    def transport_arr(self, p, q, u):
        raise NotImplementedError

    def to_tangent_arr(self, p, w):
        """Orthogonal projection of ambient vectors onto ``T_p``."""
        raise NotImplementedError

    def origin_arr(self) -> np.ndarray:
        raise NotImplementedError

    def tangent_basis_arr(self, p) -> np.ndarray:
        """Orthonormal basis of ``T_p`` as a ``(dim, ambient_dim)`` array."""
        raise NotImplementedError

    def embed_coefficients(self, p, coeffs):
        """Map coefficients in an orthonormal frame at ``p`` to ambient tangents."""
        basis = self.tangent_basis_arr(p)
        return np.asarray(coeffs, dtype=float) @ basis

    def coefficients(self, p, v):
        """Coordinates of ambient tangents ``v`` in the orthonormal frame at ``p``."""
        basis = self.tangent_basis_arr(p)
        return self.inner_arr(np.asarray(v, dtype=float)[..., None, :], basis)

    def point_violation(self, x) -> float:
        return 0.0

    def tangent_violation(self, p, u) -> float:
        return 0.0

    # -- typed helpers -----------------------------------------------------
    def point(self, coords) -> "Point":
        return Point(self, coords)

    def origin(self) -> "Point":
        return Point._wrap(self, self.origin_arr())

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


@dataclass(frozen=True)
class Euclidean(Manifold):
    """Flat space ``R^dim``; every operation is affine."""

    dim: int

    kind = "euclidean"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def inner_arr(self, u, v):
        return np.sum(np.asarray(u, dtype=float) * np.asarray(v, dtype=float), axis=-1)

    def exp_arr(self, p, v):
        return np.asarray(p, dtype=float) + np.asarray(v, dtype=float)

    def log_arr(self, p, q):
        return np.asarray(q, dtype=float) - np.asarray(p, dtype=float)

    def dist_arr(self, p, q):
        return np.linalg.norm(np.asarray(q, dtype=float) - np.asarray(p, dtype=float), axis=-1)

    def transport_arr(self, p, q, u):
        p, q, u = np.broadcast_arrays(np.asarray(p, float), np.asarray(q, float), np.asarray(u, float))
        return u.copy()

    def to_tangent_arr(self, p, w):
        return np.array(w, dtype=float)

    def origin_arr(self):
        return np.zeros(self.dim)

    def tangent_basis_arr(self, p):
        return np.eye(self.dim)


@dataclass(frozen=True)
class Hyperboloid(Manifold):
    """Upper sheet ``{x : <x,x> = -1, x0 > 0}`` of the Minkowski hyperboloid."""

    dim: int

    kind = "hyperboloid"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    def inner_arr(self, u, v):
        return minkowski(u, v)

    def normalize_arr(self, x):
        """Rescale ambient vectors back onto the upper sheet."""
        x = np.asarray(x, dtype=float)
        scale = np.sqrt(np.maximum(-minkowski(x, x), np.finfo(float).tiny))
        x = x / scale[..., None]
        return np.where(x[..., :1] < 0.0, -x, x)

    def to_tangent_arr(self, p, w):
        p = np.asarray(p, dtype=float)
        w = np.asarray(w, dtype=float)
        return w + minkowski(p, w)[..., None] * p

    def _chord2(self, p, q):
        # <q-p, q-p> = 2(cosh d - 1) >= 0; the difference is formed first so
        # nearby points keep their relative precision.
        diff = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
        return diff, np.maximum(minkowski(diff, diff), 0.0)

    def dist_arr(self, p, q):
        _, c2 = self._chord2(p, q)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(c2))

    def exp_arr(self, p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        n2 = np.maximum(minkowski(v, v), 0.0)
        n = np.sqrt(n2)
        small = n < TAYLOR_THRESHOLD
        safe = np.where(small, 1.0, n)
        ch = np.where(small, 1.0 + 0.5 * n2, np.cosh(n))
        sh_over_n = np.where(small, 1.0 + n2 / 6.0, np.sinh(n) / safe)
        out = self.normalize_arr(ch[..., None] * p + sh_over_n[..., None] * v)
        return np.where((n2 == 0.0)[..., None], p, out)

    def log_arr(self, p, q):
        p = np.asarray(p, dtype=float)
        diff, c2 = self._chord2(p, q)
        c = np.sqrt(c2)
        d = 2.0 * np.arcsinh(0.5 * c)
        # q - cosh(d) p, written so that no large terms cancel
        w = diff - (0.5 * c2)[..., None] * p
        w = w + minkowski(p, w)[..., None] * p
        sinh_d = c * np.sqrt(1.0 + 0.25 * c2)
        small = d < TAYLOR_THRESHOLD
        factor = np.where(small, 1.0 - d * d / 6.0, d / np.where(small, 1.0, sinh_d))
        return factor[..., None] * w

    def transport_arr(self, p, q, u):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        u = np.asarray(u, dtype=float)
        _, c2 = self._chord2(p, q)
        cosh_d = 1.0 + 0.5 * c2
        out = u + (minkowski(q, u) / (1.0 + cosh_d))[..., None] * (p + q)
        return self.to_tangent_arr(q, out)

    def origin_arr(self):
        o = np.zeros(self.dim + 1)
        o[0] = 1.0
        return o

    def tangent_basis_arr(self, p):
        o = self.origin_arr()
        e = np.eye(self.dim + 1)[1:]
        return self.transport_arr(o, np.asarray(p, dtype=float), e)

    def point_violation(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(abs(minkowski(x, x) + 1.0) / max(1.0, float(x[0]) ** 2))

    def tangent_violation(self, p, u) -> float:
        p = np.asarray(p, dtype=float)
        u = np.asarray(u, dtype=float)
        scale = max(1.0, float(np.linalg.norm(p) * np.linalg.norm(u)))
        return float(abs(minkowski(p, u)) / scale)


def manifold_from_json(obj: dict) -> Manifold:
    try:
        kind = obj["kind"]
        dim = int(obj["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed manifold descriptor {obj!r}") from exc
    if kind == "euclidean":
        return Euclidean(dim)
    if kind == "hyperboloid":
        return Hyperboloid(dim)
    raise ValueError(f"unknown manifold kind {kind!r}")


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Point:
    """A point of ``manifold`` given by its ambient coordinates."""

    manifold: Manifold
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1)
        m = self.manifold
        if coords.shape != (m.ambient_dim,):
            raise InvalidPoint(
                f"{m.kind} point needs {m.ambient_dim} coordinates, got {coords.shape[0]}"
            )
        if not np.all(np.isfinite(coords)):
            raise InvalidPoint("point coordinates must be finite")
        if m.point_violation(coords) > POINT_TOL or (m.kind == "hyperboloid" and coords[0] <= 0):
            raise InvalidPoint(f"coordinates {coords.tolist()} are not on the {m.kind}")
        object.__setattr__(self, "coords", _readonly(coords))

    @classmethod
    def _wrap(cls, manifold: Manifold, coords) -> "Point":
        obj = object.__new__(cls)
        object.__setattr__(obj, "manifold", manifold)
        object.__setattr__(obj, "coords", _readonly(np.array(coords, dtype=float)))
        return obj

    def to_json(self) -> list:
        return [float(c) for c in self.coords]

    def __repr__(self):
        return f"Point({self.manifold.kind}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class Tangent:
    """A tangent vector at ``base`` in ambient coordinates."""

    base: Point
    components: np.ndarray

    def __post_init__(self):
        comps = np.array(self.components, dtype=float).reshape(-1)
        m = self.base.manifold
        if comps.shape != (m.ambient_dim,):
            raise InvalidTangent(
                f"tangent needs {m.ambient_dim} components, got {comps.shape[0]}"
            )
        if m.tangent_violation(self.base.coords, comps) > TANGENT_TOL:
            raise InvalidTangent("components are not tangent at the base point")
        object.__setattr__(self, "components", _readonly(comps))

    @classmethod
    def _wrap(cls, base: Point, comps) -> "Tangent":
        obj = object.__new__(cls)
        object.__setattr__(obj, "base", base)
        object.__setattr__(obj, "components", _readonly(np.array(comps, dtype=float)))
        return obj

    @property
    def manifold(self) -> Manifold:
        return self.base.manifold

    def norm(self) -> float:
        return float(self.manifold.norm_arr(self.components))

    def __add__(self, other: "Tangent") -> "Tangent":
        check_same_base(self.base, other.base)
        return Tangent._wrap(self.base, self.components + other.components)

    def __sub__(self, other: "Tangent") -> "Tangent":
        check_same_base(self.base, other.base)
        return Tangent._wrap(self.base, self.components - other.components)

    def __mul__(self, scalar: float) -> "Tangent":
        return Tangent._wrap(self.base, float(scalar) * self.components)

    __rmul__ = __mul__

    def __neg__(self) -> "Tangent":
        return Tangent._wrap(self.base, -self.components)

    def to_json(self) -> list:
        return [float(c) for c in self.components]

    def __repr__(self):
        return f"Tangent(at {np.array2string(self.base.coords, precision=4)}: " \
               f"{np.array2string(self.components, precision=6)})"


def check_same_manifold(a: Manifold, b: Manifold) -> None:
    if a != b:
        raise ManifoldMismatch(f"{a} vs {b}")


def same_point(p: Point, q: Point, tol: float = BASE_TOL) -> bool:
    if p is q or p.coords is q.coords:
        return True
    if p.manifold != q.manifold:
        return False
    scale = max(1.0, float(np.max(np.abs(p.coords))))
    return float(np.max(np.abs(p.coords - q.coords))) <= tol * scale


def check_same_base(p: Point, q: Point) -> None:
    check_same_manifold(p.manifold, q.manifold)
    if not same_point(p, q):
        raise BasePointMismatch("tangent vectors are attached to different points")


def tangent(p: Point, components) -> Tangent:
    return Tangent(p, components)


def zero(p: Point) -> Tangent:
    return Tangent._wrap(p, np.zeros(p.manifold.ambient_dim))


def inner(u: Tangent, v: Tangent) -> float:
    check_same_base(u.base, v.base)
    return float(u.manifold.inner_arr(u.components, v.components))


def norm(u: Tangent) -> float:
    return u.norm()


def exp(p: Point, v: Tangent) -> Point:
    """Exponential map: endpoint of the geodesic leaving ``p`` with velocity ``v``."""
    check_same_base(p, v.base)
    return Point._wrap(p.manifold, p.manifold.exp_arr(p.coords, v.components))


def log(p: Point, q: Point) -> Tangent:
    """Inverse exponential map, the initial velocity of the geodesic from p to q."""
    check_same_manifold(p.manifold, q.manifold)
    if p is q:
        return zero(p)
    return Tangent._wrap(p, p.manifold.log_arr(p.coords, q.coords))


def dist(p: Point, q: Point) -> float:
    check_same_manifold(p.manifold, q.manifold)
    return float(p.manifold.dist_arr(p.coords, q.coords))


def transport(p: Point, q: Point, u: Tangent) -> Tangent:
    """Parallel transport of ``u`` from ``p`` to ``q`` along the connecting geodesic."""
    check_same_base(p, u.base)
    check_same_manifold(p.manifold, q.manifold)
    return Tangent._wrap(q, p.manifold.transport_arr(p.coords, q.coords, u.components))


def geodesic_point(p: Point, q: Point, t: float) -> Point:
    """Point at fraction ``t`` of the way along the geodesic from ``p`` to ``q``."""
    check_same_manifold(p.manifold, q.manifold)
    if not 0.0 <= t <= 1.0:
        raise TOutOfRange(f"t = {t} outside [0, 1]")
    if t == 0.0:
        return p
    if t == 1.0:
        return q
    m = p.manifold
    return Point._wrap(m, m.exp_arr(p.coords, t * m.log_arr(p.coords, q.coords)))


def tangent_basis(p: Point) -> list[Tangent]:
    return [Tangent._wrap(p, b) for b in p.manifold.tangent_basis_arr(p.coords)]


def point_from_json(manifold: Manifold, coords: Sequence[float]) -> Point:
    return Point(manifold, coords)
