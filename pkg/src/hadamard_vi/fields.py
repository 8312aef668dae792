"""Monotone point-to-set vector fields and their epsilon-enlargements.

A field value ``X(p)`` is represented by a finite list of generators; the
value is their convex hull.  ``enlargement(X, p, eps)`` returns generators
of a convex subset of ``X^eps(p)`` that contains ``X(p)``.  For fields
backed by a convex potential the subset is built from eps-subgradients,
which are always members of the enlargement.

Arrays of generators are kept in ambient coordinates with shape
``(k, ambient_dim)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import nnls

from .errors import (
    InvalidProblem,
    NegativeEpsilon,
    PreconditionViolated,
)
from .manifold import (
    Euclidean,
    Manifold,
    Point,
    Tangent,
    check_same_base,
    check_same_manifold,
)
from .hull import min_norm_point
from .sampling import ball_coefficients, sphere_directions
from .sets import ConvexSet, WholeManifold

ANCHOR_TOL = 1e-12
SPHERE_RESOLUTION = 32
MONOTONE_TOL = 1e-8
MEMBERSHIP_TOL = 1e-9


def _as_rows(vectors) -> np.ndarray:
    return np.atleast_2d(np.asarray(vectors, dtype=float))


def _minkowski_sum(sets: Sequence[np.ndarray]) -> np.ndarray:
    """Generators of the Minkowski sum of hulls given by generator arrays."""
    out = sets[0]
    for s in sets[1:]:
        out = (out[:, None, :] + s[None, :, :]).reshape(-1, out.shape[-1])
    return out


def _dedupe(rows: np.ndarray, decimals: int = 13) -> np.ndarray:
    """Drop repeated rows (relative to the largest entry), keeping first occurrences in order."""
    rows = np.asarray(rows, dtype=float)
    scale = max(float(np.max(np.abs(rows))), 1.0)
    _, idx = np.unique(np.round(rows / scale, decimals), axis=0, return_index=True)
    return rows[np.sort(idx)]


# ---------------------------------------------------------------------------
# potentials


class _AnchoredPotential:
    kind = ""

    def __init__(self, manifold: Manifold, anchors, weights=None):
        anchors = _as_rows(anchors)
        if anchors.shape[1] != manifold.ambient_dim:
            raise InvalidProblem(
                f"anchors have {anchors.shape[1]} coordinates, expected {manifold.ambient_dim}")
        for a in anchors:
            Point(manifold, a)
        if weights is None:
            weights = np.ones(len(anchors))
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if weights.shape != (len(anchors),):
            raise InvalidProblem("one weight per anchor is required")
        if not np.all(weights > 0):
            raise InvalidProblem("weights must be positive")
        self.manifold = manifold
        self.anchors = anchors
        self.weights = weights
        self.anchors.flags.writeable = False
        self.weights.flags.writeable = False

    def _logs(self, x):
        # (..., m, amb) logs toward the anchors and (..., m) distances
        x = np.asarray(x, dtype=float)
        xb = x[..., None, :]
        return self.manifold.log_arr(xb, self.anchors), self.manifold.dist_arr(xb, self.anchors)

    def to_json(self) -> dict:
        return {"anchors": self.anchors.tolist(), "weights": self.weights.tolist()}


class WeightedSquaredDistances(_AnchoredPotential):
    """``f(p) = 1/2 sum_i w_i d(p, a_i)^2``; smooth and ``sum(w)``-strongly convex."""

    kind = "squared_distances"

    @property
    def modulus(self) -> float:
        return float(np.sum(self.weights))

    def value_arr(self, x):
        _, d = self._logs(x)
        return 0.5 * np.sum(self.weights * d * d, axis=-1)

    def gradient_arr(self, x):
        logs, _ = self._logs(x)
        return -np.sum(self.weights[:, None] * logs, axis=-2)

    def subgradients_arr(self, x):
        return self.gradient_arr(x)[None, :]

    def eps_subgradients_arr(self, x, eps: float):
        # strong convexity: g + s with |s| <= sqrt(2 mu eps) is an eps-subgradient
        g = self.gradient_arr(x)
        if eps == 0.0:
            return g[None, :]
        m = self.manifold
        r = np.sqrt(2.0 * self.modulus * eps)
        dirs = m.embed_coefficients(x, sphere_directions(m.dim, SPHERE_RESOLUTION))
        return np.vstack([g[None, :], g + r * dirs])

    def min_norm_subgradient_arr(self, x):
        return self.gradient_arr(x)


class WeightedDistances(_AnchoredPotential):
    """``f(p) = sum_i w_i d(p, a_i)``; nonsmooth at the anchors."""

    kind = "distances"

    def value_arr(self, x):
        _, d = self._logs(x)
        return np.sum(self.weights * d, axis=-1)

    def _term_sets(self, x):
        """Per-term subdifferential generators at ``x``."""
        m = self.manifold
        logs, d = self._logs(x)
        dirs = None
        out = []
        for i, w in enumerate(self.weights):
            if d[i] <= ANCHOR_TOL:
                if dirs is None:
                    dirs = m.embed_coefficients(x, sphere_directions(m.dim, SPHERE_RESOLUTION))
                out.append(w * dirs)
            else:
                out.append((-w / d[i] * logs[i])[None, :])
        return out, logs, d

    def subgradients_arr(self, x):
        terms, _, _ = self._term_sets(x)
        return _minkowski_sum(terms)

    def _cap(self, x, e, c):
        """Generators of ``{t : |t| <= 1, <t, e> >= c}`` for a unit tangent ``e``."""
        m = self.manifold
        if c <= -1.0:
            return m.embed_coefficients(x, sphere_directions(m.dim, SPHERE_RESOLUTION))
        ec = m.coefficients(x, e)
        ec = ec / np.linalg.norm(ec)
        dirs = sphere_directions(m.dim, SPHERE_RESOLUTION)
        inside = dirs[dirs @ ec >= c]
        gens = [ec[None, :], c * ec[None, :]]
        if m.dim >= 2:
            comp = dirs - np.outer(dirs @ ec, ec)
            n = np.linalg.norm(comp, axis=1)
            comp = comp[n > 1e-8] / n[n > 1e-8, None]
            gens.append(c * ec + np.sqrt(1.0 - c * c) * comp)
        if len(inside):
            gens.append(inside)
        return m.embed_coefficients(x, _dedupe(np.vstack(gens)))

    def eps_subgradients_arr(self, x, eps: float):
        """Union over terms of (exact other terms) + (eps-subdifferential of one term).

        For a term ``w d(., a)`` away from ``a`` with unit gradient ``e``,
        every ``w t`` with ``|t| <= 1`` and ``<t, e> >= 1 - eps/(w d)`` is an
        eps-subgradient: ``d(q, a) >= |log_x q - log_x a| >= <t, log_x q> + d <t, e>``
        because the log map at ``x`` does not expand distances.
        """
        terms, logs, d = self._term_sets(x)
        if eps == 0.0:
            return _minkowski_sum(terms)
        pieces = [_minkowski_sum(terms)]
        for j, w in enumerate(self.weights):
            if d[j] <= ANCHOR_TOL:
                continue
            e = -logs[j] / d[j]
            cap = w * self._cap(x, e, 1.0 - eps / (w * d[j]))
            pieces.append(_minkowski_sum(terms[:j] + [cap] + terms[j + 1:]))
        return _dedupe(np.vstack(pieces))

    def min_norm_subgradient_arr(self, x):
        gens = self.subgradients_arr(x)
        if len(gens) == 1:
            return gens[0]
        m = self.manifold
        coeffs = m.coefficients(x, gens)
        u, _ = min_norm_point(coeffs)
        return m.embed_coefficients(x, u)


# ---------------------------------------------------------------------------
# fields


class FieldOracle:
    manifold: Manifold
    potential = None

    # -- to be provided by variants ----------------------------------------
    def eval_arr(self, x) -> np.ndarray:
        raise NotImplementedError

    def enlargement_arr(self, x, eps: float) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def special_points_arr(self) -> np.ndarray:
        """Points worth including in every sample (anchors, kinks)."""
        return np.zeros((0, self.manifold.ambient_dim))

    # -- shared --------------------------------------------------------------
    def eval_many(self, x):
        """Generators at many points: returns ``(V, owner)`` with ``V[k]`` at ``x[owner[k]]``."""
        x = _as_rows(x)
        gens = [self.eval_arr(xi) for xi in x]
        owner = np.repeat(np.arange(len(x)), [len(g) for g in gens])
        if not gens:
            return np.zeros((0, self.manifold.ambient_dim)), owner
        return np.vstack(gens), owner

    def eval(self, p: Point) -> list[Tangent]:
        check_same_manifold(self.manifold, p.manifold)
        return [Tangent._wrap(p, g) for g in self.eval_arr(p.coords)]

    def enlargement(self, p: Point, eps: float) -> list[Tangent]:
        check_same_manifold(self.manifold, p.manifold)
        if eps < 0:
            raise NegativeEpsilon(f"eps must be nonnegative, got {eps}")
        if eps == 0:
            return self.eval(p)
        return [Tangent._wrap(p, g) for g in self.enlargement_arr(p.coords, float(eps))]

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


class GradientField(FieldOracle):
    """``X = grad f`` for a weighted sum of squared distances (the Frechet mean field)."""

    def __init__(self, potential: WeightedSquaredDistances):
        self.potential = potential
        self.manifold = potential.manifold

    def eval_arr(self, x):
        return self.potential.gradient_arr(x)[None, :]

    def eval_many(self, x):
        x = _as_rows(x)
        return self.potential.gradient_arr(x), np.arange(len(x))

    def enlargement_arr(self, x, eps):
        return self.potential.eps_subgradients_arr(x, eps)

    def special_points_arr(self):
        return self.potential.anchors

    def to_json(self):
        return {"type": "frechet_mean", **self.potential.to_json()}


class SubdifferentialField(FieldOracle):
    """``X = partial f`` for a weighted sum of distances (the Frechet median field)."""

    def __init__(self, potential: WeightedDistances):
        self.potential = potential
        self.manifold = potential.manifold

    def eval_arr(self, x):
        return self.potential.subgradients_arr(x)

    def eval_many(self, x):
        pot = self.potential
        x = _as_rows(x)
        logs, d = pot._logs(x)
        at_anchor = np.any(d <= ANCHOR_TOL, axis=1)
        safe = np.where(d <= ANCHOR_TOL, 1.0, d)
        smooth = -np.sum((pot.weights / safe)[..., None] * logs, axis=1)
        if not np.any(at_anchor):
            return smooth, np.arange(len(x))
        gens, owner = [], []
        for i in range(len(x)):
            g = self.eval_arr(x[i]) if at_anchor[i] else smooth[i][None, :]
            gens.append(g)
            owner.extend([i] * len(g))
        return np.vstack(gens), np.array(owner)

    def enlargement_arr(self, x, eps):
        return self.potential.eps_subgradients_arr(x, eps)

    def special_points_arr(self):
        return self.potential.anchors

    def to_json(self):
        return {"type": "frechet_median", **self.potential.to_json()}


class AffineField(FieldOracle):
    """``X(x) = A x + b`` on a Euclidean space; monotone iff ``A + A^T`` is PSD.

    The enlargement of a monotone affine field is the ellipsoid
    ``{Ax + b + s : s^T S^+ s <= 4 eps}`` with ``S = (A + A^T)/2``; the
    generators ``s = 2 sqrt(eps) S^{1/2} t`` for unit ``t`` lie inside it.
    """

    def __init__(self, manifold: Manifold, matrix, offset=None):
        if not isinstance(manifold, Euclidean):
            raise InvalidProblem("affine fields are defined on Euclidean spaces only")
        A = np.array(matrix, dtype=float).reshape(manifold.dim, manifold.dim)
        b = np.zeros(manifold.dim) if offset is None else np.array(offset, dtype=float).reshape(-1)
        if b.shape != (manifold.dim,):
            raise InvalidProblem("offset has the wrong length")
        self.manifold = manifold
        self.matrix = A
        self.offset = b
        sym = 0.5 * (A + A.T)
        lam, vec = np.linalg.eigh(sym)
        self._sqrt_sym = (vec * np.sqrt(np.maximum(lam, 0.0))) @ vec.T
        self.min_sym_eigenvalue = float(lam[0])

    def eval_arr(self, x):
        return (self.matrix @ np.asarray(x, dtype=float) + self.offset)[None, :]

    def eval_many(self, x):
        x = _as_rows(x)
        return x @ self.matrix.T + self.offset, np.arange(len(x))

    def enlargement_arr(self, x, eps):
        g = self.eval_arr(x)
        if eps == 0.0 or not np.any(self._sqrt_sym):
            return g
        t = sphere_directions(self.manifold.dim, SPHERE_RESOLUTION)
        s = 2.0 * np.sqrt(eps) * t @ self._sqrt_sym
        return np.vstack([g, g + s])

    def to_json(self):
        return {"type": "affine", "matrix": self.matrix.tolist(), "offset": self.offset.tolist()}


class Composite(FieldOracle):
    """``sum_k w_k X_k``.

    Enlargement: union over ``k`` of ``sum_{i != k} w_i X_i(p) + w_k X_k^{eps/w_k}(p)``,
    a subset of the enlargement of the sum by the sum and scaling rules.
    """

    def __init__(self, terms: Sequence[tuple[float, FieldOracle]]):
        terms = [(float(w), f) for w, f in terms]
        if not terms:
            raise InvalidProblem("composite field needs at least one term")
        self.manifold = terms[0][1].manifold
        for w, f in terms:
            check_same_manifold(self.manifold, f.manifold)
            if not w > 0:
                raise InvalidProblem("composite weights must be positive")
        self.terms = terms

    def eval_arr(self, x):
        return _minkowski_sum([w * f.eval_arr(x) for w, f in self.terms])

    def enlargement_arr(self, x, eps):
        exact = [w * f.eval_arr(x) for w, f in self.terms]
        pieces = [_minkowski_sum(exact)]
        for k, (w, f) in enumerate(self.terms):
            pieces.append(_minkowski_sum(exact[:k] + [w * f.enlargement_arr(x, eps / w)]
                                         + exact[k + 1:]))
        return np.vstack(pieces)

    def special_points_arr(self):
        pts = [f.special_points_arr() for _, f in self.terms]
        return np.vstack(pts) if pts else super().special_points_arr()

    def to_json(self):
        return {"type": "composite",
                "terms": [{"weight": w, "field": f.to_json()} for w, f in self.terms]}


class NormalConeField(FieldOracle):
    """``X + N_Omega`` with the normal cone represented by sampled rays.

    For each generator ``g`` of ``X(p)`` the generators are ``g`` itself,
    ``g + c_n n`` for every active unit normal ``n`` with ``c_n = max(0, -<g, n>)``,
    and ``g + sum_i lambda_i n_i`` with nonnegative ``lambda`` minimising the
    norm.  The zero ray is always included through ``g``.  Used for
    validation only.
    """

    def __init__(self, base: FieldOracle, omega: ConvexSet):
        check_same_manifold(base.manifold, omega.manifold)
        self.base = base
        self.omega = omega
        self.manifold = base.manifold
        self.potential = base.potential

    def eval_arr(self, x):
        gens = self.base.eval_arr(x)
        normals = self.omega._normals_arr(x)
        if not normals:
            return gens
        m = self.manifold
        N = np.array(normals)
        out = [gens]
        Nc = m.coefficients(x, N)
        for g in gens:
            c = np.maximum(0.0, -m.inner_arr(N, g))
            out.append(g + c[:, None] * N)
            lam, _ = nnls(Nc.T, -m.coefficients(x, g))
            out.append((g + lam @ N)[None, :])
        return np.vstack(out)

    def enlargement_arr(self, x, eps):
        raise NotImplementedError("the normal-cone field is for validation only")

    def special_points_arr(self):
        return self.base.special_points_arr()

    def to_json(self):
        return {"type": "normal_cone", "base": self.base.to_json(), "omega": self.omega.to_json()}


def add_normal_cone(X: FieldOracle, omega: ConvexSet) -> FieldOracle:
    if isinstance(omega, WholeManifold):
        return X
    return NormalConeField(X, omega)


def field_from_json(manifold: Manifold, obj: dict) -> FieldOracle:
    try:
        kind = obj["type"]
    except (KeyError, TypeError) as exc:
        raise InvalidProblem(f"malformed field descriptor {obj!r}") from exc
    try:
        if kind == "frechet_mean":
            return GradientField(WeightedSquaredDistances(manifold, obj["anchors"], obj.get("weights")))
        if kind == "frechet_median":
            return SubdifferentialField(WeightedDistances(manifold, obj["anchors"], obj.get("weights")))
        if kind == "affine":
            return AffineField(manifold, obj["matrix"], obj.get("offset"))
        if kind == "composite":
            return Composite([(t["weight"], field_from_json(manifold, t["field"]))
                              for t in obj["terms"]])
    except KeyError as exc:
        raise InvalidProblem(f"field descriptor {kind!r} is missing {exc}") from exc
    raise InvalidProblem(f"unknown field type {kind!r}")


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class SampleSpec:
    n: int = 512
    seed: int = 0
    radius: float = 3.0


@dataclass(frozen=True)
class CheckReport:
    """Result of a sample-based check.  ``refuted`` is conclusive; the converse is not."""

    name: str
    refuted: bool
    worst_margin: float
    sample_size: int
    seed: int
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "refuted" if self.refuted else "not_refuted"

    def to_json(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict
        return out


def _sample_around(X: FieldOracle, center, spec: SampleSpec) -> np.ndarray:
    m = X.manifold
    coeffs = ball_coefficients(spec.n, m.dim, spec.radius, spec.seed)
    if isinstance(m, Euclidean):
        # far probes expose violations that only appear asymptotically
        dirs = sphere_directions(m.dim, SPHERE_RESOLUTION)
        coeffs = np.vstack([coeffs] + [r * dirs for r in (1e1, 1e2, 1e3, 1e4)])
    pts = m.exp_arr(center, m.embed_coefficients(center, coeffs))
    return np.vstack([pts, X.special_points_arr()])


def enlargement_margins(X: FieldOracle, p, u, eps: float, q) -> np.ndarray:
    """``<P_pq u - v, log_q p> + eps`` for every generator ``v`` of ``X`` at each ``q``."""
    m = X.manifold
    V, owner = X.eval_many(q)
    qo = _as_rows(q)[owner]
    Pu = m.transport_arr(p, qo, u)
    return m.inner_arr(Pu - V, m.log_arr(qo, p)) + eps


def membership_check(X: FieldOracle, p: Point, u: Tangent, eps: float,
                     sampler: SampleSpec = SampleSpec(), tol: float = MEMBERSHIP_TOL) -> CheckReport:
    """Try to refute ``u in X^eps(p)`` on a deterministic sample."""
    check_same_manifold(X.manifold, p.manifold)
    check_same_base(p, u.base)
    if eps < 0:
        raise NegativeEpsilon(f"eps must be nonnegative, got {eps}")
    m = X.manifold
    q = _sample_around(X, p.coords, sampler)
    margins = enlargement_margins(X, p.coords, u.components, eps, q)
    worst = float(np.min(margins))
    details = {"eps": float(eps)}
    if X.potential is not None:
        pot = X.potential
        sub = pot.value_arr(q) - pot.value_arr(p.coords) \
            - m.inner_arr(u.components, m.log_arr(p.coords, q)) + eps
        details["subgradient_margin"] = float(np.min(sub))
    return CheckReport("membership", worst < -tol, worst, len(q), sampler.seed, details)


def monotonicity_falsifier(X: FieldOracle, trials: int, seed: int, radius: float = 3.0,
                           center: Optional[Point] = None, tol: float = MONOTONE_TOL) -> CheckReport:
    """Search random pairs for a violation of ``<P_pq u - v, log_q p> >= 0``."""
    if trials < 1:
        raise PreconditionViolated("trials must be at least 1")
    m = X.manifold
    rng = np.random.default_rng(seed)
    c = m.origin_arr() if center is None else center.coords
    coeffs = rng.normal(size=(2 * trials, m.dim))
    coeffs *= (radius * rng.uniform(size=(2 * trials, 1)) ** (1.0 / m.dim)
               / np.linalg.norm(coeffs, axis=1, keepdims=True))
    pts = m.exp_arr(c, m.embed_coefficients(c, coeffs))
    special = X.special_points_arr()
    if len(special):
        slots = np.arange(0, 2 * trials, 10)
        pts[slots] = special[rng.integers(len(special), size=len(slots))]
    V, owner = X.eval_many(pts)
    starts = np.searchsorted(owner, np.arange(len(pts)))
    counts = np.bincount(owner, minlength=len(pts))
    pick = starts + (rng.uniform(size=len(pts)) * counts).astype(int)
    G = V[pick]
    p, q = pts[:trials], pts[trials:]
    u, v = G[:trials], G[trials:]
    margins = m.inner_arr(m.transport_arr(p, q, u) - v, m.log_arr(q, p))
    k = int(np.argmin(margins))
    worst = float(margins[k])
    details = {"worst_pair": [p[k].tolist(), q[k].tolist()], "tol": tol}
    return CheckReport("monotonicity", worst < -tol, worst, trials, seed, details)


def lsc_spotcheck(X: FieldOracle, pbar: Point, ubar: Tangent, eps: float,
                  sequence: Sequence[Point], theta: float = 0.1, adaptive: bool = True,
                  sampler: SampleSpec = SampleSpec(), max_halvings: int = 20) -> CheckReport:
    """Constructive check that ``ubar`` is approached by enlargement elements along ``p^k -> pbar``.

    For each ``p^k`` the candidate is ``w = (1 - theta) P(pbar -> p^k) ubar + theta u^k``
    with ``u^k`` the generator of ``X(p^k)`` closest to the transported ``ubar``.
    Membership of ``w`` is convex in ``theta`` and holds at ``theta = 1``, so with
    ``adaptive`` the search halves ``theta`` while membership holds and doubles it
    when it fails.  The reported error is ``|P(p^k -> pbar) w - ubar|``.
    """
    if not eps > 0:
        raise PreconditionViolated("eps must be positive")
    if not sequence:
        raise PreconditionViolated("sequence is empty")
    m = X.manifold
    check_same_base(pbar, ubar.base)
    base = membership_check(X, pbar, ubar, eps, sampler)
    if base.refuted:
        raise PreconditionViolated("ubar is not in the enlargement at pbar")
    dists = np.array([m.dist_arr(pbar.coords, pk.coords) for pk in sequence])
    if np.any(np.diff(dists) > 1e-15) or dists[-1] > 1e-6:
        raise PreconditionViolated("sequence must approach pbar monotonically to within 1e-6")

    def member(pk, w):
        return not membership_check(X, pk, Tangent._wrap(pk, w), eps, sampler).refuted

    thetas, errors, bounds = [], [], []
    worst = np.inf
    for pk in sequence:
        Pu = m.transport_arr(pbar.coords, pk.coords, ubar.components)
        gens = X.eval_arr(pk.coords)
        uk = gens[int(np.argmin(m.norm_arr(gens - Pu)))]
        th = theta
        w = (1 - th) * Pu + th * uk
        ok = member(pk, w)
        if adaptive:
            if ok:
                for _ in range(max_halvings):
                    w2 = (1 - th / 2) * Pu + th / 2 * uk
                    if not member(pk, w2):
                        break
                    th, w = th / 2, w2
            else:
                while not ok and th < 1.0:
                    th = min(1.0, 2 * th)
                    w = (1 - th) * Pu + th * uk
                    ok = member(pk, w)
        if not ok:
            worst = -np.inf
        back = m.transport_arr(pk.coords, pbar.coords, w)
        err = float(m.norm_arr(back - ubar.components))
        gap = float(m.norm_arr(ubar.components - m.transport_arr(pk.coords, pbar.coords, uk)))
        thetas.append(th)
        errors.append(err)
        bounds.append(th * gap)
        worst = min(worst, float(th * gap - err))
    details = {"theta": thetas, "errors": errors, "bounds": bounds, "eps": eps,
               "tail_error": errors[-1]}
    refuted = not np.isfinite(worst) or worst < -1e-10
    return CheckReport("lsc", bool(refuted), float(worst), len(sequence), sampler.seed, details)


def field_bound(X: FieldOracle, omega: ConvexSet, n: int = 512, seed: int = 0) -> float:
    """Estimate of ``sup {|u| : u in X(q), q in Omega}`` from a deterministic sample."""
    q = omega.sample(n, seed=seed)
    special = X.special_points_arr()
    if len(special):
        special = special[omega.contains_arr(special)]
        q = np.vstack([q, special])
    V, _ = X.eval_many(q)
    return float(np.max(X.manifold.norm_arr(V)))
