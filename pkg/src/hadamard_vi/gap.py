"""Gap function estimates, eps-solution checks and reference solvers.

The gap ``h(p) = sup_{q in Omega, v in X(q)} <v, log_q p>`` is estimated
from below by sampling, so an estimate above ``eps`` refutes an
eps-solution claim while an estimate below it is only sample-relative.

The reference solvers minimise the potential behind a field directly and
share no step logic with the extragradient solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptySample, OracleNotAvailable, PointNotInSet
from .fields import (
    CheckReport,
    FieldOracle,
    GradientField,
    SubdifferentialField,
)
from .manifold import Point, Tangent, check_same_manifold
from .sets import ConvexSet

GAP_TOL = 1e-8
DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class GapEstimate:
    value_lower_bound: float
    argmax_sample: tuple          # (Point q, Tangent v)
    sample_size: int
    seed: int

    def to_json(self) -> dict:
        q, v = self.argmax_sample
        return {"value_lower_bound": self.value_lower_bound, "argmax_q": q.to_json(),
                "argmax_v": v.to_json(), "sample_size": self.sample_size, "seed": self.seed}


def gap_sample(X: FieldOracle, omega: ConvexSet, p: Point, n: int, seed: int) -> np.ndarray:
    """Sample points for the gap: ``p`` itself, the field's special points in
    ``Omega`` and a boundary-biased low-discrepancy sample of ``Omega``."""
    q = omega.sample(n, seed=seed, center=p)
    extra = [p.coords[None, :]]
    special = X.special_points_arr()
    if len(special):
        extra.append(special[omega.contains_arr(special)])
    return np.vstack(extra + [q])


def gap_estimate(X: FieldOracle, omega: ConvexSet, p: Point, sample_size: int = DEFAULT_SAMPLES,
                 seed: int = 0) -> GapEstimate:
    check_same_manifold(X.manifold, p.manifold)
    if sample_size < 1:
        raise EmptySample("sample_size must be positive")
    if not omega.contains(p, tol=1e-7):
        raise PointNotInSet("the gap is evaluated at points of Omega")
    m = X.manifold
    q = gap_sample(X, omega, p, sample_size, seed)
    V, owner = X.eval_many(q)
    if len(V) == 0:
        raise EmptySample("no field values on the sample")
    vals = m.inner_arr(V, m.log_arr(q[owner], p.coords))
    k = int(np.argmax(vals))
    qk = Point._wrap(m, q[owner[k]])
    return GapEstimate(float(vals[k]), (qk, Tangent._wrap(qk, V[k])), len(q), seed)


def eps_solution_check(X: FieldOracle, omega: ConvexSet, p: Point, eps: float,
                       sample_size: int = DEFAULT_SAMPLES, seed: int = 0) -> CheckReport:
    """``consistent`` iff the gap estimate is at most ``eps + 1e-8``."""
    est = gap_estimate(X, omega, p, sample_size, seed)
    margin = float(eps) + GAP_TOL - est.value_lower_bound
    return CheckReport("eps_solution", margin < 0, margin, est.sample_size, seed,
                       {"eps": float(eps), "gap_estimate": est.value_lower_bound,
                        "verdict_meaning": "refutation is conclusive, consistency is sample-relative"})


def fixed_point_residual(X: FieldOracle, omega: ConvexSet, p: Point, alpha: float) -> float:
    """``min_u d(p, P_Omega(exp_p(-alpha u)))`` over the generators of ``X(p)``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not omega.contains(p, tol=1e-7):
        raise PointNotInSet("the residual is evaluated at points of Omega")
    m = X.manifold
    gens = X.eval_arr(p.coords)
    z = omega.project_arr(m.exp_arr(p.coords, -alpha * gens))
    return float(np.min(m.dist_arr(p.coords, z)))


# ---------------------------------------------------------------------------
# reference solutions


@dataclass(frozen=True)
class SolutionOracle:
    method: str                   # "gradient_descent" | "grid_search"
    result: Point
    residual: float
    iterations: int = 0

    def to_json(self) -> dict:
        return {"method": self.method, "result": self.result.to_json(),
                "residual": self.residual, "iterations": self.iterations}


def _potential(X: FieldOracle):
    if isinstance(X, (GradientField, SubdifferentialField)):
        return X.potential
    raise OracleNotAvailable(f"{type(X).__name__} is not backed by an explicit potential")


def projected_gradient_descent(X: FieldOracle, omega: ConvexSet, start: Optional[Point] = None,
                               tol: float = 1e-10, max_iter: int = 100_000) -> SolutionOracle:
    """Projected Riemannian descent with Armijo backtracking on the potential.

    The direction is minus the minimum-norm subgradient, the residual is
    ``d(x, P_Omega(exp_x(-g)))``.
    """
    pot = _potential(X)
    m = X.manifold
    x = omega.project_arr(omega.reference_arr() if start is None else start.coords)
    fx = float(pot.value_arr(x))
    step = 1.0
    res = np.inf
    for it in range(max_iter):
        g = pot.min_norm_subgradient_arr(x)
        res = float(m.dist_arr(x, omega.project_arr(m.exp_arr(x, -g))))
        if res <= tol:
            return SolutionOracle("gradient_descent", Point._wrap(m, x), res, it)
        step = min(1.0, 2.0 * step)
        slack = 4.0 * np.finfo(float).eps * max(1.0, abs(fx))
        while True:
            cand = omega.project_arr(m.exp_arr(x, -step * g))
            fc = float(pot.value_arr(cand))
            dx = float(m.dist_arr(x, cand))
            if fc <= fx - 1e-4 * dx * dx / step or step < 1e-20:
                break
            if fc <= fx + slack:
                # values agree to rounding: fall back to the fixed-point residual
                gc = pot.min_norm_subgradient_arr(cand)
                if m.dist_arr(cand, omega.project_arr(m.exp_arr(cand, -gc))) < res:
                    break
            step *= 0.5
        if dx == 0.0:
            break
        x, fx = cand, fc
    return SolutionOracle("gradient_descent", Point._wrap(m, x), res, max_iter)


def grid_search(X: FieldOracle, omega: ConvexSet, resolution: float = 1e-3,
                radius: float = 4.0, points_per_axis: int = 101) -> SolutionOracle:
    """Zooming grid search on the potential in normal coordinates (dim <= 2).

    Each level evaluates a regular grid around the best point so far,
    projected onto ``Omega``, and shrinks the window by ``points_per_axis / 4``
    until its spacing reaches ``resolution``.  This is a local refinement, exact only for potentials
    whose sublevel sets are connected, which holds for convex potentials.
    """
    pot = _potential(X)
    m = X.manifold
    if m.dim > 2:
        raise OracleNotAvailable("grid search is limited to dimension 2")
    center = omega.reference_arr()
    half = radius
    best = center
    while True:
        ticks = np.linspace(-half, half, points_per_axis)
        coeffs = np.stack(np.meshgrid(*([ticks] * m.dim)), -1).reshape(-1, m.dim)
        cand = m.exp_arr(best, m.embed_coefficients(best, coeffs))
        # projecting keeps exact boundary points, which matters when the
        # minimiser sits on the boundary and the potential is flat along it
        cand = omega.project_arr(cand)
        vals = pot.value_arr(cand)
        best = cand[int(np.argmin(vals))]
        spacing = 2 * half / (points_per_axis - 1)
        if spacing <= resolution:
            return SolutionOracle("grid_search", Point._wrap(m, best), spacing)
        half = max(half * 4.0 / points_per_axis, resolution * (points_per_axis - 1) / 2)


def solve_reference(problem, method: str = "gradient_descent", **kwargs) -> SolutionOracle:
    """Reference solution of a problem whose field is a potential gradient or subdifferential."""
    if method == "gradient_descent":
        return projected_gradient_descent(problem.field, problem.omega, **kwargs)
    if method == "grid_search":
        return grid_search(problem.field, problem.omega, **kwargs)
    raise ValueError(f"unknown reference method {method!r}")
