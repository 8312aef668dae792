"""Extragradient-type method for monotone variational inequalities on Hadamard manifolds.

One iteration from ``p`` with tolerance ``eps``:

(a) pick ``u`` in the eps-enlargement at ``p`` such that, with
    ``z = P_Omega(exp_p(-alpha u))``, every enlargement generator ``w``
    satisfies ``<w, -log_p z> >= (delta_plus/alpha) d(p, z)^2``;
(b) stop when ``d(p, z) <= stop_tol``;
(c) backtrack along the geodesic from ``p`` to ``z`` until some ``v`` in
    ``X(y)``, ``y = gamma(lambda)``, has ``<v, gamma'(lambda)> <= -(delta_minus/alpha) d(p, z)^2``;
(d) project ``p`` onto the half-space ``{x : <v, log_y x> <= 0}`` and then
    onto ``Omega``; shrink ``eps`` to ``min(eps, d(p, z)^2)``.

Every inequality the convergence argument relies on is recomputed at run
time and recorded in a :class:`MonitorReport`.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    BacktrackExhausted,
    HVIError,
    InvalidConfig,
    NoConvergence,
    PointNotInSet,
    PreconditionViolated,
    ScheduleViolation,
    SelectionFailure,
    ZeroVector,
)
from .fields import FieldOracle
from .hull import min_norm_point, project_onto_hull
from .manifold import Manifold, Point, Tangent, check_same_manifold
from .sets import ConvexSet, LogHalfSpace

log = logging.getLogger(__name__)

TRACE_SCHEMA_VERSION = "1"
TRACE_COLUMNS = (
    "k", "eps_k", "dist_p_z", "i_k", "lambda_k", "selection_margin",
    "backtrack_margin", "fejer_decrement", "dist_to_reference", "schema_version",
)
SELECTION_TOL = 1e-9
FEJER_TOL = 1e-7
GAMMA_TOL = 1e-8
OMEGA_TOL = 1e-7


@dataclass(frozen=True)
class SolverConfig:
    epsilon0: float
    delta_minus: float = 0.3
    delta_plus: float = 0.9
    alpha_minus: float = 0.5
    alpha_plus: float = 1.0
    beta: float = 0.5
    alpha_schedule: Optional[tuple] = None
    beta_schedule: Optional[tuple] = None
    max_iter: int = 1000
    max_backtracks: int = 60
    stop_tol: float = 1e-9
    enlargement: str = "eps_subgradient"
    selection_rounds: int = 100

    def __post_init__(self):
        def bad(msg):
            raise InvalidConfig(msg)

        if not self.epsilon0 > 0:
            bad(f"epsilon0 must be positive, got {self.epsilon0}")
        if not 0 < self.delta_minus < self.delta_plus < 1:
            bad(f"need 0 < delta_minus < delta_plus < 1, got "
                f"delta_minus={self.delta_minus}, delta_plus={self.delta_plus}")
        if not 0 < self.alpha_minus < self.alpha_plus:
            bad(f"need 0 < alpha_minus < alpha_plus, got "
                f"alpha_minus={self.alpha_minus}, alpha_plus={self.alpha_plus}")
        if not 0 < self.beta < 1:
            bad(f"beta must lie in (0, 1), got {self.beta}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 0:
            bad("max_iter must be a nonnegative integer")
        if int(self.max_backtracks) != self.max_backtracks or self.max_backtracks < 0:
            bad("max_backtracks must be a nonnegative integer")
        if not self.stop_tol >= 0:
            bad("stop_tol must be nonnegative")
        if self.enlargement not in ("eps_subgradient", "field"):
            bad(f"enlargement must be 'eps_subgradient' or 'field', got {self.enlargement!r}")
        for name in ("alpha_schedule", "beta_schedule"):
            sched = getattr(self, name)
            if sched is not None:
                sched = tuple(float(a) for a in sched)
                if not sched:
                    bad(f"{name} must not be empty")
                object.__setattr__(self, name, sched)

    def alpha(self, k: int) -> float:
        """Step ``alpha_k``; a finite schedule repeats its last entry."""
        if self.alpha_schedule is None:
            return self.alpha_plus
        a = self.alpha_schedule[min(k, len(self.alpha_schedule) - 1)]
        if not self.alpha_minus <= a <= self.alpha_plus:
            raise ScheduleViolation(f"alpha_{k} = {a} outside [{self.alpha_minus}, {self.alpha_plus}]")
        return a

    def beta_k(self, k: int) -> float:
        if self.beta_schedule is None:
            return 1.0
        b = self.beta_schedule[min(k, len(self.beta_schedule) - 1)]
        if not self.beta <= b <= 1.0:
            raise ScheduleViolation(f"beta_{k} = {b} outside [{self.beta}, 1]")
        return b

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for name in ("alpha_schedule", "beta_schedule"):
            if out[name] is not None:
                out[name] = list(out[name])
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SolverConfig":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidConfig(f"unknown solver fields {sorted(unknown)}")
        if "epsilon0" not in obj:
            raise InvalidConfig("solver config needs epsilon0")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from exc


@dataclass(frozen=True)
class MonitorReport:
    selection_margin: float
    backtrack_margin: Optional[float] = None
    fejer_decrement: Optional[float] = None
    dist_to_reference: Optional[float] = None
    gamma_check: Optional[float] = None
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class StepTrace:
    k: int
    p: Point
    eps_k: float
    alpha_k: float
    beta_k: float
    u: Tangent
    z: Point
    dist_p_z: float
    stopped: bool
    monitors: MonitorReport
    n_generators: int = 1
    i_k: Optional[int] = None
    lambda_k: Optional[float] = None
    y: Optional[Point] = None
    v: Optional[Tangent] = None
    S_k: Optional[LogHalfSpace] = None
    q: Optional[Point] = None
    p_next: Optional[Point] = None
    eps_next: Optional[float] = None


@dataclass(frozen=True)
class RunReport:
    status: str                      # "eps_solution" | "max_iter" | "failure"
    steps: tuple
    final_point: Point
    final_eps: float
    residual: float
    message: str = ""
    failure_k: Optional[int] = None
    min_dist2: float = float("inf")

    @property
    def iterations(self) -> int:
        return len(self.steps)

    @property
    def monitor_violations(self) -> list:
        return [(s.k, v) for s in self.steps for v in s.monitors.violations]

    @property
    def monitors_clean(self) -> bool:
        return not self.monitor_violations

    def certificate(self) -> dict:
        out = {"status": self.status, "eps_k": self.final_eps, "residual": self.residual,
               "iterations": self.iterations, "point": self.final_point.to_json(),
               "monitor_violations": len(self.monitor_violations)}
        if self.status == "max_iter":
            out["min_dist2"] = self.min_dist2
        if self.status == "failure":
            out["message"] = self.message
            out["failure_k"] = self.failure_k
        return out

    def trace_rows(self) -> list[dict]:
        rows = []
        for s in self.steps:
            m = s.monitors
            rows.append({
                "k": s.k, "eps_k": s.eps_k, "dist_p_z": s.dist_p_z, "i_k": s.i_k,
                "lambda_k": s.lambda_k, "selection_margin": m.selection_margin,
                "backtrack_margin": m.backtrack_margin, "fejer_decrement": m.fejer_decrement,
                "dist_to_reference": m.dist_to_reference,
                "schema_version": TRACE_SCHEMA_VERSION,
            })
        return rows

    def trace_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in self.trace_rows():
            writer.writerow([_fmt(row[c]) for c in TRACE_COLUMNS])
        return buf.getvalue()

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.trace_csv())

    def write_certificate(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.certificate(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# step (a)


@dataclass
class _Selector:
    """Evaluates the selection inequality for candidates given in an orthonormal frame."""

    manifold: Manifold
    p: np.ndarray
    omega: ConvexSet
    alpha: float
    delta_plus: float
    C: np.ndarray                 # generators, frame coordinates (k, dim)
    basis: np.ndarray = field(init=False)

    def __post_init__(self):
        self.basis = self.manifold.tangent_basis_arr(self.p)

    def z_and_log(self, U):
        m = self.manifold
        U = np.atleast_2d(U)
        w = m.exp_arr(self.p, -self.alpha * (U @ self.basis))
        z = self.omega.project_arr(w)
        L = m.coefficients(self.p, m.log_arr(self.p, z))
        return z, L

    def margins(self, U):
        z, L = self.z_and_log(U)
        worst = np.min(-(L @ self.C.T), axis=1)
        return worst - (self.delta_plus / self.alpha) * np.sum(L * L, axis=1), z, L


def _hull_grid(C: np.ndarray, n: int = 129) -> np.ndarray:
    """Regular grid points inside ``conv(C)`` for frame dimension 1 or 2."""
    dim = C.shape[1]
    lo, hi = C.min(axis=0), C.max(axis=0)
    if dim == 1:
        return np.linspace(lo[0], hi[0], 2001)[:, None]
    try:
        hull = ConvexHull(C)
    except (QhullError, ValueError):
        # flat hull: walk the segment between the two farthest generators
        i, j = np.unravel_index(np.argmax(np.sum((C[:, None] - C[None]) ** 2, -1)), (len(C),) * 2)
        t = np.linspace(0.0, 1.0, 2001)[:, None]
        return (1 - t) * C[i] + t * C[j]
    g = np.stack(np.meshgrid(np.linspace(lo[0], hi[0], n), np.linspace(lo[1], hi[1], n)), -1)
    g = g.reshape(-1, 2)
    inside = np.all(g @ hull.equations[:, :2].T + hull.equations[:, 2] <= 1e-12, axis=1)
    return np.vstack([C, g[inside]])


def select_u(X: FieldOracle, p: Point, eps_k: float, alpha_k: float, delta_plus: float,
             omega: ConvexSet, mode: str = "eps_subgradient", rounds: int = 100):
    """Step (a).  Returns ``(u, z, margin, n_generators)``.

    For several generators the selection solves the fixed point
    ``u = Pi_hull(u + log_p z(u) / alpha)`` by averaged iteration from the
    minimum-norm generator combination; at a fixed point ``<w - u, log_p z> <= 0``
    for every generator ``w``, and ``u`` alone already satisfies the inequality.
    """
    m = X.manifold
    check_same_manifold(m, p.manifold)
    if not omega.contains(p, tol=OMEGA_TOL):
        raise PointNotInSet("selection needs p in Omega")
    gens = X.eval_arr(p.coords) if mode == "field" or eps_k == 0 \
        else X.enlargement_arr(p.coords, eps_k)
    sel = _Selector(m, p.coords, omega, alpha_k, delta_plus, m.coefficients(p.coords, gens))
    C = sel.C

    def result(uc, margin, z):
        u = Tangent._wrap(p, uc @ sel.basis)
        return u, Point._wrap(m, z), float(margin), len(C)

    if len(C) == 1:
        marg, z, _ = sel.margins(C)
        if marg[0] < -SELECTION_TOL:
            raise SelectionFailure("single-generator selection inequality failed",
                                   candidate=Tangent._wrap(p, gens[0]), margin=float(marg[0]))
        return result(C[0], marg[0], z[0])

    u, _ = min_norm_point(C)
    best = (-np.inf, u)
    for _ in range(rounds):
        marg, z, L = sel.margins(u)
        if marg[0] > best[0]:
            best = (float(marg[0]), u)
        if marg[0] >= -SELECTION_TOL:
            return result(u, marg[0], z[0])
        target, _ = project_onto_hull(u + L[0] / alpha_k, C)
        u = 0.5 * u + 0.5 * target

    if m.dim <= 2:
        grid = _hull_grid(C)
        marg, z, _ = sel.margins(grid)
        j = int(np.argmax(marg))
        if marg[j] >= -SELECTION_TOL:
            log.debug("selection fell back to the hull grid (%d points)", len(grid))
            return result(grid[j], marg[j], z[j])
        if marg[j] > best[0]:
            best = (float(marg[j]), grid[j])
    raise SelectionFailure("no selection found", candidate=Tangent._wrap(p, best[1] @ sel.basis),
                           margin=best[0])


# ---------------------------------------------------------------------------
# steps (b) - (d)


def check_stop(p: Point, z: Point, stop_tol: float) -> bool:
    check_same_manifold(p.manifold, z.manifold)
    return bool(p.manifold.dist_arr(p.coords, z.coords) <= stop_tol)


@dataclass(frozen=True)
class BacktrackResult:
    i_k: int
    lambda_k: float
    y: Point
    v: Tangent
    margin: float
    gamma_check: Optional[float]


def backtrack(X: FieldOracle, p: Point, z: Point, alpha_k: float, beta_k: float,
              delta_minus: float, max_backtracks: int = 60) -> BacktrackResult:
    """Step (c): least ``i`` with ``<v, gamma'(2^-i beta)> <= -(delta_minus/alpha) d(p, z)^2``.

    ``gamma'`` at ``y`` is the transport of ``log_p z`` to ``y``; when the step
    is not tiny it is cross-checked against ``-log_y p / lambda``.
    """
    m = X.manifold
    check_same_manifold(m, p.manifold)
    lz = m.log_arr(p.coords, z.coords)
    d = float(m.norm_arr(lz))
    if not d > 0:
        raise PreconditionViolated("backtracking needs p != z")
    threshold = -(delta_minus / alpha_k) * d * d
    last = np.nan
    for i in range(max_backtracks + 1):
        lam = beta_k * 2.0 ** (-i)
        y = z.coords if lam == 1.0 else m.exp_arr(p.coords, lam * lz)
        gamma = m.transport_arr(p.coords, y, lz)
        gens = X.eval_arr(y)
        vals = m.inner_arr(gens, gamma)
        ok = np.nonzero(vals <= threshold)[0]
        if len(ok):
            j = int(ok[0])
            check = None
            if lam * d >= 1e-6:
                alt = -m.log_arr(y, p.coords) / lam
                check = float(m.norm_arr(alt - gamma) / d)
            yp = Point._wrap(m, y)
            return BacktrackResult(i, lam, yp, Tangent._wrap(yp, gens[j]),
                                   float(threshold - vals[j]), check)
        last = float(threshold - np.min(vals))
    raise BacktrackExhausted(f"no admissible step after {max_backtracks} halvings",
                             last_margin=last)


def halfspace_update(p: Point, y: Point, v: Tangent, omega: ConvexSet):
    """Step (d): returns ``(S_k, q, p_next)``."""
    if v.norm() == 0.0:
        raise ZeroVector("backtracking returned a zero field value")
    S = LogHalfSpace(y, v)
    q = S.project(p).point
    p_next = omega.project(q).point
    return S, q, p_next


# ---------------------------------------------------------------------------
# driver


def run(X: FieldOracle, omega: ConvexSet, config: SolverConfig, p0: Point,
        reference_solution: Optional[Point] = None,
        callback: Optional[Callable[[StepTrace], None]] = None) -> RunReport:
    """Run the method from ``p0`` until the stopping test fires or ``max_iter`` steps."""
    m = X.manifold
    check_same_manifold(m, omega.manifold)
    check_same_manifold(m, p0.manifold)
    if not omega.contains(p0, tol=OMEGA_TOL):
        raise PointNotInSet("p0 is not in Omega")
    ref = None if reference_solution is None else reference_solution.coords
    p, eps = p0, float(config.epsilon0)
    steps: list[StepTrace] = []
    min_d2 = np.inf

    def finish(status, residual, message="", failure_k=None):
        return RunReport(status, tuple(steps), p, eps, float(residual), message,
                         failure_k, float(min_d2))

    residual = np.inf
    for k in range(config.max_iter):
        try:
            alpha, beta = config.alpha(k), config.beta_k(k)
            u, z, sel_margin, n_gen = select_u(X, p, eps, alpha, config.delta_plus, omega,
                                               config.enlargement, config.selection_rounds)
        except HVIError as exc:
            return finish("failure", residual, f"step {k}: {type(exc).__name__}: {exc}", k)
        d = float(m.dist_arr(p.coords, z.coords))
        residual = d
        min_d2 = min(min_d2, d * d)
        violations = []
        if sel_margin < -SELECTION_TOL:
            violations.append(f"selection margin {sel_margin:.3e}")
        dref = None if ref is None else float(m.dist_arr(ref, p.coords))

        if check_stop(p, z, config.stop_tol):
            mon = MonitorReport(sel_margin, dist_to_reference=dref, violations=tuple(violations))
            step = StepTrace(k, p, eps, alpha, beta, u, z, d, True, mon, n_gen)
            steps.append(step)
            if callback:
                callback(step)
            return finish("eps_solution", d)

        try:
            bt = backtrack(X, p, z, alpha, beta, config.delta_minus, config.max_backtracks)
            S, q, p_next = halfspace_update(p, bt.y, bt.v, omega)
        except (HVIError, NoConvergence) as exc:
            return finish("failure", residual, f"step {k}: {type(exc).__name__}: {exc}", k)

        if bt.margin < 0:
            violations.append(f"backtrack margin {bt.margin:.3e}")
        if bt.gamma_check is not None and bt.gamma_check > GAMMA_TOL:
            violations.append(f"geodesic velocity mismatch {bt.gamma_check:.3e}")
        if not omega.contains(p_next, tol=OMEGA_TOL):
            violations.append("iterate left Omega")
        fejer = None
        if ref is not None:
            fejer = float(m.dist_arr(ref, p.coords) ** 2 - m.dist_arr(ref, p_next.coords) ** 2
                          - m.dist_arr(q.coords, p.coords) ** 2)
            if fejer < -FEJER_TOL:
                violations.append(f"Fejer decrement {fejer:.3e}")
        eps_next = min(eps, d * d)
        mon = MonitorReport(sel_margin, bt.margin, fejer, dref, bt.gamma_check, tuple(violations))
        step = StepTrace(k, p, eps, alpha, beta, u, z, d, False, mon, n_gen, bt.i_k,
                         bt.lambda_k, bt.y, bt.v, S, q, p_next, eps_next)
        steps.append(step)
        if callback:
            callback(step)
        if violations:
            log.warning("step %d: %s", k, "; ".join(violations))
        p, eps = p_next, eps_next

    return finish("max_iter", residual)
