"""Problem files: manifold, field, feasible set, start point and solver settings."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .errors import HVIError, InvalidProblem
from .fields import FieldOracle, field_from_json
from .manifold import Manifold, Point, manifold_from_json
from .sets import ConvexSet, set_from_json
from .solver import SolverConfig

REQUIRED = ("manifold", "field", "omega", "p0", "solver")


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    manifold: Manifold
    field: FieldOracle
    omega: ConvexSet
    p0: Point
    solver: SolverConfig
    reference: Optional[Point] = None
    seed: int = 0

    def with_overrides(self, max_iter=None, stop_tol=None, seed=None) -> "ProblemSpec":
        cfg = self.solver
        if max_iter is not None:
            cfg = replace(cfg, max_iter=int(max_iter))
        if stop_tol is not None:
            cfg = replace(cfg, stop_tol=float(stop_tol))
        return replace(self, solver=cfg, seed=self.seed if seed is None else int(seed))

    def to_json(self) -> dict:
        out = {"name": self.name, "manifold": self.manifold.to_json(),
               "field": self.field.to_json(), "omega": self.omega.to_json(),
               "p0": self.p0.to_json(), "solver": self.solver.to_json(), "seed": self.seed}
        if self.reference is not None:
            out["reference"] = self.reference.to_json()
        return out


def problem_from_json(obj: dict, name: str = "problem") -> ProblemSpec:
    if not isinstance(obj, dict):
        raise InvalidProblem("problem file must contain a JSON object")
    missing = [k for k in REQUIRED if k not in obj]
    if missing:
        raise InvalidProblem(f"problem is missing {', '.join(missing)}")
    try:
        m = manifold_from_json(obj["manifold"])
        X = field_from_json(m, obj["field"])
        omega = set_from_json(m, obj["omega"])
        p0 = Point(m, obj["p0"])
        cfg = SolverConfig.from_json(obj["solver"])
        ref = Point(m, obj["reference"]) if obj.get("reference") is not None else None
    except HVIError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InvalidProblem(str(exc)) from exc
    if not omega.contains(p0, tol=1e-7):
        raise InvalidProblem("p0 is not in omega")
    if ref is not None and not omega.contains(ref, tol=1e-7):
        raise InvalidProblem("reference solution is not in omega")
    return ProblemSpec(obj.get("name", name), m, X, omega, p0, cfg, ref, int(obj.get("seed", 0)))


def load_problem(path) -> ProblemSpec:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidProblem(f"{path}: {exc}") from exc
    return problem_from_json(obj, name=path.stem)
