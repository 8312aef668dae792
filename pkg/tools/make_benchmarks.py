"""Regenerate the bundled benchmark problem files.

Reference solutions come from the closed form where one exists and from
projected gradient descent on the potential otherwise.

    python3 tools/make_benchmarks.py
"""

import json
from pathlib import Path

import numpy as np

from hadamard_vi import Euclidean, Hyperboloid, problem_from_json, projected_gradient_descent

OUT = Path(__file__).resolve().parents[1] / "src" / "hadamard_vi" / "benchmarks"

SOLVER = {"delta_minus": 0.3, "delta_plus": 0.9, "alpha_minus": 0.5, "alpha_plus": 1.0,
          "beta": 0.5, "max_iter": 1000, "max_backtracks": 60, "stop_tol": 1e-9}


def triangle_h2(side=1.0):
    """Three points of H^2 at mutual distance ``side``, centred at the origin."""
    h = Hyperboloid(2)
    o = h.origin_arr()
    # circumradius of an equilateral hyperbolic triangle
    r = np.arcsinh(2.0 / np.sqrt(3.0) * np.sinh(side / 2.0))
    angles = 2 * np.pi * np.arange(3) / 3
    return [h.exp_arr(o, r * np.array([0.0, np.cos(a), np.sin(a)])).tolist() for a in angles]


def with_reference(obj):
    prob = problem_from_json(obj)
    obj["reference"] = projected_gradient_descent(prob.field, prob.omega).result.to_json()
    return obj


def problems():
    tri = triangle_h2()
    yield "euclidean_linear", {
        "manifold": {"kind": "euclidean", "dim": 2},
        "field": {"type": "affine", "matrix": [[1, 0], [0, 1]], "offset": [0, 0]},
        "omega": {"type": "whole"},
        "p0": [1.0, 0.0],
        "solver": {**SOLVER, "epsilon0": 1.0, "enlargement": "field", "max_iter": 100},
        "reference": [0.0, 0.0],
    }
    yield "line_linear", {
        "manifold": {"kind": "euclidean", "dim": 1},
        "field": {"type": "affine", "matrix": [[1]], "offset": [0]},
        "omega": {"type": "box", "lower": [-1], "upper": [1]},
        "p0": [1.0],
        "solver": {**SOLVER, "epsilon0": 1e-16},
        "reference": [0.0],
    }
    yield "hyperbolic_mean", {
        "manifold": {"kind": "hyperboloid", "dim": 2},
        "field": {"type": "frechet_mean", "anchors": tri, "weights": [1, 1, 1]},
        "omega": {"type": "ball", "center": tri[0], "radius": 2.0},
        "p0": tri[0],
        "solver": {**SOLVER, "epsilon0": 1e-14, "max_iter": 500},
        "reference": [1.0, 0.0, 0.0],
    }
    yield "euclidean_median", with_reference({
        "manifold": {"kind": "euclidean", "dim": 2},
        "field": {"type": "frechet_median", "anchors": [[0, 0], [4, 0], [1, 3]],
                  "weights": [1, 1, 1]},
        "omega": {"type": "whole"},
        "p0": [0.0, 0.0],
        "solver": {**SOLVER, "epsilon0": 1e-10},
    })
    yield "hyperbolic_constrained_mean", with_reference({
        "manifold": {"kind": "hyperboloid", "dim": 2},
        "field": {"type": "frechet_mean", "anchors": tri, "weights": [1, 2, 3]},
        "omega": {"type": "ball", "center": tri[0], "radius": 0.3},
        "p0": tri[0],
        # the solution sits on the boundary, where progress is very slow
        "solver": {**SOLVER, "epsilon0": 1e-14, "max_iter": 300},
    })
    # x* solves A x + b = 0 for the rotation A = [[0, 1], [-1, 0]]
    yield "euclidean_rotation", {
        "manifold": {"kind": "euclidean", "dim": 2},
        "field": {"type": "affine", "matrix": [[0, 1], [-1, 0]], "offset": [0.5, -0.3]},
        "omega": {"type": "box", "lower": [-2, -2], "upper": [2, 2]},
        "p0": [2.0, 2.0],
        "solver": {**SOLVER, "epsilon0": 1e-12},
        "reference": [-0.3, -0.5],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, obj in problems():
        obj = {"name": name, "seed": 0, **obj}
        problem_from_json(obj)
        (OUT / f"{name}.json").write_text(json.dumps(obj, indent=2) + "\n")
        print("wrote", name)


if __name__ == "__main__":
    main()
