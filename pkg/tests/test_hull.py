import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from hadamard_vi.hull import hull_distance, min_norm_point, project_onto_hull


def slsqp_min_norm(P):
    m = len(P)
    res = minimize(lambda w: np.sum((w @ P) ** 2), np.full(m, 1.0 / m), method="SLSQP",
                   bounds=[(0, 1)] * m, constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1}],
                   options={"ftol": 1e-15, "maxiter": 1000})
    return res.x @ P


class TestMinNormPoint:
    def test_origin_inside(self):
        x, w = min_norm_point([[1, 0], [-1, 1], [-1, -1]])
        np.testing.assert_allclose(x, 0, atol=1e-14)
        assert w.sum() == pytest.approx(1.0)

    def test_segment(self):
        x, _ = min_norm_point([[1, 1], [1, -1]])
        np.testing.assert_allclose(x, [1, 0], atol=1e-14)

    def test_single(self):
        x, w = min_norm_point([[3.0, 4.0]])
        np.testing.assert_array_equal(x, [3, 4])
        np.testing.assert_array_equal(w, [1])

    def test_tiny_scale(self):
        P = 1e-9 * np.array([[1.0, 1.0], [1.0, -1.0], [2.0, 0.5]])
        x, _ = min_norm_point(P)
        np.testing.assert_allclose(x, [1e-9, 0.0], atol=1e-22)

    @settings(max_examples=60, deadline=None)
    @given(arrays(float, st.tuples(st.integers(1, 8), st.integers(1, 3)),
                  elements=st.floats(-5, 5, allow_nan=False)))
    def test_matches_slsqp(self, P):
        x, w = min_norm_point(P)
        assert np.all(w >= 0) and w.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(w @ P, x, atol=1e-10)
        ref = slsqp_min_norm(P)
        assert np.linalg.norm(x) <= np.linalg.norm(ref) + 1e-7
        # optimality: no generator improves on x
        assert np.min(P @ x) >= x @ x - 1e-9


class TestProjection:
    def test_interval(self):
        p, _ = project_onto_hull([3.0], [[0.5], [1.0]])
        np.testing.assert_allclose(p, [1.0])
        assert hull_distance([0.7], [[0.5], [1.0]]) == pytest.approx(0.0, abs=1e-15)
