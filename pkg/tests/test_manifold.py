import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_vi import errors
from hadamard_vi.manifold import (
    Euclidean,
    Hyperboloid,
    Point,
    Tangent,
    dist,
    exp,
    geodesic_point,
    inner,
    log,
    manifold_from_json,
    transport,
    zero,
)
from oracles import arc_length, hyperboloid_geodesic, hyperboloid_transport, mink

E2 = Euclidean(2)
H2 = Hyperboloid(2)
O = Point(H2, [1.0, 0.0, 0.0])


def h2_point(a, b):
    return Point._wrap(H2, H2.exp_arr(H2.origin_arr(), np.array([0.0, a, b])))


coord = st.floats(-2.5, 2.5, allow_nan=False)
h2_points = st.builds(h2_point, coord, coord)
tvec = st.tuples(st.floats(-3, 3), st.floats(-3, 3))


def h2_tangent(p, c):
    return Tangent._wrap(p, H2.embed_coefficients(p.coords, np.array(c)))


class TestInner:
    def test_euclidean_orthogonal(self):
        p = Point(E2, [3.0, -1.0])
        assert inner(Tangent(p, [1, 0]), Tangent(p, [0, 1])) == 0.0

    def test_euclidean_squared(self):
        p = E2.origin()
        assert inner(Tangent(p, [3, 4]), Tangent(p, [3, 4])) == 25.0

    def test_hyperboloid_unit(self):
        u = Tangent(O, [0, 1, 0])
        assert inner(u, u) == pytest.approx(1.0)

    def test_hyperboloid_metric_matches_distance(self):
        # metric from finite differences of the distance along a short curve
        u = np.array([0.0, 0.6, -0.8])
        h = 1e-5
        q = H2.exp_arr(O.coords, h * u)
        assert dist(O, Point(H2, q)) / h == pytest.approx(np.sqrt(mink(u, u)), rel=1e-8)

    def test_base_mismatch(self):
        p, q = E2.origin(), Point(E2, [1, 0])
        with pytest.raises(errors.BasePointMismatch):
            inner(Tangent(p, [1, 0]), Tangent(q, [1, 0]))


class TestExp:
    def test_euclidean(self):
        np.testing.assert_array_equal(exp(E2.origin(), Tangent(E2.origin(), [1, 2])).coords, [1, 2])

    def test_hyperboloid_closed_form(self):
        q = exp(O, Tangent(O, [0, 1, 0]))
        np.testing.assert_allclose(q.coords, [np.cosh(1), np.sinh(1), 0], atol=1e-15)

    def test_hyperboloid_matches_ode(self):
        v = np.array([0.0, 1.0, 0.0])
        x, _ = hyperboloid_geodesic(O.coords, v)
        np.testing.assert_allclose(exp(O, Tangent(O, v)).coords, x, atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(h2_points, tvec)
    def test_hyperboloid_ode_random(self, p, c):
        v = h2_tangent(p, c)
        x, _ = hyperboloid_geodesic(p.coords, v.components, steps=3000)
        np.testing.assert_allclose(exp(p, v).coords, x, rtol=1e-8, atol=1e-8)

    def test_zero(self):
        p = h2_point(0.3, -1.0)
        assert exp(p, zero(p)).coords.tolist() == p.coords.tolist()

    def test_tiny_vector_taylor(self):
        p = h2_point(0.3, 0.2)
        v = h2_tangent(p, [1e-14, 0])
        q = exp(p, v)
        assert dist(p, q) == pytest.approx(1e-14, rel=1e-6)

    @settings(max_examples=50, deadline=None)
    @given(h2_points, tvec)
    def test_distance_equals_norm(self, p, c):
        v = h2_tangent(p, c)
        assert dist(p, exp(p, v)) == pytest.approx(v.norm(), rel=1e-9, abs=1e-12)

    def test_stays_on_sheet(self):
        p = h2_point(2.0, -1.0)
        q = exp(p, h2_tangent(p, [4.0, 3.0]))
        assert abs(mink(q.coords, q.coords) + 1) < 1e-12 * q.coords[0] ** 2


class TestLog:
    def test_euclidean(self):
        np.testing.assert_array_equal(log(Point(E2, [1, 1]), Point(E2, [2, 3])).components, [1, 2])

    def test_self(self):
        p = h2_point(1, 1)
        np.testing.assert_array_equal(log(p, p).components, 0)

    def test_hyperboloid_round_trip_example(self):
        q = exp(O, Tangent(O, [0, 0.7, 0]))
        np.testing.assert_allclose(log(O, q).components, [0, 0.7, 0], atol=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(h2_points, h2_points)
    def test_round_trip(self, p, q):
        v = log(p, q)
        assert dist(exp(p, v), q) <= 1e-8
        assert abs(v.norm() - dist(p, q)) <= 1e-10 * max(1, dist(p, q))

    def test_nearby_points_precision(self):
        p = h2_point(1.0, 2.0)
        q = Point._wrap(H2, H2.exp_arr(p.coords, H2.embed_coefficients(p.coords, [3e-9, -4e-9])))
        assert dist(p, q) == pytest.approx(5e-9, rel=1e-6)

    def test_manifold_mismatch(self):
        with pytest.raises(errors.ManifoldMismatch):
            log(E2.origin(), O)


class TestDist:
    def test_examples(self):
        assert dist(E2.origin(), Point(E2, [3, 4])) == 5.0
        q = Point(H2, [np.cosh(2), np.sinh(2), 0])
        assert dist(O, q) == pytest.approx(2.0, rel=1e-14)

    def test_arc_length(self):
        v = np.array([0.0, 1.2, -0.5])
        q = Point(H2, H2.exp_arr(O.coords, v))
        assert dist(O, q) == pytest.approx(arc_length(O.coords, v), rel=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(h2_points, h2_points)
    def test_matches_arccosh(self, p, q):
        # arccosh loses about half the digits near coincident points
        ref = np.arccosh(max(1.0, -mink(p.coords, q.coords)))
        assert dist(p, q) == pytest.approx(ref, abs=1e-7 * max(p.coords[0], q.coords[0]))

    @settings(max_examples=60, deadline=None)
    @given(h2_points, h2_points, h2_points)
    def test_triangle(self, p, q, r):
        assert dist(p, r) <= dist(p, q) + dist(q, r) + 1e-12


class TestTransport:
    def test_orthogonal_fixed(self):
        q = Point(H2, [np.cosh(1), np.sinh(1), 0])
        out = transport(O, q, Tangent(O, [0, 0, 1]))
        np.testing.assert_allclose(out.components, [0, 0, 1], atol=1e-15)

    def test_euclidean_identity(self):
        u = Tangent(E2.origin(), [0.3, -2])
        np.testing.assert_array_equal(transport(E2.origin(), Point(E2, [5, 5]), u).components,
                                      [0.3, -2])

    def test_self(self):
        p = h2_point(0.5, 0.5)
        u = h2_tangent(p, [1, 2])
        np.testing.assert_allclose(transport(p, p, u).components, u.components, atol=1e-15)

    @settings(max_examples=20, deadline=None)
    @given(h2_points, tvec, tvec)
    def test_matches_ode(self, p, c, cu):
        v, u = h2_tangent(p, c), h2_tangent(p, cu)
        x, U = hyperboloid_transport(p.coords, v.components, u.components, steps=3000)
        q = exp(p, v)
        np.testing.assert_allclose(transport(p, q, u).components, U, rtol=1e-7, atol=1e-7)

    @settings(max_examples=100, deadline=None)
    @given(h2_points, h2_points, tvec)
    def test_isometry_and_inverse(self, p, q, cu):
        u = h2_tangent(p, cu)
        t = transport(p, q, u)
        assert abs(t.norm() - u.norm()) <= 1e-10 * max(1, u.norm())
        back = transport(q, p, t)
        np.testing.assert_allclose(back.components, u.components, atol=1e-9 * max(1, u.norm()))

    def test_log_reverses(self):
        p, q = h2_point(0.4, -0.2), h2_point(-1.0, 1.5)
        np.testing.assert_allclose(transport(p, q, log(p, q)).components,
                                   -log(q, p).components, atol=1e-12)

    def test_limit_property(self):
        # p_k -> pbar, v_k -> vbar, t_k -> tbar < 1
        pbar = h2_point(0.3, 0.1)
        vbar = h2_tangent(pbar, [1.0, -0.5])
        tbar = 0.6
        qbar = exp(pbar, vbar * tbar)
        want = transport(pbar, qbar, vbar).components
        errs = []
        for k in range(1, 30):
            h = 2.0 ** -k
            pk = h2_point(0.3 + h, 0.1 - h)
            vk = h2_tangent(pk, [1.0 + h, -0.5])
            qk = exp(pk, vk * (tbar + h))
            got = transport(pk, qk, vk).components
            errs.append(np.linalg.norm(got - want))
        assert errs[-1] < 1e-6
        assert errs[-1] < errs[0]

    def test_log_continuity(self):
        pbar, qbar = h2_point(0.3, 0.1), h2_point(-0.7, 0.9)
        want = log(pbar, qbar).components
        errs = [np.linalg.norm(log(h2_point(0.3 + 2.0 ** -k, 0.1), h2_point(-0.7, 0.9 - 2.0 ** -k))
                               .components - want) for k in range(1, 30)]
        assert errs[-1] < 1e-6


class TestGeodesicPoint:
    def test_endpoints(self):
        p, q = h2_point(0, 1), h2_point(1, 0)
        assert geodesic_point(p, q, 0.0) is p
        assert geodesic_point(p, q, 1.0) is q

    def test_euclidean_midpoint(self):
        np.testing.assert_array_equal(
            geodesic_point(E2.origin(), Point(E2, [2, 0]), 0.5).coords, [1, 0])

    @settings(max_examples=50, deadline=None)
    @given(h2_points, h2_points, st.floats(0, 1))
    def test_constant_speed(self, p, q, t):
        assert dist(p, geodesic_point(p, q, t)) == pytest.approx(t * dist(p, q), abs=1e-9)

    def test_out_of_range(self):
        with pytest.raises(errors.TOutOfRange):
            geodesic_point(O, O, 1.5)


class TestComparison:
    @settings(max_examples=200, deadline=None)
    @given(h2_points, h2_points, h2_points)
    def test_coslaw(self, p1, p2, p3):
        lhs = dist(p1, p3) ** 2 + dist(p3, p2) ** 2 - 2 * inner(log(p3, p1), log(p3, p2))
        assert lhs <= dist(p1, p2) ** 2 + 1e-8

    @settings(max_examples=200, deadline=None)
    @given(h2_points, h2_points, h2_points)
    def test_coslaw2(self, p1, p2, p3):
        s = inner(log(p2, p1), log(p2, p3)) + inner(log(p3, p1), log(p3, p2))
        assert s >= dist(p2, p3) ** 2 - 1e-8

    def test_euclidean_equality(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a, b, c = (Point(E2, rng.normal(size=2)) for _ in range(3))
            lhs = dist(a, c) ** 2 + dist(c, b) ** 2 - 2 * inner(log(c, a), log(c, b))
            assert lhs == pytest.approx(dist(a, b) ** 2, abs=1e-12)


class TestValidation:
    def test_off_sheet(self):
        with pytest.raises(errors.InvalidPoint):
            Point(H2, [1.0, 1.0, 0.0])

    def test_lower_sheet(self):
        with pytest.raises(errors.InvalidPoint):
            Point(H2, [-1.0, 0.0, 0.0])

    def test_not_tangent(self):
        with pytest.raises(errors.InvalidTangent):
            Tangent(O, [1.0, 0.0, 0.0])

    def test_wrong_length(self):
        with pytest.raises(errors.InvalidPoint):
            Point(E2, [1.0])

    def test_json(self):
        assert manifold_from_json({"kind": "hyperboloid", "dim": 3}) == Hyperboloid(3)
        with pytest.raises(ValueError):
            manifold_from_json({"kind": "sphere", "dim": 2})

    def test_immutable(self):
        p = Point(E2, [1.0, 2.0])
        with pytest.raises(ValueError):
            p.coords[0] = 5.0
