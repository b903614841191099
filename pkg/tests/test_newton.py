from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import polygons, small_pos

from newtbuild import newton, plconvex
from newtbuild.newton import Context, NewtonPolygon, flat, lambda_iter
from newtbuild.plconvex import INF
from newtbuild.torsion_oracle import torsion_points, valuation

C22 = Context(2, 2)
P1 = NewtonPolygon(C22, (F(2, 3), F(1, 6)))


class TestPolygon:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            NewtonPolygon(C22, (F(1, 6), F(2, 3)))
        with pytest.raises(ValueError):
            NewtonPolygon(C22, (F(1, 3), F(1, 4)))
        with pytest.raises(ValueError):
            Context(1, 2)

    @pytest.mark.parametrize("q, n", [(2, 2), (2, 3), (3, 2), (5, 4)])
    def test_flat(self, q, n):
        assert flat(Context(q, n)).slopes == (F(1, q**n - 1),) * n

    def test_text_round_trip(self):
        assert str(P1) == "newt q=2 n=2 slopes=2/3,1/6"
        assert newton.parse_polygon(str(P1)) == P1

    @given(polygons(max_n=4))
    def test_text_round_trip_random(self, P):
        assert newton.parse_polygon(str(P)) == P

    def test_evaluate(self):
        assert newton.evaluate(flat(C22), 2) == F(2, 3)
        with pytest.raises(plconvex.DomainError):
            newton.evaluate(flat(C22), 5)

    @given(polygons(max_n=4))
    def test_endpoints(self, P):
        assert newton.evaluate(P, 1) == 1
        assert newton.evaluate(P, P.q**P.n) == 0
        assert P.graph.is_convex()


class TestFromCoordinates:
    @pytest.mark.parametrize("v", [F(2, 3), F(1), F(7)])
    def test_flat_when_above_chord(self, v):
        assert newton.from_coordinates(C22, [v]) == flat(C22)

    def test_corner(self):
        assert newton.from_coordinates(C22, [F(1, 2)]).slopes == (F(1, 2), F(1, 4))

    def test_flat_n3(self):
        assert newton.from_coordinates(Context(2, 3), [F(1), F(1)]).slopes == (F(1, 7),) * 3

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            newton.from_coordinates(C22, [F(0)])


class TestHerbrand:
    def test_flat(self):
        eta = flat(C22).eta
        assert eta.slopes() == [4, 1]
        assert eta(F(1, 3)) == F(4, 3)

    def test_two_slopes(self):
        assert P1.eta(F(1, 6)) == F(2, 3)
        assert P1.eta(F(2, 3)) == F(5, 3)

    @given(polygons(max_n=4))
    def test_closed_form(self, P):
        assert P.eta == newton.eta_closed_form(P)
        assert P.eta(0) == 0

    @given(polygons(max_n=3, qs=(2,)), small_pos)
    def test_counting_function(self, P, s):
        # eta(s) = integral of #{x in H[pi] : v(x) >= t}, which is sum min(s, v(x))
        pts = torsion_points(P, 1).elements
        assert P.eta(s) == sum(min(s, valuation(P, x)) for x in pts)

    def test_level_two_by_enumeration(self):
        for P in (flat(C22), P1):
            pts = torsion_points(P, 2).elements
            f = newton.eta_iterate(P, 2)
            for s in (F(1, 50), F(1, 12), F(1, 6), F(1, 3), F(2, 3), F(3)):
                assert f(s) == sum(min(s, valuation(P, x)) for x in pts)


class TestIteration:
    def test_examples(self):
        assert lambda_iter(flat(C22), F(1, 3), 2) == F(1, 12)
        assert lambda_iter(P1, F(2, 3), 2) == F(1, 6)
        assert lambda_iter(P1, F(2, 3), 0) == INF
        assert lambda_iter(P1, F(2, 3), -3) == INF

    @given(polygons(max_n=4), small_pos, st.integers(1, 8))
    def test_hull_recipe(self, P, lam, k):
        assert lambda_iter(P, lam, k) == newton.lambda_iter_hull(P, lam, k)

    @given(polygons(max_n=4), small_pos)
    def test_small_arguments_divide(self, P, lam):
        lam = min(lam, P.slopes[-1])
        assert lambda_iter(P, lam, 2) == lam / P.q**P.n

    @given(polygons(max_n=4), small_pos)
    def test_eventually_geometric(self, P, lam):
        K = newton.geometric_from(P, lam)
        qn = P.q**P.n
        for k in range(K, K + 4):
            assert lambda_iter(P, lam, k + 1) == lambda_iter(P, lam, k) / qn
        if K > 1:
            assert lambda_iter(P, lam, K) != lambda_iter(P, lam, K - 1) / qn

    @given(polygons(max_n=3), small_pos, small_pos, st.integers(1, 6))
    def test_monotone(self, P, a, b, k):
        lo, hi = min(a, b), max(a, b)
        assert lambda_iter(P, lo, k) <= lambda_iter(P, hi, k)

    @given(polygons(max_n=3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(1, 4), st.integers(0, 4))
    def test_shift_preserves_order(self, P, i, j, a, b, c):
        # iteration counts start at 1: l^(0) = +inf ties with every other l^(0)
        i, j = min(i, P.n), min(j, P.n)
        x, y = newton.lambda_i(P, i, a), newton.lambda_i(P, j, b)
        if x >= y:
            assert newton.lambda_i(P, i, a + c) >= newton.lambda_i(P, j, b + c)

    def test_shift_fails_from_level_zero(self):
        P = NewtonPolygon(C22, (F(1, 2), F(1, 4)))
        assert newton.lambda_i(P, 2, 0) >= newton.lambda_i(P, 1, 0)
        assert not newton.lambda_i(P, 2, 1) >= newton.lambda_i(P, 1, 1)


class TestBarycenter:
    def test_examples(self):
        P0 = flat(C22)
        assert newton.barycenter([1, 0], [P0, P1]) == P0
        assert newton.barycenter([F(1, 2), F(1, 2)], [P0, P1]).slopes == (F(1, 2), F(1, 4))
        assert newton.barycenter([F(1, 3), F(2, 3)], [P1, P1]) == P1

    def test_mismatched_context(self):
        with pytest.raises(ValueError):
            newton.barycenter([F(1, 2), F(1, 2)], [flat(C22), flat(Context(3, 2))])

    @given(polygons(max_n=4), st.fractions(0, 1))
    def test_convexity(self, P, t):
        Q = flat(P.ctx)
        R = newton.barycenter([t, 1 - t], [P, Q])
        assert R.graph.is_convex()
