from __future__ import annotations

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import delta_points

from newtbuild import iwahori as I
from newtbuild.building import in_quartier, pr_Q
from newtbuild.newton import Context, NewtonPolygon, flat
from newtbuild.skeleton import psi

C22 = Context(2, 2)

points = st.integers(2, 4).flatmap(delta_points)


class TestElementary:
    def test_eta_lambda(self):
        f = I.eta_lambda(2, F(1, 6))
        assert f(F(1, 6)) == F(1, 3)
        assert f(1) == F(7, 6)

    def test_eta_lambda_range(self):
        with pytest.raises(ValueError):
            I.eta_lambda(2, 1)

    @pytest.mark.parametrize("bad", [(F(1, 2), F(1, 3)), (0, 1), (F(3, 2), F(-1, 2)), ()])
    def test_delta_point_rejects(self, bad):
        with pytest.raises(ValueError):
            I.delta_point(bad)


class TestPolygons:
    def test_flat(self):
        # the flat polygon of height 2 sits at v = (1/3, 2/3)
        assert I.newton_of_delta(C22, (F(1, 3), F(2, 3))) == flat(C22)

    def test_corner(self):
        assert I.newton_of_delta(C22, (F(2, 3), F(1, 3))) == NewtonPolygon(C22, (F(2, 3), F(1, 6)))

    def test_fundamental_piece(self):
        assert I.in_Q_delta(2, (F(2, 3), F(1, 3)))
        assert not I.in_Q_delta(2, (F(1, 5), F(4, 5)))

    @given(points, st.sampled_from([2, 3]))
    @settings(max_examples=40)
    def test_slope_formula_on_fundamental_piece(self, v, q):
        if not I.in_Q_delta(q, v):
            return
        ctx = Context(q, len(v))
        assert I.slope_formula(ctx, v) == I.newton_of_delta(ctx, v)
        assert I.delta_of_polygon(I.slope_formula(ctx, v)) == v

    @given(points, st.sampled_from([2, 3]))
    @settings(max_examples=40)
    def test_conjugate_is_the_composite(self, v, q):
        # independent route: P(x) = sup_s (eta(s) - s x), attained at a corner since the tail slope is 1
        ctx = Context(q, len(v))
        eta = I.eta_of_delta(q, v)
        P = I.newton_of_delta(ctx, v)
        for i in range(ctx.n + 1):
            x = q**i
            direct = max(eta(s) - s * x for s in eta.xs)
            assert P.graph(x) == direct


class TestPieces:
    def test_sigma_example(self):
        assert I.sigma_act(2, (2, 1), (F(2, 3), F(1, 3))) == (F(1, 6), F(5, 6))

    def test_sigma_identity(self):
        v = (F(2, 3), F(1, 3))
        assert I.sigma_act(2, (1, 2), v) == v

    def test_sigma_rejects(self):
        with pytest.raises(ValueError):
            I.sigma_act(2, (1, 1), (F(2, 3), F(1, 3)))
        with pytest.raises(ValueError):
            I.sigma_act(2, (1, 2), (F(1, 5), F(4, 5)))

    @given(points, st.sampled_from([2, 3]))
    @settings(max_examples=40)
    def test_decomposition_round_trip(self, v, q):
        sigma, w = I.delta_decomposition(q, v)
        assert I.in_Q_delta(q, w)
        assert I.sigma_act(q, sigma, w) == v

    @given(points, st.sampled_from([2, 3]))
    @settings(max_examples=40)
    def test_pieces_share_the_polygon(self, v, q):
        ctx = Context(q, len(v))
        _, w = I.delta_decomposition(q, v)
        assert I.newton_of_delta(ctx, v) == I.newton_of_delta(ctx, w)

    @pytest.mark.parametrize("q", [2, 3])
    def test_pieces_cover_a_grid(self, q):
        N = 12
        for a, b in itertools.product(range(1, N), repeat=2):
            if a + b < N:
                v = (F(a, N), F(b, N), F(N - a - b, N))
                sigma, w = I.delta_decomposition(q, v)
                assert I.sigma_act(q, sigma, w) == v

    def test_cap(self):
        with pytest.raises(ValueError):
            I.delta_decomposition(2, (F(1, 7),) * 7)


class TestApartment:
    @given(points, st.sampled_from([2, 3]))
    @settings(max_examples=40)
    def test_projection(self, v, q):
        ctx = Context(q, len(v))
        y = I.delta_to_apartment(ctx, v)
        assert pr_Q(y) == psi(I.newton_of_delta(ctx, v))

    def test_fundamental_piece_lands_in_quartier(self):
        y = I.delta_to_apartment(C22, (F(2, 3), F(1, 3)))
        assert in_quartier(y)
        assert y == psi(NewtonPolygon(C22, (F(2, 3), F(1, 6))))

    def test_other_piece_lands_outside(self):
        y = I.delta_to_apartment(C22, (F(1, 6), F(5, 6)))
        assert not in_quartier(y)
        assert pr_Q(y) == (0, 1)
