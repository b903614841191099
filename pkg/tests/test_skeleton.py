from __future__ import annotations

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import polygons, quartier_points, quartier_vertices

from newtbuild import skeleton as K
from newtbuild import torsion_oracle as T
from newtbuild.building import alpha, dual_vertex, in_quartier, pr_Q, root_pairs, vertex
from newtbuild.hecke import apply, vertex_polygon
from newtbuild.newton import Context, NewtonPolygon, barycenter, flat, lambda_i

C22 = Context(2, 2)
P0 = flat(C22)
P1 = NewtonPolygon(C22, (F(2, 3), F(1, 6)))


def V(*c):
    return tuple(F(x) for x in c)


class TestLinearAlgebra:
    def test_solve(self):
        assert K.solve_exact([[F(2), F(1)], [F(1), F(3)]], [F(3), F(5)]) == [F(4, 5), F(7, 5)]

    def test_overdetermined_consistent(self):
        assert K.solve_exact([[F(1)], [F(2)]], [F(3), F(6)]) == [F(3)]

    def test_inconsistent(self):
        with pytest.raises(K.SingularSystem):
            K.solve_exact([[F(1)], [F(2)]], [F(3), F(5)])

    def test_singular(self):
        with pytest.raises(K.SingularSystem):
            K.solve_exact([[F(1), F(1)], [F(2), F(2)]], [F(1), F(2)])

    @given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3), st.data())
    def test_random_systems(self, rows, data):
        x = data.draw(st.lists(st.fractions(-3, 3, max_denominator=5), min_size=3, max_size=3))
        rows = [[F(c) for c in r] for r in rows]
        rhs = [sum(c * y for c, y in zip(r, x)) for r in rows]
        try:
            sol = K.solve_exact(rows, rhs)
        except K.SingularSystem:
            return
        assert [sum(c * y for c, y in zip(r, sol)) for r in rows] == rhs


class TestPsi:
    def test_examples(self):
        assert K.psi(P0) == V(0, 0)
        assert K.psi(P1) == V(0, 1)
        assert K.psi(NewtonPolygon(C22, (F(1, 2), F(1, 4)))) == V(0, F(1, 2))

    def test_inverse_examples(self):
        assert K.psi_inverse(C22, (0, 1)) == P1
        assert K.psi_inverse(C22, (0, F(1, 2))).slopes == (F(1, 2), F(1, 4))

    def test_inverse_rejects(self):
        with pytest.raises(ValueError):
            K.psi_inverse(C22, (1, 0))
        with pytest.raises(ValueError):
            K.psi_inverse(C22, (0, 1, 2))

    @pytest.mark.parametrize("q", [2, 3])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_vertices_are_fixed(self, q, n):
        ctx = Context(q, n)
        for steps in itertools.product(range(3), repeat=n - 1):
            x = vertex(itertools.accumulate((0,) + steps))
            assert K.psi(vertex_polygon(ctx, x)) == x

    @given(polygons(max_n=4))
    @settings(max_examples=40)
    def test_round_trip_from_polygons(self, P):
        x = K.psi(P)
        assert in_quartier(x)
        assert K.psi_inverse(P.ctx, x) == P

    @given(st.integers(2, 4).flatmap(lambda n: st.tuples(st.just(n), quartier_points(n, top=6))), st.sampled_from([2, 3]))
    @settings(max_examples=40)
    def test_round_trip_from_points(self, nx, q):
        n, x = nx
        assert K.psi(K.psi_inverse(Context(q, n), x)) == tuple(c - x[0] for c in x)

    @given(polygons(max_n=3), st.data())
    @settings(max_examples=40)
    def test_hecke_equivariance(self, P, data):
        a = data.draw(st.lists(st.integers(0, 3), min_size=P.n, max_size=P.n))
        lhs = K.psi(apply(P, a)[0])
        rhs = pr_Q([F(s) + t for s, t in zip(a, K.psi(P))])
        assert lhs == rhs

    @given(polygons(max_n=3))
    @settings(max_examples=40)
    def test_walls_match_iterated_slopes(self, P):
        x = K.psi(P)
        for i, j in root_pairs(P.n):
            for b in range(5):
                assert (lambda_i(P, i, b + 1) == P.lam(j)) == (alpha(i, j, x) == b)


class TestCanonicalSubgroup:
    def test_examples(self):
        assert K.canonical_subgroup_exists(P1, 1, 1)
        assert not K.canonical_subgroup_exists(P1, 1, 2)
        assert not K.canonical_subgroup_exists(P0, 1, 1)

    def test_bad_arguments(self):
        with pytest.raises(IndexError):
            K.canonical_subgroup_exists(P1, 2, 1)
        with pytest.raises(ValueError):
            K.canonical_subgroup_exists(P1, 1, 0)

    @given(polygons(max_n=4), st.integers(1, 3), st.integers(1, 4))
    @settings(max_examples=40)
    def test_half_apartment(self, P, r, k):
        r = min(r, P.n - 1)
        assert K.canonical_subgroup_exists(P, r, k) == (alpha(r, r + 1, K.psi(P)) > k - 1)

    @pytest.mark.parametrize("P", [P1, NewtonPolygon(C22, (F(3, 4), F(1, 8)))])
    def test_highest_valuation_points_form_a_subgroup(self, P):
        # for k = 1, r = 1: the q^r points of largest valuation (with zero) are closed under addition
        pts = T.torsion_points(P, 1).elements
        ranked = sorted(pts, key=lambda x: T.valuation(P, x), reverse=True)
        top = ranked[: P.q]
        exists = T.valuation(P, top[-1]) > T.valuation(P, ranked[P.q])
        assert exists == K.canonical_subgroup_exists(P, 1, 1)
        if exists:
            assert set(top) == set(T.span_of_orders(P.q, [1, 0], 1).elements)


class TestOrbit:
    def test_example(self):
        assert K.hecke_orbit((0, 0), 1) == {V(0, 0), V(0, 1), V(0, 2)}

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            K.hecke_orbit((1, 0), 1)

    @given(st.integers(2, 3).flatmap(quartier_vertices), st.data())
    @settings(max_examples=20)
    def test_contains_images(self, x, data):
        # the orbit is closed under the Hecke action in the bound box
        orbit = K.hecke_orbit(x, 2)
        assert vertex(x) in orbit
        assert all(in_quartier(y) for y in orbit)
        n = len(x)
        a = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
        img = pr_Q([c + s for c, s in zip(x, a)])
        ctx = Context(2, n)
        assert K.psi(apply(vertex_polygon(ctx, x), a)[0]) == img


class TestGrossHopkins:
    def test_n2(self):
        ctx = C22
        assert K.gh_polygon(ctx, (1,)).slopes == (F(1, 2), F(1, 4))
        assert K.gh_coefficients(ctx, (1,)) == [F(1, 2), F(1, 2)]

    def test_n3_full_subset(self):
        ctx = Context(2, 3)
        P = K.gh_polygon(ctx, (1, 2))
        Q = barycenter([F(1, 3)] * 3, [flat(ctx), vertex_polygon(ctx, K.omega(3, 1)), vertex_polygon(ctx, K.omega(3, 2))])
        assert P == Q

    def test_n3_table(self):
        table = {
            (): ((F(1, 7),) * 3, (F(1),)),
            (1,): ((F(1, 3), F(1, 9), F(1, 9)), (F(5, 9), F(4, 9))),
            (2,): ((F(2, 9), F(2, 9), F(1, 12)), (F(4, 9), F(5, 9))),
            (1, 2): ((F(1, 3), F(1, 6), F(1, 12)), (F(1, 3),) * 3),
        }
        for g in K.gh_polytope(Context(2, 3)):
            slopes, coeffs = table[g.subset]
            assert g.polygon.slopes == slopes
            assert g.coefficients == coeffs

    @pytest.mark.parametrize("q", [2, 3])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_all_extremal_points(self, q, n):
        ext = K.gh_polytope(Context(q, n))
        assert len(ext) == 2 ** (n - 1)
        for g in ext:
            assert all(c >= 0 for c in g.coefficients)
            assert sum(g.coefficients) == 1


def ineq(coeffs, c0):
    return (tuple(F(c) for c in coeffs), F(c0))


class TestFundamentalDomain:
    def test_whole_chamber(self):
        assert K.fundamental_domain_check([], 3).covers

    def test_half_for_n2(self):
        assert K.fundamental_domain_check([ineq((1, -1), 0)], 2).covers

    def test_small_corner_does_not_cover(self):
        # t_0 >= 2/3 and its rotations leave the centre uncovered
        assert not K.fundamental_domain_check([ineq((1, 0, 0), F(-2, 3))], 3).covers

    def test_largest_coordinate_region_covers(self):
        D = [ineq((1, -1, 0), 0), ineq((1, 0, -1), 0)]
        report = K.fundamental_domain_check(D, 3)
        assert report.covers
        assert set(report.boundary) == {1, 2}

    def test_rotation_of_inequality(self):
        assert K._rotate_ineq(ineq((1, 2, 3), 4), 1) == ineq((3, 1, 2), 4)

    def test_bad_length(self):
        with pytest.raises(ValueError):
            K.fundamental_domain_check([ineq((1, 0), 0)], 3)


class TestHodgeTatePoint:
    def test_examples(self):
        assert K.hodge_tate_point(P0) == V(0, 0)
        assert K.hodge_tate_point(P1) == V(0, 1)

    @given(polygons(max_n=3))
    @settings(max_examples=30)
    def test_in_dual_simplex(self, P):
        c = K.hodge_tate_point(P)
        verts = [dual_vertex(v) for v in T.ram_simplex_vertices(P)]
        assert K.in_hull_of([-x for x in c], verts)

    def test_hull_membership(self):
        assert K.in_hull_of(V(0, F(1, 2)), [V(0, 0), V(0, 1)])
        assert not K.in_hull_of(V(0, 2), [V(0, 0), V(0, 1)])


class TestIsolation:
    def test_rotation_shapes(self):
        assert K.is_rotation_index((1, 1, 0))
        assert K.is_rotation_index((0, 0, 0))
        assert not K.is_rotation_index((0, 1, 0))

    def test_requires_open_region(self):
        with pytest.raises(ValueError):
            K.isolation_violations(P1, 2)

    @given(polygons(max_n=3))
    @settings(max_examples=30)
    def test_no_return(self, P):
        if not K.in_open_fundamental_region(P):
            return
        assert K.isolation_violations(P, 2) == []

    def test_rotations_do_return(self):
        P = NewtonPolygon(C22, (F(1, 2), F(1, 4)))
        assert K.in_open_fundamental_region(P)
        assert K.in_open_fundamental_region(apply(P, (1, 0))[0])
