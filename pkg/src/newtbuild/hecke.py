"""Hecke operators ``(pi^-a_1, ..., pi^-a_n)`` on the space of Newton polygons.

The operator quotients by the subgroup generated by the points
``pi^(-a_i) e_i`` of an adapted basis.  Valuations of image points are
sums over the kernel; they are evaluated here by grouping kernel elements
by order profile, which turns every sum into a one-dimensional integral of
a product of step functions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from .building import SimplexB, Vec, pr_Q, root_pairs, simplex_vertices, vertex
from .newton import Context, NewtonPolygon, flat, lambda_i, lambda_iter
from .plconvex import ExtRat, is_inf
from .torsion_oracle import A, chamber_data


def _min_profile_sum(P: NewtonPolygon, base: ExtRat, free: Sequence[tuple[int, int]]) -> ExtRat:
    """``sum over 0 <= k_j <= a_j of prod A(k_j) * min(base, l_j^(k_j))``.

    ``free`` lists pairs ``(j, a_j)``.  Writing the minimum as
    ``int_0^inf [min >= t] dt`` the sum becomes ``int_0^base prod_j W_j(t) dt``
    with ``W_j(t) = sum of A(k) over k <= a_j with l_j^(k) >= t``, a step
    function of ``t``; the integral is evaluated exactly.
    """
    if is_inf(base):
        raise ValueError("the minimum needs a finite base value")
    q = P.q
    cuts = {Fraction(0), Fraction(base)}
    for j, a in free:
        for k in range(1, a + 1):
            v = lambda_i(P, j, k)
            if v < base:
                cuts.add(v)
    pts = sorted(cuts)
    total = Fraction(0)
    for t0, t1 in zip(pts, pts[1:]):
        prod = 1
        for j, a in free:
            # all k <= a with l_j^(k) >= t1 (step constant on (t0, t1])
            w = 0
            for k in range(a + 1):
                if lambda_i(P, j, k) >= t1:
                    w += A(k, q)
            prod *= w
        total += prod * (t1 - t0)
    return total


def _min_profile_sum_brute(P: NewtonPolygon, base: ExtRat, free: Sequence[tuple[int, int]]) -> ExtRat:
    q = P.q
    total = Fraction(0)
    for ks in itertools.product(*(range(a + 1) for _, a in free)):
        w = 1
        m = base
        for (j, _), k in zip(free, ks):
            w *= A(k, q)
            m = min(m, lambda_i(P, j, k))
        total += w * m
    return total


def point_valuation_formula(
    P: NewtonPolygon, a: Sequence[int], I: Sequence[int], orders: Sequence[int]
) -> ExtRat:
    """Valuation of the image of ``sum_{i in I} pi^(-orders_i) e_i`` under the
    quotient by ``<pi^(-a_i) e_i>``; requires ``orders_i > a_i`` on ``I``."""
    n = P.n
    if len(a) != n:
        raise ValueError("one exponent per basis vector")
    I = list(I)
    if not I or len(I) != len(orders) or len(set(I)) != len(I):
        raise ValueError("I must be a nonempty set of indices with one order each")
    for i, o in zip(I, orders):
        if not 1 <= i <= n:
            raise IndexError("index out of range")
        if o <= a[i - 1]:
            raise ValueError("orders must exceed the kernel exponents")
    base = min(lambda_i(P, i, o) for i, o in zip(I, orders))
    free = [(j, a[j - 1]) for j in range(1, n + 1) if j not in I]
    mult = P.q ** sum(a[i - 1] for i in I)
    return mult * _min_profile_sum(P, base, free)


def sort_permutation(P: NewtonPolygon, a: Sequence[int]) -> tuple[int, ...]:
    """``sigma`` (1-based tuple) ordering ``l_i^(a_i + 1)`` non-increasingly, ties by index.

    Where every ``a_i >= 1`` this is the order of ``l_i^(a_i)``, since the
    iteration is increasing; the shifted key also handles ``a_i = 0``, where
    ``l^(0) = +inf`` would put an index first regardless of its image.
    """
    idx = sorted(range(1, P.n + 1), key=lambda i: (-lambda_i(P, i, a[i - 1] + 1), i))
    return tuple(idx)


def apply(P: NewtonPolygon, a: Sequence[int]) -> tuple[NewtonPolygon, tuple[int, ...]]:
    """Image polygon and the permutation relating the adapted bases."""
    a = [int(x) for x in a]
    if len(a) != P.n or any(x < 0 for x in a):
        raise ValueError("Hecke index must be a non-negative n-vector")
    sigma = sort_permutation(P, a)
    slopes = tuple(point_valuation_formula(P, a, [s], [a[s - 1] + 1]) for s in sigma)
    return NewtonPolygon(P.ctx, slopes), sigma


def transported_lambda_iter(P: NewtonPolygon, a: Sequence[int], i: int, k: int) -> ExtRat:
    """Iterated slope of the image polygon through the kernel-sum formula;
    checked against direct iteration on the image."""
    if k < 1:
        raise ValueError("k must be at least 1")
    a = [int(x) for x in a]
    Pp, sigma = apply(P, a)
    si = sigma[i - 1]
    base = lambda_i(P, si, a[si - 1] + k)
    free = [(sigma[j - 1], a[sigma[j - 1] - 1]) for j in range(1, P.n + 1) if j != i]
    val = P.q ** a[si - 1] * _min_profile_sum(P, base, free)
    if val != lambda_iter(Pp, Pp.lam(i), k):
        raise AssertionError("transported iterate disagrees with the image polygon")
    return val


# -- vertex polygons -------------------------------------------------------


def _closed_form_vertex(ctx: Context, a: Sequence[int]) -> tuple[Fraction, ...]:
    q, n = ctx.q, ctx.n
    out = []
    for i in range(n):
        others = [a[j] for j in range(n) if j != i]
        s = Fraction(0)
        for ks in itertools.product(*(range(x + 1) for x in others)):
            w = 1
            for k in ks:
                w *= A(k, q)
            top = max([a[i] + 1, *ks])
            s += w * Fraction(1, q ** (n * (top - 1)))
        out.append(Fraction(q ** a[i], q**n - 1) * s)
    return tuple(out)


def vertex_polygon(ctx: Context, x: Sequence[object]) -> NewtonPolygon:
    """Polygon attached to a vertex of the closed quartier, computed three ways."""
    a = [int(c) for c in pr_Q(vertex(x))]
    if len(a) != ctx.n:
        raise ValueError("dimension mismatch")
    via_hecke, _ = apply(flat(ctx), a)
    closed = NewtonPolygon(ctx, _closed_form_vertex(ctx, a))
    if via_hecke != closed:
        raise AssertionError("vertex polygon: Hecke image and closed form differ")
    if not satisfies_vertex_relations(closed, a):
        raise AssertionError("vertex polygon fails its defining relations")
    return closed


def satisfies_vertex_relations(P: NewtonPolygon, a: Sequence[int]) -> bool:
    """``l_i^(a_j - a_i + 1) = l_j`` for all ``i < j`` (``a`` ascending)."""
    return all(lambda_i(P, i, a[j - 1] - a[i - 1] + 1) == P.lam(j) for i, j in root_pairs(P.n))


def vertex_from_relations(P: NewtonPolygon) -> Vec | None:
    """The vertex whose relations ``P`` satisfies, if any."""
    b, walls = chamber_data(P)
    if not all(walls.values()):
        return None
    a = [0]
    for i in range(1, P.n):
        a.append(a[-1] + b[(i, i + 1)])
    return vertex(a) if satisfies_vertex_relations(P, a) else None


# -- chambers --------------------------------------------------------------


def chamber_of(P: NewtonPolygon) -> tuple[SimplexB, dict[tuple[int, int], bool]]:
    """Chamber with ``l_i^(b+1) >= l_j > l_i^(b+2)`` and the tight walls."""
    b, walls = chamber_data(P)
    return SimplexB.from_dict(P.n, b), walls


def in_chamber(P: NewtonPolygon, S: SimplexB) -> bool:
    """Closed conditions ``l_i^(b+1) >= l_j >= l_i^(b+2)``."""
    return all(
        lambda_i(P, i, S[i, j] + 1) >= P.lam(j) >= lambda_i(P, i, S[i, j] + 2) for i, j in root_pairs(P.n)
    )


def chamber_vertex_polygons(ctx: Context, S: SimplexB) -> list[tuple[Vec, NewtonPolygon]]:
    return [(x, vertex_polygon(ctx, x)) for x in simplex_vertices(S)]


def monoid_compose_check(P: NewtonPolygon, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """A permutation ``sigma`` (1-based) with
    ``a.(b.P) = (a_sigma(1) + b_1, ..., a_sigma(n) + b_n).P``."""
    n = P.n
    lhs, _ = apply(apply(P, b)[0], a)
    candidates = list(itertools.permutations(range(1, n + 1)))
    ident = tuple(range(1, n + 1))
    ascending = all(x <= y for x, y in zip(b, b[1:]))
    if ascending:
        candidates.remove(ident)
        candidates.insert(0, ident)
    for sigma in candidates:
        c = [a[sigma[i] - 1] + b[i] for i in range(n)]
        if apply(P, c)[0] == lhs:
            if ascending and sigma != ident:
                raise AssertionError("identity should work for ascending b")
            return sigma
        if ascending:
            raise AssertionError("identity permutation fails for ascending b")
    raise AssertionError("no permutation realizes the composite")


def is_constant_index(a: Sequence[int]) -> bool:
    return len(set(a)) <= 1

