"""The piecewise-affine bijection ``psi`` from Newton polygons to the quartier.

``psi`` is pinned down by two facts: it sends the vertex polygon of a
vertex ``x`` to ``x``, and it is affine on each chamber of the polygon
space.  Both directions are therefore barycentric solves against vertex
polygons of one chamber.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .building import (
    Vec,
    alpha,
    canon,
    chamber_containing,
    dual_vertex,
    in_quartier,
    pr_Q,
    simplex_vertices,
    vertex,
    weyl_orbit_points,
)
from .hecke import apply, chamber_of, vertex_polygon
from .newton import Context, NewtonPolygon, barycenter, flat, lambda_i
from .plconvex import as_rat
from .torsion_oracle import hodge_tate_point as _norm_point
from .torsion_oracle import ram_simplex_vertices


class SingularSystem(ArithmeticError):
    """Raised when an exact linear system has no unique solution."""


def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Unique solution of a consistent (possibly over-determined) rational system."""
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    M = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    if any(M[i][-1] != 0 for i in range(r, m)):
        raise SingularSystem("inconsistent system")
    if len(piv_cols) != ncols:
        raise SingularSystem("system has no unique solution")
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        sol[c] = M[i][-1]
    return sol


def barycentric(target: Sequence[Fraction], points: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Weights ``t`` with ``sum t = 1`` and ``sum t_j points_j = target``."""
    k = len(points)
    dim = len(target)
    rows = [[Fraction(points[j][d]) for j in range(k)] for d in range(dim)] + [[Fraction(1)] * k]
    return solve_exact(rows, list(target) + [Fraction(1)])


def _combine(weights: Sequence[Fraction], pts: Sequence[Sequence[Fraction]]) -> Vec:
    n = len(pts[0])
    return canon(sum(w * Fraction(p[d]) for w, p in zip(weights, pts)) for d in range(n))


def psi(P: NewtonPolygon) -> Vec:
    """Point of the quartier attached to a polygon."""
    S, _ = chamber_of(P)
    verts = simplex_vertices(S)
    polys = [vertex_polygon(P.ctx, x) for x in verts]
    t = barycentric(P.slopes, [Q.slopes for Q in polys])
    if any(w < 0 for w in t):
        raise AssertionError("polygon lies outside the convex hull of its chamber's vertex polygons")
    return _combine(t, verts)


def psi_inverse(ctx: Context, x: Sequence[object]) -> NewtonPolygon:
    """Polygon attached to a point of the closed quartier."""
    c = canon(x)
    if len(c) != ctx.n:
        raise ValueError("dimension mismatch")
    if not in_quartier(c):
        raise ValueError("point lies outside the quartier")
    S = chamber_containing(c)
    verts = simplex_vertices(S)
    t = barycentric(c, verts)
    if any(w < 0 for w in t):
        raise AssertionError("point lies outside its chamber")
    pairs = [(w, v) for w, v in zip(t, verts) if w != 0]
    return barycenter([w for w, _ in pairs], [vertex_polygon(ctx, v) for _, v in pairs])


def canonical_subgroup_exists(P: NewtonPolygon, r: int, k: int) -> bool:
    """Whether the canonical subgroup of rank ``r`` and level ``k`` exists."""
    if not 1 <= r < P.n:
        raise IndexError("rank must lie in 1..n-1")
    if k < 1:
        raise ValueError("level must be at least 1")
    exists = lambda_i(P, r, k) > P.lam(r + 1)
    if exists != (alpha(r, r + 1, psi(P)) > k - 1):
        raise AssertionError("canonical subgroup criterion disagrees with the half-apartment test")
    return exists


def hecke_orbit(x: Sequence[object], bound: int) -> set[Vec]:
    """Quartier points of the affine Weyl orbit of ``x`` within the bound box."""
    c = vertex(x)
    if not in_quartier(c):
        raise ValueError("vertex lies outside the quartier")
    return {pr_Q(y) for y in weyl_orbit_points(c, bound)}


# -- Gross-Hopkins polytope ---------------------------------------------------


def omega(n: int, i: int) -> Vec:
    """Vertex ``(0, ..., 0, 1, ..., 1)`` with ``i`` zeros."""
    return vertex([0] * i + [1] * (n - i))


def gh_polygon(ctx: Context, subset: Sequence[int]) -> NewtonPolygon:
    """Polygon through ``(1, 1)``, ``(q^i, 1 - i/n)`` for ``i`` in the subset, and ``(q^n, 0)``."""
    q, n = ctx.q, ctx.n
    idx = [0] + sorted(subset) + [n]
    slopes = []
    for i0, i1 in zip(idx, idx[1:]):
        s = Fraction(i1 - i0, n) / (q**i1 - q**i0)
        slopes.extend([s] * (i1 - i0))
    return NewtonPolygon(ctx, tuple(slopes))


def gh_coefficients(ctx: Context, subset: Sequence[int]) -> list[Fraction]:
    """``[a_0, a_1, ..., a_r]`` from the closed formula."""
    q, n = ctx.q, ctx.n
    idx = [0] + sorted(subset) + [n]
    out = []
    for k in range(1, len(idx) - 1):
        i_prev, i_k, i_next = idx[k - 1], idx[k], idx[k + 1]
        left = Fraction(i_k - i_prev, q**i_k - q**i_prev)
        right = Fraction(i_next - i_k, q**i_next - q**i_k)
        out.append(Fraction(q**i_k, n) * (left - right))
    return [1 - sum(out)] + out


@dataclass(frozen=True)
class GHExtremal:
    subset: tuple[int, ...]
    polygon: NewtonPolygon
    coefficients: tuple[Fraction, ...]


def gh_polytope(ctx: Context) -> list[GHExtremal]:
    """The ``2^(n-1)`` extremal polygons with their barycentric coefficients,
    each checked against an independent linear solve."""
    n = ctx.n
    out = []
    for r in range(n):
        for A in itertools.combinations(range(1, n), r):
            P = gh_polygon(ctx, A)
            coeffs = gh_coefficients(ctx, A)
            basis = [flat(ctx)] + [vertex_polygon(ctx, omega(n, i)) for i in A]
            if barycenter(coeffs, basis) != P:
                raise AssertionError(f"coefficient formula fails for subset {A}")
            solved = solve_exact(
                [[B.slopes[d] for B in basis] for d in range(n)] + [[Fraction(1)] * len(basis)],
                list(P.slopes) + [Fraction(1)],
            )
            if solved != coeffs:
                raise AssertionError(f"linear solve disagrees for subset {A}")
            out.append(GHExtremal(tuple(A), P, tuple(coeffs)))
    return out


# -- fundamental domains -------------------------------------------------------

Ineq = tuple[tuple[Fraction, ...], Fraction]  # sum c_l t_l + c0 >= 0


def _rotate_ineq(ineq: Ineq, m: int) -> Ineq:
    """Inequality of the image ``sigma^m . D`` where ``sigma`` shifts labels by one."""
    coeffs, c0 = ineq
    n = len(coeffs)
    # t' = sigma^m t has t'_(l+m) = t_l, so t_l = t'_(l+m) and a condition on t
    # becomes the same condition read at shifted positions
    return tuple(coeffs[(l - m) % n] for l in range(n)), c0


def _satisfies(t: Sequence[Fraction], ineqs: Sequence[Ineq]) -> bool:
    return all(sum(c * x for c, x in zip(coeffs, t)) + c0 >= 0 for coeffs, c0 in ineqs)


def _simplex_ineqs(n: int) -> list[Ineq]:
    return [(tuple(Fraction(int(l == k)) for l in range(n)), Fraction(0)) for k in range(n)]


def _polytope_vertices(ineqs: Sequence[Ineq], n: int) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{t : sum t = 1, ineqs}`` by brute-force basis enumeration."""
    rows = list(ineqs)
    out = set()
    for combo in itertools.combinations(range(len(rows)), n - 1):
        A_rows = [list(rows[k][0]) for k in combo] + [[Fraction(1)] * n]
        b = [-rows[k][1] for k in combo] + [Fraction(1)]
        try:
            t = solve_exact(A_rows, b)
        except SingularSystem:
            continue
        if _satisfies(t, rows):
            out.add(tuple(t))
    return sorted(out)


def _affine_rank(pts: Sequence[Sequence[Fraction]]) -> int:
    if not pts:
        return -1
    base = pts[0]
    M = [[Fraction(a) - Fraction(b) for a, b in zip(p, base)] for p in pts[1:]]
    rank = 0
    cols = len(base)
    for c in range(cols):
        p = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class DomainReport:
    covers: bool
    boundary: dict[int, list[Ineq]]


def fundamental_domain_check(D: Sequence[Ineq], n: int) -> DomainReport:
    """Whether the rotations of ``D`` cover the fundamental chamber.

    Barycentric coordinates ``t_0, ..., t_(n-1)`` are indexed by vertex label;
    the rotation group shifts labels cyclically.  The hyperplanes of all
    rotated inequalities cut the chamber into cells; the union covers the
    chamber iff the centroid of every full-dimensional cell lies in some
    rotated copy (the copies are closed).
    """
    D = [(tuple(Fraction(as_rat(c)) for c in co), Fraction(as_rat(c0))) for co, c0 in D]
    if any(len(co) != n for co, _ in D):
        raise ValueError("each inequality needs one coefficient per vertex")
    copies = [[_rotate_ineq(ineq, m) for ineq in D] for m in range(n)]
    hyper = sorted({h for cp in copies for h in cp})
    base = _simplex_ineqs(n)
    covers = True
    for signs in itertools.product((1, -1), repeat=len(hyper)):
        cell = base + [(tuple(s * c for c in co), s * c0) for s, (co, c0) in zip(signs, hyper)]
        verts = _polytope_vertices(cell, n)
        if _affine_rank(verts) < n - 1:
            continue
        centroid = tuple(sum(v[d] for v in verts) / len(verts) for d in range(n))
        if not any(_satisfies(centroid, cp) for cp in copies):
            covers = False
            break
    boundary = {m: list(D) + copies[m] for m in range(1, n)}
    return DomainReport(covers, boundary)


# -- Hodge-Tate point -------------------------------------------------------------


def in_hull_of(x: Sequence[Fraction], verts: Sequence[Sequence[Fraction]]) -> bool:
    """Membership in the convex hull of affinely independent vertices (mod diagonal)."""
    vs = [canon(v) for v in verts]
    c = canon(x)
    # compare modulo the diagonal through differences with the first coordinate
    target = [c[d] - c[0] for d in range(len(c))]
    pts = [[v[d] - v[0] for d in range(len(v))] for v in vs]
    try:
        t = barycentric(target, pts)
    except SingularSystem:
        return False
    return all(w >= 0 for w in t)


def hodge_tate_point(P: NewtonPolygon) -> Vec:
    """Class of the Hodge-Tate norm, as the canonical vector of the dual basis norms.

    Its lattice exponents (the negated norms) span a point of the dual of
    the ramification simplex; this is asserted.
    """
    if P.n < 2:
        raise ValueError("needs n >= 2")
    c = _norm_point(P)
    dual_S = [dual_vertex(v) for v in ram_simplex_vertices(P)]
    if not in_hull_of([-x for x in c], dual_S):
        raise AssertionError("Hodge-Tate point lies outside the dual ramification simplex")
    return c


# -- isolation of the fundamental chamber --------------------------------------


def in_open_fundamental_region(P: NewtonPolygon) -> bool:
    """``l_1 / q^n < l_n``: the interior of the polygons over the fundamental chamber."""
    return P.slopes[0] / P.q**P.n < P.slopes[-1]


def is_rotation_index(a: Sequence[int]) -> bool:
    """Shape ``(1, ..., 1, 0, ..., 0)`` (including the zero vector)."""
    return all(x in (0, 1) for x in a) and list(a) == sorted(a, reverse=True)


def isolation_violations(P: NewtonPolygon, max_entry: int) -> list[tuple[int, ...]]:
    """Indices ``a`` with ``min(a) = 0``, entries at most ``max_entry`` and not a
    rotation shape, sending ``P`` from the open fundamental region back into it."""
    if not in_open_fundamental_region(P):
        raise ValueError("polygon must lie in the open fundamental region")
    out = []
    for a in itertools.product(range(max_entry + 1), repeat=P.n):
        if min(a) != 0 or is_rotation_index(a):
            continue
        if in_open_fundamental_region(apply(P, a)[0]):
            out.append(a)
    return out
