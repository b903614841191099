"""Iwahori-level skeleton: the open simplex of valuation vectors.

A point ``v`` of the simplex ``{v_i > 0, sum v_i = 1}`` records the degrees
of a cyclic chain of isogenies of degree ``q``.  Its polygon is the
conjugate of a composite of elementary Herbrand functions; the symmetric
group permutes the pieces ``sigma.Q`` that cover the simplex.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from . import plconvex
from .building import Vec, canon, pr_Q
from .newton import Context, NewtonPolygon
from .plconvex import PLFun, as_rat
from .skeleton import SingularSystem, psi, solve_exact

Perm = tuple[int, ...]  # 1-based images


def delta_point(v: Sequence[object]) -> tuple[Fraction, ...]:
    """Validate a point of the open simplex."""
    out = tuple(Fraction(as_rat(x)) for x in v)
    if not out:
        raise ValueError("empty vector")
    if any(not 0 < x < 1 for x in out) and len(out) > 1:
        raise ValueError("coordinates must lie in (0, 1)")
    if sum(out) != 1:
        raise ValueError("coordinates must sum to 1")
    return out


def eta_lambda(q: int, lam: object) -> PLFun:
    """``x -> q x`` on ``[0, lam]`` and ``x -> x - lam + q lam`` beyond."""
    lam = Fraction(as_rat(lam))
    if not 0 < lam < Fraction(1, q - 1):
        raise ValueError("lambda must lie in (0, 1/(q-1))")
    return plconvex.from_points([(0, 0), (lam, q * lam)], tail=1)


def eta_of_delta(q: int, v: Sequence[object]) -> PLFun:
    """Composite Herbrand function of the chain, first step innermost."""
    v = delta_point(v)
    f = plconvex.identity(0)
    for x in v:
        f = plconvex.compose(eta_lambda(q, x / (q - 1)), f)
    return f


def newton_of_delta(ctx: Context, v: Sequence[object]) -> NewtonPolygon:
    """Polygon read off the conjugate of the composite Herbrand function."""
    v = delta_point(v)
    if len(v) != ctx.n:
        raise ValueError("dimension mismatch")
    q, n = ctx.q, ctx.n
    g = plconvex.legendre_dual_concave(eta_of_delta(q, v), 1, q**n)
    vals = [g(q**i) for i in range(n + 1)]
    slopes = tuple((vals[i - 1] - vals[i]) / ctx.weight(i) for i in range(1, n + 1))
    P = NewtonPolygon(ctx, slopes)
    if P.graph != g:
        raise AssertionError("conjugate has corners away from the powers of q")
    return P


def slope_formula(ctx: Context, v: Sequence[object]) -> NewtonPolygon:
    """``l_i = v_i / (q^i - q^(i-1))``, valid on the fundamental piece."""
    v = delta_point(v)
    return NewtonPolygon(ctx, tuple(x / ctx.weight(i) for i, x in enumerate(v, start=1)))


def delta_of_polygon(P: NewtonPolygon) -> tuple[Fraction, ...]:
    """Inverse of the slope formula."""
    return tuple(P.ctx.weight(i) * x for i, x in enumerate(P.slopes, start=1))


def in_Q_delta(q: int, v: Sequence[object]) -> bool:
    """``v_(i+1) <= q v_i``, i.e. the slope formula gives a non-increasing vector."""
    v = delta_point(v)
    return all(b <= q * a for a, b in zip(v, v[1:]))


def _check_perm(sigma: Sequence[int], n: int) -> Perm:
    s = tuple(int(x) for x in sigma)
    if sorted(s) != list(range(1, n + 1)):
        raise ValueError("not a permutation of 1..n")
    return s


def _sigma_linear(q: int, sigma: Perm, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(v)

    def partial(i: int) -> Fraction:
        js = sorted(sigma[:i])
        return sum((v[j - 1] * Fraction(q ** (k - 1), q ** (j - 1)) for k, j in enumerate(js, start=1)), Fraction(0))

    return tuple(partial(i) - partial(i - 1) for i in range(1, n + 1))


def sigma_act(q: int, sigma: Sequence[int], v: Sequence[object]) -> tuple[Fraction, ...]:
    """Affine map from the fundamental piece onto ``sigma.Q``.

    ``v'_i = S_i - S_(i-1)`` where ``S_i = sum_k v_(j_k) q^(k-1) / q^(j_k - 1)``
    over the sorted images ``j_1 < ... < j_i`` of ``1..i``.
    """
    v = delta_point(v)
    s = _check_perm(sigma, len(v))
    if not in_Q_delta(q, v):
        raise ValueError("point lies outside the fundamental piece")
    out = _sigma_linear(q, s, v)
    if sum(out) != 1:
        raise AssertionError("image does not sum to 1")
    return out


def _sigma_inverse(q: int, sigma: Perm, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(v)
    basis = [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    cols = [_sigma_linear(q, sigma, e) for e in basis]
    rows = [[cols[j][i] for j in range(n)] for i in range(n)]
    return tuple(solve_exact(rows, list(v)))


def delta_decomposition(q: int, v: Sequence[object]) -> tuple[Perm, tuple[Fraction, ...]]:
    """``(sigma, w)`` with ``w`` in the fundamental piece and ``sigma_act(sigma, w) = v``;
    the first permutation in lexicographic order that works."""
    v = delta_point(v)
    n = len(v)
    if n > 6:
        raise ValueError("decomposition search is capped at n = 6")
    for sigma in itertools.permutations(range(1, n + 1)):
        try:
            w = _sigma_inverse(q, sigma, v)
        except SingularSystem:
            raise AssertionError("the piece map is not invertible") from None
        if all(x > 0 for x in w) and in_Q_delta(q, w):
            return sigma, w
    raise AssertionError("no piece contains the point")


def delta_to_apartment(ctx: Context, v: Sequence[object]) -> Vec:
    """Apartment point of ``v``: the quartier point of its fundamental
    representative, moved to the chamber of the piece by the coordinate
    permutation ``x -> (x_sigma(1), ..., x_sigma(n))``."""
    sigma, w = delta_decomposition(ctx.q, v)
    x = psi(newton_of_delta(ctx, w))
    y = canon(x[s - 1] for s in sigma)
    if pr_Q(y) != x:
        raise AssertionError("apartment point does not project onto the quartier point")
    return y
