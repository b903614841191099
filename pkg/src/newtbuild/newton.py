"""Normalized Newton polygons of multiplication by a uniformizer.

A polygon of height ``n`` over a residue field with ``q`` elements is the
convex graph on ``[1, q^n]`` joining ``(1, 1)`` to ``(q^n, 0)`` whose only
possible corners sit at the powers ``q^i``.  It is stored by its drop
rates ``slopes = (l_1 >= ... >= l_n > 0)`` on the pieces ``[q^(i-1), q^i]``;
the normalization ``sum (q^i - q^(i-1)) l_i = 1`` says the graph ends at 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import plconvex
from .plconvex import INF, ExtRat, PLFun, as_rat, fmt_rat, is_inf, parse_rat


@dataclass(frozen=True)
class Context:
    """Residue cardinality ``q`` and height ``n``."""

    q: int
    n: int

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ValueError("q must be at least 2")
        if self.n < 1:
            raise ValueError("n must be at least 1")

    def weight(self, i: int) -> int:
        """Length ``q^i - q^(i-1)`` of the i-th piece (1-based)."""
        return self.q**i - self.q ** (i - 1)


@dataclass(frozen=True)
class NewtonPolygon:
    ctx: Context
    slopes: tuple[Fraction, ...]
    _memo: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        s = tuple(Fraction(x) for x in self.slopes)
        object.__setattr__(self, "slopes", s)
        if len(s) != self.ctx.n:
            raise ValueError(f"expected {self.ctx.n} slopes, got {len(s)}")
        if any(x <= 0 for x in s):
            raise ValueError("slopes must be positive")
        if any(a < b for a, b in zip(s, s[1:])):
            raise ValueError("slopes must be non-increasing")
        total = sum(self.ctx.weight(i + 1) * x for i, x in enumerate(s))
        if total != 1:
            raise ValueError(f"weighted slope sum is {total}, not 1")

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def n(self) -> int:
        return self.ctx.n

    def lam(self, i: int) -> Fraction:
        """1-based slope accessor."""
        return self.slopes[i - 1]

    def vertex_values(self) -> list[Fraction]:
        """Ordinates at ``q^0, ..., q^n``."""
        out = [Fraction(1)]
        for i, x in enumerate(self.slopes, start=1):
            out.append(out[-1] - self.ctx.weight(i) * x)
        return out

    @cached_property
    def graph(self) -> PLFun:
        q = self.q
        return plconvex.from_points([(q**i, y) for i, y in enumerate(self.vertex_values())])

    @cached_property
    def eta(self) -> PLFun:
        return eta_pi_torsion(self)

    @cached_property
    def psi(self) -> PLFun:
        return plconvex.inverse(self.eta)

    def __str__(self) -> str:
        return format_polygon(self)


def format_polygon(P: NewtonPolygon) -> str:
    return f"newt q={P.q} n={P.n} slopes=" + ",".join(fmt_rat(x) for x in P.slopes)


_NEWT_RE = re.compile(r"^newt q=(\d+) n=(\d+) slopes=(\S+)$")


def parse_polygon(text: str) -> NewtonPolygon:
    m = _NEWT_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a polygon: {text!r}")
    ctx = Context(int(m.group(1)), int(m.group(2)))
    return NewtonPolygon(ctx, tuple(parse_rat(x) for x in m.group(3).split(",")))


def flat(ctx: Context) -> NewtonPolygon:
    """The polygon with a single segment, all slopes ``1/(q^n - 1)``."""
    return NewtonPolygon(ctx, (Fraction(1, ctx.q**ctx.n - 1),) * ctx.n)


def normalized(ctx: Context, raw: Sequence[object]) -> NewtonPolygon:
    """Scale a non-increasing positive vector onto the normalization."""
    r = sorted((Fraction(as_rat(x)) for x in raw), reverse=True)
    total = sum(ctx.weight(i + 1) * x for i, x in enumerate(r))
    return NewtonPolygon(ctx, tuple(x / total for x in r))


def from_coordinates(ctx: Context, v: Sequence[object]) -> NewtonPolygon:
    """Polygon of the lower hull of ``(1,1), (q^i, v_i), (q^n, 0)``."""
    vals = [as_rat(x) for x in v]
    if len(vals) != ctx.n - 1:
        raise ValueError(f"expected {ctx.n - 1} coordinate valuations")
    if any(not x > 0 for x in vals):
        raise ValueError("coordinate valuations must be positive")
    q, n = ctx.q, ctx.n
    pts = [(1, 1)] + [(q**i, x) for i, x in enumerate(vals, start=1)] + [(q**n, 0)]
    hull = plconvex.lower_convex_hull(pts)
    slopes = tuple(-(hull(q**i) - hull(q ** (i - 1))) / ctx.weight(i) for i in range(1, n + 1))
    return NewtonPolygon(ctx, slopes)


def evaluate(P: NewtonPolygon, t: object) -> Fraction:
    t_r = as_rat(t)
    if is_inf(t_r) or not 1 <= t_r <= P.q**P.n:
        raise plconvex.DomainError("polygon argument must lie in [1, q^n]")
    return P.graph(t_r)


def eta_pi_torsion(P: NewtonPolygon) -> PLFun:
    """Herbrand function of the uniformizer torsion, as the conjugate of the graph on s >= 0."""
    return plconvex.legendre_dual(P.graph, lo=0)


def eta_closed_form(P: NewtonPolygon) -> PLFun:
    """Same function from its slope description: ``q^i`` on ``[l_(i+1), l_i]``."""
    q, n = P.q, P.n
    cuts = [Fraction(0)] + list(reversed(P.slopes))
    pts = [(Fraction(0), Fraction(0))]
    for k in range(n):
        x0, x1 = cuts[k], cuts[k + 1]
        pts.append((x1, pts[-1][1] + q ** (n - k) * (x1 - x0)))
    return PLFun(Fraction(0), INF, tuple(_dedup(pts)), Fraction(1))


def _dedup(pts: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        if not out or p[0] != out[-1][0]:
            out.append(p)
    return out


def psi_step(P: NewtonPolygon, lam: ExtRat) -> ExtRat:
    """One application of the inverse Herbrand function."""
    if is_inf(lam):
        return INF
    return P.psi(lam)


def lambda_iter(P: NewtonPolygon, lam: ExtRat, k: int) -> ExtRat:
    """Iterated slope: ``+inf`` for ``k <= 0``, else ``Psi^(k-1)(lam)``."""
    if k <= 0 or is_inf(lam):
        return INF
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("slopes must be positive")
    key = (lam, k)
    memo = P._memo
    if key in memo:
        return memo[key]
    x = lam
    j = 1
    # reuse the longest cached prefix
    for jj in range(k - 1, 1, -1):
        if (lam, jj) in memo:
            x, j = memo[(lam, jj)], jj
            break
    while j < k:
        x = P.psi(x)
        j += 1
    memo[key] = x
    return x


def lambda_i(P: NewtonPolygon, i: int, k: int) -> ExtRat:
    """``l_i^(k)`` for the 1-based index ``i``."""
    return lambda_iter(P, P.slopes[i - 1], k)


def hull_step(P: NewtonPolygon, lam: ExtRat) -> ExtRat:
    """Largest slope of the hull of the graph together with the point ``(0, lam)``."""
    if is_inf(lam):
        return INF
    q = P.q
    return max((lam - y) / q**i for i, y in enumerate(P.vertex_values()))


def lambda_iter_hull(P: NewtonPolygon, lam: ExtRat, k: int) -> ExtRat:
    """Iterated slope through repeated hull constructions (independent path)."""
    if k <= 0:
        return INF
    x = lam
    for _ in range(k - 1):
        x = hull_step(P, x)
    return x


def geometric_from(P: NewtonPolygon, lam: Fraction) -> int:
    """Least ``K >= 1`` with ``lam^(k+1) = lam^(k) / q^n`` for every ``k >= K``."""
    qn = P.q**P.n
    bound = qn * P.slopes[-1]
    k = 1
    while lambda_iter(P, lam, k) > bound:
        k += 1
    # from here on the argument stays in the linear piece of eta near 0
    while k > 1 and lambda_iter(P, lam, k) == lambda_iter(P, lam, k - 1) / qn:
        k -= 1
    return k


def barycenter(weights: Sequence[object], polygons: Sequence[NewtonPolygon]) -> NewtonPolygon:
    """Slope-wise affine combination (the polygon space is convex)."""
    if len(weights) != len(polygons) or not polygons:
        raise ValueError("need one weight per polygon")
    ctx = polygons[0].ctx
    if any(P.ctx != ctx for P in polygons):
        raise ValueError("polygons live over different contexts")
    w = [Fraction(as_rat(x)) for x in weights]
    if any(x < 0 for x in w) or sum(w) != 1:
        raise ValueError("weights must be non-negative and sum to 1")
    slopes = tuple(sum(wj * P.slopes[i] for wj, P in zip(w, polygons)) for i in range(ctx.n))
    return NewtonPolygon(ctx, slopes)


def eta_iterate(P: NewtonPolygon, k: int) -> PLFun:
    """k-fold composite of the Herbrand function."""
    f = plconvex.identity(0)
    for _ in range(k):
        f = plconvex.compose(P.eta, f)
    return f
