"""Ball components of ``{x : v(f(x)) >= eps}`` from ultrametric root data.

Only the valuations ``v_i = v(alpha_i)`` and the mutual distances
``d_ij = v(alpha_i - alpha_j)`` of the roots of ``f`` matter, so the input
is that abstract data rather than a polynomial.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import plconvex
from .newton import NewtonPolygon, lambda_i
from .plconvex import INF, ExtRat, PLFun, as_rat, fmt_rat, is_inf, parse_rat
from .torsion_oracle import A


@dataclass(frozen=True)
class UltrametricRoots:
    """Valuations ``v[i]`` and distance matrix ``d[i][j]`` (``+inf`` on the diagonal)."""

    v: tuple[ExtRat, ...]
    d: tuple[tuple[ExtRat, ...], ...]

    def __post_init__(self) -> None:
        m = len(self.v)
        if m == 0:
            raise ValueError("need at least one root")
        if len(self.d) != m or any(len(r) != m for r in self.d):
            raise ValueError("distance matrix must be m x m")
        for i in range(m):
            if not is_inf(self.d[i][i]):
                raise ValueError("diagonal distances must be +inf")
            if not is_inf(self.v[i]) and self.v[i] < 0:
                raise ValueError("valuations must be non-negative")
        for i, j in itertools.combinations(range(m), 2):
            if self.d[i][j] != self.d[j][i]:
                raise ValueError("distance matrix must be symmetric")
            if is_inf(self.d[i][j]):
                raise ValueError("roots must be distinct")
        for i, j, k in itertools.permutations(range(m), 3):
            if self.d[i][j] < min(self.d[i][k], self.d[k][j]):
                raise ValueError(f"ultrametric inequality fails on ({i + 1}, {j + 1}, {k + 1})")
        for i, j in itertools.permutations(range(m), 2):
            vi, vj, dij = self.v[i], self.v[j], self.d[i][j]
            if vi < min(dij, vj) or (dij != vj and vi != min(dij, vj)):
                raise ValueError(f"valuations of roots {i + 1}, {j + 1} contradict their distance")

    @property
    def m(self) -> int:
        return len(self.v)

    def __str__(self) -> str:
        pairs = ";".join(
            f"{i + 1},{j + 1}:{fmt_rat(self.d[i][j])}" for i, j in itertools.combinations(range(self.m), 2)
        )
        return f"roots m={self.m} v=" + ";".join(fmt_rat(x) for x in self.v) + f" d=({pairs})"


_ROOTS_RE = re.compile(r"^roots m=(\d+) v=(\S+) d=\(([^)]*)\)$")


def parse_roots(text: str) -> UltrametricRoots:
    """Parse ``roots m=<int> v=<r;...> d=(i,j:r;...)``.

    An omitted pair with ``v_i != v_j`` gets ``min(v_i, v_j)``; an omitted
    pair of equal valuations is not determined and is rejected.
    """
    mt = _ROOTS_RE.match(text.strip())
    if not mt:
        raise ValueError(f"not root data: {text!r}")
    m = int(mt.group(1))
    v = [parse_rat(t) for t in mt.group(2).split(";")]
    if len(v) != m:
        raise ValueError(f"expected {m} valuations")
    d: list[list[ExtRat | None]] = [[INF if i == j else None for j in range(m)] for i in range(m)]
    body = mt.group(3).strip()
    for item in filter(None, (s.strip() for s in body.split(";"))):
        ij, _, r = item.partition(":")
        i, j = (int(t) - 1 for t in ij.split(","))
        if not (0 <= i < m and 0 <= j < m) or i == j:
            raise ValueError(f"bad pair {ij}")
        d[i][j] = d[j][i] = parse_rat(r)
    for i, j in itertools.combinations(range(m), 2):
        if d[i][j] is None:
            if v[i] == v[j]:
                raise ValueError(f"distance of roots {i + 1}, {j + 1} is not determined")
            d[i][j] = d[j][i] = min(v[i], v[j])
    return UltrametricRoots(tuple(v), tuple(tuple(r) for r in d))  # type: ignore[arg-type]


def newt_star(roots: UltrametricRoots, s: object) -> Fraction:
    """``inf { v(f(x)) : v(x) >= s } = sum_i min(s, v_i)``."""
    s = Fraction(as_rat(s))
    if s < 0:
        raise ValueError("s must be non-negative")
    return sum((min(s, x) for x in roots.v), Fraction(0))


def _star_of_values(values: Sequence[tuple[ExtRat, int]]) -> PLFun:
    """``s -> sum_j mult_j min(s, val_j)`` on ``[0, inf)``."""
    cuts = sorted({Fraction(0)} | {Fraction(x) for x, _ in values if not is_inf(x)})
    pts = [(c, sum((mult * min(c, x) for x, mult in values), Fraction(0))) for c in cuts]
    tail = sum(mult for x, mult in values if is_inf(x))
    return plconvex.from_points(pts, tail=tail)


def newt_star_fun(roots: UltrametricRoots) -> PLFun:
    return _star_of_values([(x, 1) for x in roots.v])


# -- components ---------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    members: tuple[int, ...]  # 0-based root indices
    radius: Fraction


def _outside_sum(roots: UltrametricRoots, i: int, cls: Sequence[int]) -> ExtRat:
    inside = set(cls)
    return sum((roots.d[i][j] for j in range(roots.m) if j not in inside), Fraction(0))


def _class_threshold(roots: UltrametricRoots, eps: Fraction, cls: Sequence[int]) -> Fraction:
    ts = {(eps - _outside_sum(roots, i, cls)) / len(cls) for i in cls}
    if len(ts) != 1:
        raise AssertionError("refinement threshold is not constant on a class")
    return ts.pop()


def ball_components(roots: UltrametricRoots, eps: object) -> list[Component]:
    """Classes of the limit of the threshold refinement, with their radii.

    Start from the full relation; split each class by
    ``d_ij >= (eps - sum_(j' outside [i]) d_ij') / |[i]|`` until nothing
    changes.  The component around a class is the closed ball of the
    returned radius.
    """
    eps = Fraction(as_rat(eps))
    if eps < 0:
        raise ValueError("eps must be non-negative")
    classes = [tuple(range(roots.m))]
    while True:
        new = []
        for cls in classes:
            t = _class_threshold(roots, eps, cls)
            rest = list(cls)
            while rest:
                i = rest[0]
                part = tuple(j for j in rest if j == i or roots.d[i][j] >= t)
                for j in part:
                    if any(roots.d[j][k] < t for k in part if k != j):
                        raise AssertionError("threshold relation is not transitive")
                new.append(part)
                rest = [j for j in rest if j not in part]
        if new == classes:
            break
        classes = new
    out = []
    for cls in classes:
        r = _class_threshold(roots, eps, cls)
        if r < 0:
            raise AssertionError("negative radius")
        out.append(Component(cls, r))
    return out


def _check_clique(roots: UltrametricRoots, comps: Sequence[Component], eps: Fraction) -> None:
    """Each class is the set of roots in its ball, where ``v(f)`` reaches ``eps`` on the boundary."""
    for c in comps:
        center = c.members[0]
        ball = tuple(j for j in range(roots.m) if j == center or roots.d[center][j] >= c.radius)
        if ball != c.members:
            raise AssertionError("class differs from the roots in its ball")
        boundary = sum((min(c.radius, roots.d[center][j]) for j in range(roots.m)), Fraction(0))
        if boundary != eps:
            raise AssertionError("boundary of the ball does not reach eps")


# -- the Herbrand function seen from the zero root -----------------------------------


def _zero_index(roots: UltrametricRoots, zero: int) -> int:
    if not 0 <= zero < roots.m:
        raise IndexError("distinguished root out of range")
    if not is_inf(roots.v[zero]):
        raise ValueError("the distinguished root must have valuation +inf")
    if any(roots.d[zero][j] != roots.v[j] for j in range(roots.m) if j != zero):
        raise ValueError("distances to the zero root must equal the valuations")
    return zero


def herbrand_eta_from_roots(roots: UltrametricRoots, zero: int = 0) -> PLFun:
    """``s -> sum_i min(s, v_i)``, the zero root contributing ``s``."""
    _zero_index(roots, zero)
    return newt_star_fun(roots)


def herbrand_psi_from_roots(roots: UltrametricRoots, zero: int = 0) -> PLFun:
    return plconvex.inverse(herbrand_eta_from_roots(roots, zero))


def component_of_zero(roots: UltrametricRoots, eps: object, zero: int = 0) -> Fraction:
    """Radius of the component through the zero root, checked against ``psi(eps)``."""
    eps = Fraction(as_rat(eps))
    z = _zero_index(roots, zero)
    comps = ball_components(roots, eps)
    _check_clique(roots, comps, eps)
    r = next(c.radius for c in comps if z in c.members)
    if r != herbrand_psi_from_roots(roots, zero)(eps):
        raise AssertionError("component radius differs from the inverse Herbrand function")
    return r


def random_roots(rng: random.Random, m: int, depth: int = 4, branching: int = 3) -> UltrametricRoots:
    """Random distinct roots of a tree of depth ``depth``; root 0 is the zero root.

    A root is a digit string; two roots first differing at position ``k``
    are at distance ``h_k`` for increasing rational heights ``h``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if m > branching**depth:
        raise ValueError("not enough leaves for distinct roots")
    h, acc = [], Fraction(0)
    for _ in range(depth):
        acc += Fraction(rng.randint(1, 9), rng.randint(1, 6))
        h.append(acc)
    words = {(0,) * depth}
    while len(words) < m:
        words.add(tuple(rng.randrange(branching) for _ in range(depth)))
    ws = [(0,) * depth] + sorted(words - {(0,) * depth})

    def dist(a: tuple[int, ...], b: tuple[int, ...]) -> ExtRat:
        for k, (x, y) in enumerate(zip(a, b)):
            if x != y:
                return h[k]
        return INF

    d = tuple(tuple(dist(a, b) for b in ws) for a in ws)
    return UltrametricRoots(tuple(d[0]), d)


# -- composition of Newt* ------------------------------------------------------------


def torsion_star(P: NewtonPolygon, k: int) -> PLFun:
    """``Newt*`` of ``pi^k``: ``s -> sum over H[pi^k] of min(s, v(x))`` by order profiles."""
    if k < 1:
        raise ValueError("k must be positive")
    q, n = P.q, P.n
    values: dict[ExtRat, int] = {}
    for prof in itertools.product(range(k + 1), repeat=n):
        count = 1
        for c in prof:
            count *= A(c, q)
        val = min(lambda_i(P, j, c) for j, c in enumerate(prof, start=1))
        values[val] = values.get(val, 0) + count
    return _star_of_values(list(values.items()))


def compose_star_check(P: NewtonPolygon, j: int = 1, k: int = 1) -> bool:
    """Whether ``Newt*`` of ``pi^(j+k)`` is the composite of those of ``pi^j`` and ``pi^k``."""
    return plconvex.compose(torsion_star(P, j), torsion_star(P, k)) == torsion_star(P, j + k)
