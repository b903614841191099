"""Combinatorics of the standard apartment of the building of PGL_n.

A vertex is the homothety class of the lattice ``<pi^c_1 e_1, ..., pi^c_n e_n>``
and is stored by its exponent vector modulo the diagonal, normalized to
``min(c) = 0``.  Points of the geometric realization use rational vectors
with the same normalization.  Roots are ``alpha_ij(c) = c_j - c_i``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .plconvex import as_rat, fmt_rat, parse_rat

Vec = tuple[Fraction, ...]


def canon(c: Iterable[object]) -> Vec:
    """Representative with minimum coordinate 0."""
    v = tuple(Fraction(as_rat(x)) for x in c)
    if not v:
        raise ValueError("empty coordinate vector")
    m = min(v)
    return tuple(x - m for x in v)


def vertex(c: Iterable[object]) -> Vec:
    """Canonical vertex; rejects non-integral exponents."""
    v = canon(c)
    if any(x.denominator != 1 for x in v):
        raise ValueError("vertex exponents must be integers")
    return v


def is_vertex(x: Sequence[Fraction]) -> bool:
    return all(Fraction(c).denominator == 1 for c in x)


def alpha(i: int, j: int, x: Sequence[object]) -> Fraction:
    """Root value ``c_j - c_i`` (1-based indices)."""
    n = len(x)
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise IndexError(f"bad root indices ({i}, {j}) for n={n}")
    return Fraction(as_rat(x[j - 1])) - Fraction(as_rat(x[i - 1]))


def root_pairs(n: int) -> list[tuple[int, int]]:
    """Positive roots ``(i, j)``, ``i < j``, in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def format_vertex(x: Sequence[Fraction], tag: str = "vtx") -> str:
    return f"{tag} " + ",".join(fmt_rat(c) for c in x)


def parse_vector(text: str) -> Vec:
    text = text.strip()
    for tag in ("vtx ", "pt "):
        if text.startswith(tag):
            text = text[len(tag) :]
    return tuple(Fraction(parse_rat(t)) for t in text.split(","))


# -- simplices -----------------------------------------------------------


@dataclass(frozen=True)
class SimplexB:
    """Maximal simplex given by its integer root data ``b[(i, j)]``, ``i < j``."""

    n: int
    b: tuple[int, ...]  # lexicographic (i, j) order

    def __post_init__(self) -> None:
        pairs = root_pairs(self.n)
        if len(self.b) != len(pairs):
            raise ValueError(f"expected {len(pairs)} entries for n={self.n}")
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        for i, j, k in itertools.combinations(range(1, self.n + 1), 3):
            bik, bij, bjk = self[i, k], self[i, j], self[j, k]
            if bik not in (bij + bjk, bij + bjk + 1):
                raise ValueError(f"b_{i}{k} must be b_{i}{j}+b_{j}{k} or one more")

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.b[root_pairs(self.n).index((i, j))]

    @classmethod
    def from_dict(cls, n: int, b: dict[tuple[int, int], int]) -> "SimplexB":
        return cls(n, tuple(b[p] for p in root_pairs(n)))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(zip(root_pairs(self.n), self.b))

    def __str__(self) -> str:
        return f"simplexB n={self.n} b=(" + ",".join(str(x) for x in self.b) + ")"


_SIMPLEX_RE = re.compile(r"^simplexB n=(\d+) b=\(([^)]*)\)$")


def parse_simplex(text: str) -> SimplexB:
    m = _SIMPLEX_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a simplex: {text!r}")
    body = m.group(2).strip()
    return SimplexB(int(m.group(1)), tuple(int(t) for t in body.split(",")) if body else ())


def simplex_vertices(S: SimplexB, restrict_to_Q: bool = False) -> list[Vec]:
    """Vertices ``x`` with ``alpha_ij(x) in {b_ij, b_ij + 1}`` for all ``i < j``.

    Each vertex is determined by the consecutive values ``alpha_{i,i+1}``;
    the list is sorted.
    """
    n = S.n
    out = []
    for bits in itertools.product((0, 1), repeat=n - 1):
        c = [0]
        for i in range(1, n):
            c.append(c[-1] + S[i, i + 1] + bits[i - 1])
        if all(S[i, j] <= c[j - 1] - c[i - 1] <= S[i, j] + 1 for i, j in root_pairs(n)):
            out.append(vertex(c))
    if len(out) != n:
        raise AssertionError(f"simplex has {len(out)} vertices instead of {n}")
    if restrict_to_Q:
        out = [x for x in out if in_quartier(x)]
    return sorted(out)


def b_of_simplex(vertices: Iterable[Sequence[object]]) -> SimplexB:
    """Root data ``b_ij = min alpha_ij`` over the vertices; checks maximality."""
    vs = [vertex(v) for v in vertices]
    if not vs:
        raise ValueError("empty vertex set")
    n = len(vs[0])
    S = SimplexB.from_dict(n, {(i, j): int(min(alpha(i, j, v) for v in vs)) for i, j in root_pairs(n)})
    if sorted(set(vs)) != simplex_vertices(S):
        raise ValueError("vertices do not form a maximal simplex")
    return S


def in_closed_simplex(x: Sequence[object], S: SimplexB) -> bool:
    """Membership of a point in the geometric realization of ``S``."""
    return all(S[i, j] <= alpha(i, j, x) <= S[i, j] + 1 for i, j in root_pairs(S.n))


def chamber_containing(x: Sequence[object]) -> SimplexB:
    """A maximal simplex whose realization contains the point ``x``.

    ``b_ij = floor(alpha_ij(x))`` is the chamber of the perturbed point
    ``x + e*(1, 2, ..., n)`` for small ``e > 0``, hence valid, and its
    closure contains ``x``.
    """
    n = len(x)
    b = {}
    for i, j in root_pairs(n):
        a = alpha(i, j, x)
        b[(i, j)] = a.numerator // a.denominator
    S = SimplexB.from_dict(n, b)
    assert in_closed_simplex(x, S)
    return S


# -- quartier, translations, duality ---------------------------------------


def in_quartier(x: Sequence[object]) -> bool:
    v = [Fraction(as_rat(t)) for t in x]
    return all(a <= b for a, b in zip(v, v[1:]))


def pr_Q(x: Sequence[object]) -> Vec:
    """Sorted canonical representative (the Cartan projection)."""
    return canon(sorted(Fraction(as_rat(t)) for t in x))


def translate(a: Sequence[int], x: Sequence[object]) -> Vec:
    if len(a) != len(x):
        raise ValueError("dimension mismatch")
    return canon(Fraction(as_rat(c)) + int(t) for c, t in zip(x, a))


def permute(sigma: Sequence[int], x: Sequence[object]) -> Vec:
    """Coordinate permutation ``y_i = x_{sigma(i)}`` (0-based sigma)."""
    return canon(x[s] for s in sigma)


def dual_vertex(x: Sequence[object]) -> Vec:
    """Class of the dual lattice: exponents negated."""
    return canon(-Fraction(as_rat(c)) for c in x)


def label(x: Sequence[object], origin: Sequence[object] | None = None) -> int:
    """Type of a vertex relative to ``origin``: index difference mod n."""
    n = len(x)
    o = origin if origin is not None else (0,) * n
    d = sum(Fraction(as_rat(c)) for c in x) - sum(Fraction(as_rat(c)) for c in o)
    if d.denominator != 1:
        raise ValueError("labels are defined on vertices only")
    return int(d) % n


def rotation_group(S: SimplexB) -> list[dict[Vec, Vec]]:
    """Affine Weyl elements stabilizing the chamber, as vertex maps.

    The generator is the element raising every label by one, found by
    searching permutations composed with translations; elements are listed
    as its powers.
    """
    verts = simplex_vertices(S)
    n = S.n
    if len(set(verts)) != n:
        raise ValueError("not a chamber")
    vset = set(verts)
    # search over W_aff elements: permutation composed with translation
    for perm in itertools.permutations(range(n)):
        for shift in _shift_candidates(verts, perm):
            g = {v: translate(shift, permute(perm, v)) for v in verts}
            if set(g.values()) != vset:
                continue
            if all(label(g[v]) == (label(v) + 1) % n for v in verts):
                return _powers(g, n)
    raise AssertionError("no label-raising rotation found")


def _shift_candidates(verts: list[Vec], perm: Sequence[int]) -> Iterable[tuple[int, ...]]:
    n = len(perm)
    base = permute(perm, verts[0])
    seen = set()
    for target in verts:
        d = tuple(int(t - b) for t, b in zip(target, base))
        for extra in itertools.product((0, 1), repeat=n):
            cand = tuple(x + e for x, e in zip(d, extra))
            if cand not in seen:
                seen.add(cand)
                yield cand


def _powers(g: dict[Vec, Vec], n: int) -> list[dict[Vec, Vec]]:
    out = [{v: v for v in g}]
    for _ in range(n - 1):
        prev = out[-1]
        out.append({v: g[prev[v]] for v in g})
    return out


# -- joins, meets, enclosures --------------------------------------------


def _shift_range(x: Vec, y: Vec) -> range:
    lo = int(min(y) - max(x)) - 1
    hi = int(max(y) - min(x)) + 1
    return range(lo, hi + 1)


def join(x: Sequence[object], y: Sequence[object]) -> set[Vec]:
    """Classes of sums of representatives: coordinate-wise minima of shifted exponents."""
    xv, yv = vertex(x), vertex(y)
    return {vertex(min(a + t, b) for a, b in zip(xv, yv)) for t in _shift_range(xv, yv)}


def meet(x: Sequence[object], y: Sequence[object]) -> set[Vec]:
    """Classes of intersections of representatives: coordinate-wise maxima."""
    xv, yv = vertex(x), vertex(y)
    return {vertex(max(a + t, b) for a, b in zip(xv, yv)) for t in _shift_range(xv, yv)}


def enclos(M: Iterable[Sequence[object]]) -> set[Vec]:
    """Intersection of the half-apartments ``alpha_ij >= k`` containing ``M``."""
    pts = [vertex(m) for m in M]
    if not pts:
        raise ValueError("empty vertex set")
    n = len(pts[0])
    bounds = {
        (i, j): (min(alpha(i, j, p) for p in pts), max(alpha(i, j, p) for p in pts))
        for i, j in root_pairs(n)
    }
    ranges = [range(int(bounds[(i, i + 1)][0]), int(bounds[(i, i + 1)][1]) + 1) for i in range(1, n)]
    out = set()
    for steps in itertools.product(*ranges):
        c = [0]
        for s in steps:
            c.append(c[-1] + s)
        if all(lo <= c[j - 1] - c[i - 1] <= hi for (i, j), (lo, hi) in bounds.items()):
            out.add(vertex(c))
    return out


def join_meet_closure(M: Iterable[Sequence[object]]) -> set[Vec]:
    """Smallest set containing ``M`` and closed under joins and meets."""
    cur = {vertex(m) for m in M}
    while True:
        new = set(cur)
        for x in cur:
            for y in cur:
                new |= join(x, y)
                new |= meet(x, y)
        if new == cur:
            return cur
        cur = new


def weyl_orbit_points(x: Sequence[object], bound: int) -> set[Vec]:
    """Images ``translate(t, sigma.x)`` with ``|t_i| <= bound``."""
    v = canon(x)
    n = len(v)
    out = set()
    for perm in itertools.permutations(range(n)):
        y = permute(perm, v)
        for t in itertools.product(range(-bound, bound + 1), repeat=n):
            out.add(translate(t, y))
    return out
