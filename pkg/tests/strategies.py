"""Hypothesis strategies for exact test data."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from newtbuild import plconvex
from newtbuild.newton import Context, NewtonPolygon, normalized

small_pos = st.builds(Fraction, st.integers(1, 20), st.integers(1, 12))
small_rat = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))


@st.composite
def contexts(draw, max_n: int = 3, qs: tuple[int, ...] = (2, 3)) -> Context:
    return Context(draw(st.sampled_from(qs)), draw(st.integers(2, max_n)))


@st.composite
def polygons(draw, max_n: int = 3, qs: tuple[int, ...] = (2, 3)) -> NewtonPolygon:
    ctx = draw(contexts(max_n, qs))
    return normalized(ctx, draw(st.lists(small_pos, min_size=ctx.n, max_size=ctx.n)))


@st.composite
def quartier_points(draw, n: int, top: int = 12) -> tuple[Fraction, ...]:
    steps = draw(st.lists(st.builds(Fraction, st.integers(0, top), st.integers(1, 4)), min_size=n - 1, max_size=n - 1))
    x = [Fraction(0)]
    for s in steps:
        x.append(x[-1] + s)
    return tuple(x)


@st.composite
def quartier_vertices(draw, n: int, top: int = 3) -> tuple[Fraction, ...]:
    steps = draw(st.lists(st.integers(0, top), min_size=n - 1, max_size=n - 1))
    x = [0]
    for s in steps:
        x.append(x[-1] + s)
    return tuple(Fraction(c) for c in x)


@st.composite
def convex_functions(draw, max_pieces: int = 5) -> plconvex.PLFun:
    pieces = draw(st.integers(1, max_pieces))
    x = draw(small_rat)
    y = draw(small_rat)
    s = draw(small_rat)
    pts = [(x, y)]
    for _ in range(pieces):
        dx = draw(small_pos)
        x, y = x + dx, y + s * dx
        pts.append((x, y))
        s += draw(small_pos)
    return plconvex.from_points(pts)


@st.composite
def increasing_functions(draw, lo: Fraction = Fraction(0), max_pieces: int = 4) -> plconvex.PLFun:
    """Strictly increasing PL maps on ``[lo, inf)`` with ``f(lo) = lo``."""
    pieces = draw(st.integers(0, max_pieces))
    x, y = lo, lo
    pts = [(x, y)]
    for _ in range(pieces):
        dx = draw(small_pos)
        x, y = x + dx, y + draw(small_pos) * dx
        pts.append((x, y))
    return plconvex.from_points(pts, tail=draw(small_pos))


@st.composite
def delta_points(draw, n: int) -> tuple[Fraction, ...]:
    raw = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    total = sum(raw)
    return tuple(Fraction(r, total) for r in raw)
