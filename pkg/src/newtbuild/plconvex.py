"""Exact piecewise-linear functions on rational intervals.

Scalars are :class:`fractions.Fraction` values; the float ``math.inf`` is
used as the single "+infinity" sentinel.  It compares correctly against
fractions and absorbs addition, which is all the code below needs.

Duality convention: for a function ``f`` on an interval, the conjugate is

    f*(s) = sup { t : f(x) >= -s*x + t for all x } = inf_x ( f(x) + s*x ),

a concave function of ``s``.  :func:`legendre_dual_concave` is the reverse
construction ``g -> (x -> sup_s (g(s) - s*x))``; the two compose to the
identity on convex functions.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

INF = math.inf

Rat = Fraction
ExtRat = Union[Fraction, float]  # float only ever means +inf


class DomainError(ValueError):
    """Raised when a function is evaluated or composed outside its domain."""


def as_rat(x: object) -> ExtRat:
    """Coerce ints, fractions and the infinity sentinel to the scalar type."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if x == INF:
            return INF
        raise TypeError("floating point values are not accepted")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def is_inf(x: ExtRat) -> bool:
    return isinstance(x, float) and x == INF


def fmt_rat(x: ExtRat) -> str:
    """Serialize as ``a/b``, ``a`` or ``inf``."""
    if is_inf(x):
        return "inf"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


_RAT_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")


def parse_rat(text: str) -> ExtRat:
    text = text.strip()
    if text in ("inf", "+inf", "oo"):
        return INF
    m = _RAT_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError("zero denominator")
    return Fraction(num, den)


Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class PLFun:
    """Continuous piecewise-linear function.

    ``pts`` lists the breakpoints with strictly increasing abscissae; the
    first abscissa is ``lo``.  When ``hi`` is finite the last abscissa is
    ``hi``; when ``hi`` is infinite the function continues past the last
    breakpoint with slope ``tail``.  Instances are always stored in
    canonical form (collinear breakpoints merged), so ``==`` compares
    functions, not representations.
    """

    lo: Fraction
    hi: ExtRat
    pts: tuple[Point, ...]
    tail: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        pts = tuple((Fraction(x), Fraction(y)) for x, y in self.pts)
        if not pts:
            raise ValueError("a PL function needs at least one breakpoint")
        lo = Fraction(self.lo)
        hi = self.hi if is_inf(self.hi) else Fraction(self.hi)
        if pts[0][0] != lo:
            raise ValueError("first breakpoint must sit at the domain start")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if not x1 > x0:
                raise ValueError("breakpoint abscissae must strictly increase")
        if not is_inf(hi) and pts[-1][0] != hi:
            raise ValueError("last breakpoint must sit at the domain end")
        tail = Fraction(self.tail) if is_inf(hi) else Fraction(0)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "pts", _canonical(pts, tail, is_inf(hi)))

    # -- basic queries -------------------------------------------------

    def __call__(self, x: ExtRat) -> Fraction:
        return evaluate(self, x)

    @property
    def xs(self) -> tuple[Fraction, ...]:
        return tuple(p[0] for p in self.pts)

    def slopes(self) -> list[Fraction]:
        """Slopes of the successive pieces, tail included when unbounded."""
        out = [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(self.pts, self.pts[1:])]
        if is_inf(self.hi):
            out.append(self.tail)
        return out

    def is_convex(self) -> bool:
        s = self.slopes()
        return all(a <= b for a, b in zip(s, s[1:]))

    def is_concave(self) -> bool:
        s = self.slopes()
        return all(a >= b for a, b in zip(s, s[1:]))

    def is_increasing(self, strict: bool = True) -> bool:
        s = self.slopes()
        return all((v > 0) if strict else (v >= 0) for v in s)

    def contains(self, x: ExtRat) -> bool:
        if is_inf(x):
            return False
        return self.lo <= x and (is_inf(self.hi) or x <= self.hi)

    def restrict(self, lo: Fraction, hi: ExtRat) -> "PLFun":
        """Restriction to a sub-interval."""
        lo = Fraction(lo)
        if not self.contains(lo) or (not is_inf(hi) and not self.contains(hi)):
            raise DomainError("restriction interval leaves the domain")
        if is_inf(hi) and not is_inf(self.hi):
            raise DomainError("restriction interval leaves the domain")
        inner = [p for p in self.pts if p[0] > lo and (is_inf(hi) or p[0] < hi)]
        pts = [(lo, self(lo))] + inner
        if not is_inf(hi):
            hi = Fraction(hi)
            if hi != lo:
                pts.append((hi, self(hi)))
            return PLFun(lo, hi, tuple(pts))
        return PLFun(lo, INF, tuple(pts), self.tail)

    def with_breakpoints(self, extra: Iterable[Fraction]) -> "PLFun":
        """Same function; redundant breakpoints are accepted then merged away."""
        xs = sorted(set(self.xs) | {Fraction(x) for x in extra if self.contains(Fraction(x))})
        return PLFun(self.lo, self.hi, tuple((x, self(x)) for x in xs), self.tail)

    def serialize(self) -> str:
        pts = ";".join(f"{fmt_rat(x)}:{fmt_rat(y)}" for x, y in self.pts)
        return f"plfun lo={fmt_rat(self.lo)} hi={fmt_rat(self.hi)} pts=({pts}) tail={fmt_rat(self.tail)}"

    def __str__(self) -> str:
        return self.serialize()


def _canonical(pts: tuple[Point, ...], tail: Fraction, unbounded: bool) -> tuple[Point, ...]:
    out: list[Point] = [pts[0]]
    for p in pts[1:]:
        if len(out) >= 2:
            (x0, y0), (x1, y1) = out[-2], out[-1]
            if (y1 - y0) * (p[0] - x1) == (p[1] - y1) * (x1 - x0):
                out[-1] = p
                continue
        out.append(p)
    if unbounded and len(out) >= 2:
        (x0, y0), (x1, y1) = out[-2], out[-1]
        if (y1 - y0) == tail * (x1 - x0):
            out.pop()
    return tuple(out)


_PLFUN_RE = re.compile(r"^plfun lo=(\S+) hi=(\S+) pts=\(([^)]*)\) tail=(\S+)$")


def parse_plfun(text: str) -> PLFun:
    m = _PLFUN_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a PL function: {text!r}")
    pts = []
    for item in m.group(3).split(";"):
        x, y = item.split(":")
        pts.append((parse_rat(x), parse_rat(y)))
    return PLFun(parse_rat(m.group(1)), parse_rat(m.group(2)), tuple(pts), parse_rat(m.group(4)))


def from_points(points: Sequence[tuple[object, object]], tail: object | None = None) -> PLFun:
    """Build a PL function through the given points.

    With ``tail`` given, the domain is unbounded to the right.
    """
    pts = tuple((as_rat(x), as_rat(y)) for x, y in points)
    if tail is None:
        return PLFun(pts[0][0], pts[-1][0], pts)
    return PLFun(pts[0][0], INF, pts, as_rat(tail))


def identity(lo: object = 0, hi: object = INF) -> PLFun:
    lo_r = as_rat(lo)
    if is_inf(as_rat(hi)):
        return PLFun(lo_r, INF, ((lo_r, lo_r),), Fraction(1))
    hi_r = as_rat(hi)
    return PLFun(lo_r, hi_r, ((lo_r, lo_r), (hi_r, hi_r)))


def evaluate(f: PLFun, x: ExtRat) -> Fraction:
    """Exact value of ``f`` at ``x``."""
    if is_inf(x) or not f.contains(x):
        raise DomainError(f"{fmt_rat(x)} is outside [{fmt_rat(f.lo)}, {fmt_rat(f.hi)}]")
    x = Fraction(x)
    xs = f.xs
    k = bisect.bisect_right(xs, x) - 1
    x0, y0 = f.pts[k]
    if x == x0:
        return y0
    if k + 1 < len(f.pts):
        x1, y1 = f.pts[k + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return y0 + f.tail * (x - x0)


# -- hulls and envelopes -------------------------------------------------


def lower_convex_hull(points: Iterable[tuple[object, object]]) -> PLFun:
    """Lower convex envelope of a finite point set.

    Points with infinite ordinate impose nothing beyond their abscissa, so
    they are dropped; the domain is spanned by the finite points.
    """
    finite = sorted(
        {(Fraction(x), Fraction(y)) for x, y in ((as_rat(a), as_rat(b)) for a, b in points) if not is_inf(y)}
    )
    # keep the lowest ordinate per abscissa
    best: dict[Fraction, Fraction] = {}
    for x, y in finite:
        if x not in best or y < best[x]:
            best[x] = y
    pts = sorted(best.items())
    if len(pts) < 2:
        raise ValueError("a hull needs at least two points with distinct finite abscissae")
    hull: list[Point] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return PLFun(hull[0][0], hull[-1][0], tuple(hull))


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


Line = tuple[Fraction, Fraction]  # (slope, intercept)


def envelope(lines: Sequence[Line], lo: Fraction, hi: ExtRat, upper: bool = False) -> PLFun:
    """Pointwise min (or max with ``upper``) of finitely many lines on an interval."""
    if not lines:
        raise ValueError("empty family of lines")
    lo = Fraction(lo)
    pick = max if upper else min
    cands = {lo}
    if not is_inf(hi):
        cands.add(Fraction(hi))
    for i, (a1, b1) in enumerate(lines):
        for a2, b2 in lines[i + 1 :]:
            if a1 != a2:
                x = (b2 - b1) / (a1 - a2)
                if x > lo and (is_inf(hi) or x < hi):
                    cands.add(x)
    xs = sorted(cands)
    pts = tuple((x, pick(a * x + b for a, b in lines)) for x in xs)
    if not is_inf(hi):
        return PLFun(lo, Fraction(hi), pts)
    # past every crossing a single line wins: extreme slope, then intercept
    if upper:
        tail = max(lines, key=lambda ab: (ab[0], ab[1]))[0]
    else:
        tail = min(lines, key=lambda ab: (ab[0], ab[1]))[0]
    return PLFun(lo, INF, pts, tail)


def legendre_dual(f: PLFun, lo: object | None = None, hi: object | None = None) -> PLFun:
    """Concave conjugate ``s -> inf_x (f(x) + s*x)``.

    The default parameter range starts strictly below every breakpoint of
    the result, so :func:`legendre_dual_concave` recovers ``f`` exactly.
    For unbounded ``f`` with tail slope ``m`` the range must start at ``-m``
    or later (the infimum is ``-inf`` before that).
    """
    slopes = f.slopes()
    if lo is None:
        if is_inf(f.hi):
            s_lo = -f.tail
        else:
            s_lo = -(max(slopes) if slopes else Fraction(0)) - 1
    else:
        s_lo = Fraction(as_rat(lo))
        if is_inf(f.hi) and s_lo < -f.tail:
            raise DomainError("conjugate is -inf below minus the tail slope")
    s_hi = INF if hi is None else as_rat(hi)
    lines = [(x, y) for x, y in f.pts]
    return envelope(lines, s_lo, s_hi, upper=False)


def legendre_dual_concave(g: PLFun, lo: object | None = None, hi: object | None = None) -> PLFun:
    """Convex function ``x -> sup_s (g(s) - s*x)`` of a concave ``g``.

    The default domain is the range of slopes of ``g``, where the supremum
    is finite and attained.
    """
    slopes = g.slopes()
    if not slopes:
        raise ValueError("a single point has no slope range")
    x_lo = Fraction(as_rat(lo)) if lo is not None else min(slopes)
    x_hi = as_rat(hi) if hi is not None else max(slopes)
    if is_inf(g.hi) and x_lo < g.tail:
        raise DomainError("supremum is +inf below the tail slope")
    lines = [(-s, y) for s, y in g.pts]
    return envelope(lines, x_lo, x_hi, upper=True)


# -- composition and inversion -------------------------------------------


def _value_range(g: PLFun) -> tuple[ExtRat, ExtRat]:
    ys = [y for _, y in g.pts]
    lo, hi = min(ys), max(ys)
    if is_inf(g.hi):
        if g.tail > 0:
            hi = INF
        elif g.tail < 0:
            lo = -INF
    return lo, hi


def compose(f: PLFun, g: PLFun) -> PLFun:
    """The composite ``x -> f(g(x))`` on the domain of ``g``."""
    r_lo, r_hi = _value_range(g)
    if r_lo < f.lo or (not is_inf(f.hi) and r_hi > f.hi):
        raise DomainError("range of the inner function leaves the outer domain")
    cands = set(g.xs)
    segs = list(zip(g.pts, g.pts[1:]))
    for (x0, y0), (x1, y1) in segs:
        if y0 == y1:
            continue
        for b in f.xs:
            if min(y0, y1) < b < max(y0, y1):
                cands.add(x0 + (b - y0) * (x1 - x0) / (y1 - y0))
    if is_inf(g.hi) and g.tail != 0:
        x0, y0 = g.pts[-1]
        for b in f.xs:
            t = (b - y0) / g.tail
            if t > 0:
                cands.add(x0 + t)
    xs = sorted(cands)
    pts = tuple((x, f(g(x))) for x in xs)
    if not is_inf(g.hi):
        return PLFun(g.lo, g.hi, pts)
    if g.tail > 0:
        outer = f.tail
    elif g.tail < 0:
        # the inner tail runs downward; the outer slope is the one left of the last value
        y = g(xs[-1])
        k = bisect.bisect_left(f.xs, y)
        outer = f.slopes()[k - 1] if k > 0 else Fraction(0)
    else:
        outer = Fraction(0)
    return PLFun(g.lo, INF, pts, g.tail * outer)


def inverse(f: PLFun) -> PLFun:
    """Inverse of a strictly increasing PL function."""
    if not f.is_increasing(strict=True):
        raise ValueError("only strictly increasing functions are inverted")
    pts = tuple((y, x) for x, y in f.pts)
    if is_inf(f.hi):
        return PLFun(pts[0][0], INF, pts, 1 / f.tail)
    return PLFun(pts[0][0], pts[-1][0], pts)


def add(f: PLFun, g: PLFun) -> PLFun:
    """Pointwise sum on the common domain."""
    lo = max(f.lo, g.lo)
    hi = min(f.hi, g.hi)
    if hi < lo:
        raise DomainError("disjoint domains")
    xs = sorted({x for x in f.xs + g.xs if x >= lo and (is_inf(hi) or x <= hi)} | {lo})
    pts = tuple((x, f(x) + g(x)) for x in xs)
    if is_inf(hi):
        return PLFun(lo, INF, pts, f.tail + g.tail)
    pts = pts if xs[-1] == hi else pts + ((Fraction(hi), f(hi) + g(hi)),)
    return PLFun(lo, Fraction(hi), pts)


# -- step functions ------------------------------------------------------


@dataclass(frozen=True)
class StepFun:
    """Piecewise-constant function: ``values[k]`` on ``[cuts[k], cuts[k+1])``.

    ``cuts`` has one more entry than ``values``; the last cut may be ``inf``.
    """

    cuts: tuple[ExtRat, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.cuts) != len(self.values) + 1:
            raise ValueError("need exactly one more cut than values")
        if any(not b > a for a, b in zip(self.cuts, self.cuts[1:])):
            raise ValueError("cuts must strictly increase")

    def __call__(self, x: ExtRat) -> Fraction:
        if not self.cuts[0] <= x < self.cuts[-1]:
            raise DomainError("outside the step function's support")
        k = bisect.bisect_right(self.cuts, x) - 1
        return self.values[k]


def derivative(f: PLFun) -> StepFun:
    """Right derivative of a PL function as a step function."""
    cuts = tuple(f.xs) + ((INF,) if is_inf(f.hi) else ())
    return StepFun(cuts, tuple(f.slopes()))


def integrate_step(g: StepFun, a: object, b: object) -> Fraction:
    """Exact integral of a step function over ``[a, b]``."""
    a_r, b_r = as_rat(a), as_rat(b)
    if b_r < a_r:
        raise ValueError("integration bounds are reversed")
    if a_r == b_r:
        return Fraction(0)
    if a_r < g.cuts[0] or b_r > g.cuts[-1] or is_inf(b_r):
        raise DomainError("integration interval leaves the support")
    total = Fraction(0)
    for (c0, c1), v in zip(zip(g.cuts, g.cuts[1:]), g.values):
        lo, hi = max(c0, a_r), min(c1, b_r)
        if hi > lo:
            total += v * (hi - lo)
    return total


def integrate(f: PLFun, a: object, b: object) -> Fraction:
    """Exact integral of a PL function over ``[a, b]`` (trapezoids)."""
    a_r, b_r = Fraction(as_rat(a)), Fraction(as_rat(b))
    if b_r < a_r:
        raise ValueError("integration bounds are reversed")
    xs = [a_r] + [x for x in f.xs if a_r < x < b_r] + [b_r]
    return sum(((x1 - x0) * (f(x0) + f(x1)) / 2 for x0, x1 in zip(xs, xs[1:])), Fraction(0))
