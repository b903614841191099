"""Brute-force model of the torsion of a height-n formal module.

The ring of integers is modeled as ``F_q[[pi]]``.  Every quantity computed
here depends only on the ``O/pi^k``-module structure of the torsion and on
counting over ``F_q``, so the equal-characteristic model gives exactly the
same numbers as a mixed-characteristic one.

A torsion point of level ``k`` is ``sum_i pi^(-k) u_i e_i`` with each
``u_i`` a polynomial of degree ``< k`` over ``F_q``; ``(e_i)`` is an adapted
basis, meaning a point whose coordinates have pi-orders ``c_i`` has
valuation ``min_i l_i^(c_i)``.  Only the additive group of ``F_q`` is ever
needed, so field elements are integers ``0..q-1`` read as digit vectors
over the prime field.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .building import SimplexB, Vec, canon, join, meet, vertex
from .newton import NewtonPolygon, lambda_i, lambda_iter
from .plconvex import INF, ExtRat, as_rat, is_inf

DEFAULT_ENUM_CAP = 2**20


class ResourceError(RuntimeError):
    """Raised when an enumeration would exceed the configured size cap."""


def enum_cap() -> int:
    raw = os.environ.get("NEWTB_ENUM_CAP")
    if raw is None:
        return DEFAULT_ENUM_CAP
    return int(raw)


def _check_cap(size: int) -> None:
    cap = enum_cap()
    if size > cap:
        raise ResourceError(f"enumeration of {size} elements exceeds the cap {cap}")


@lru_cache(maxsize=None)
def _prime_of(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            r = q
            while r % p == 0:
                r //= p
            if r != 1:
                raise ValueError(f"q={q} is not a prime power")
            return p
    raise ValueError("q must be at least 2")


def _fq_sub(a: int, b: int, q: int) -> int:
    p = _prime_of(q)
    if p == q:
        return (a - b) % q
    out, place = 0, 1
    while a or b:
        out += ((a % p - b % p) % p) * place
        a //= p
        b //= p
        place *= p
    return out


def A(k: int, q: int) -> int:
    """Number of elements of exact pi-order ``k`` in ``pi^(-k) O / O``."""
    if k < 0:
        raise ValueError("orders are non-negative")
    return 1 if k == 0 else q**k - q ** (k - 1)


# -- torsion vectors -------------------------------------------------------


@dataclass(frozen=True)
class TorsionVector:
    level: int
    coords: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("negative level")
        if any(len(c) != self.level for c in self.coords):
            raise ValueError("each coordinate needs exactly `level` coefficients")

    @property
    def n(self) -> int:
        return len(self.coords)

    def orders(self) -> tuple[int, ...]:
        """pi-order of each coordinate (0 for a zero coordinate)."""
        out = []
        for u in self.coords:
            low = next((d for d, c in enumerate(u) if c), None)
            out.append(0 if low is None else self.level - low)
        return tuple(out)

    def is_zero(self) -> bool:
        return not any(any(u) for u in self.coords)

    def lift(self, level: int) -> "TorsionVector":
        """Same point written at a higher level."""
        if level < self.level:
            raise ValueError("cannot lower the level")
        pad = level - self.level
        return TorsionVector(level, tuple((0,) * pad + u for u in self.coords))

    def sub(self, other: "TorsionVector", q: int) -> "TorsionVector":
        k = max(self.level, other.level)
        a, b = self.lift(k), other.lift(k)
        return TorsionVector(
            k, tuple(tuple(_fq_sub(x, y, q) for x, y in zip(u, v)) for u, v in zip(a.coords, b.coords))
        )

    def times_pi(self, m: int = 1) -> "TorsionVector":
        """Multiplication by ``pi^m``, kept at the same level."""
        if m <= 0:
            return self
        return TorsionVector(
            self.level, tuple(tuple(u[d - m] if d >= m else 0 for d in range(self.level)) for u in self.coords)
        )


def basis_point(n: int, i: int, order: int, level: int | None = None) -> TorsionVector:
    """``pi^(-order) e_i`` (1-based ``i``)."""
    level = order if level is None else level
    if not 0 <= order <= level:
        raise ValueError("order must lie between 0 and the level")
    coords = []
    for j in range(1, n + 1):
        u = [0] * level
        if j == i and order > 0:
            u[level - order] = 1
        coords.append(tuple(u))
    return TorsionVector(level, tuple(coords))


def valuation(P: NewtonPolygon, x: TorsionVector) -> ExtRat:
    """``min_i l_i^(ord_i x)``; the zero point has infinite valuation."""
    return min((lambda_i(P, i + 1, c) for i, c in enumerate(x.orders())), default=INF)


# -- finite subgroups ------------------------------------------------------


@dataclass(frozen=True)
class FiniteSubgroup:
    level: int
    generators: tuple[TorsionVector, ...]
    elements: frozenset[TorsionVector]

    def __contains__(self, x: TorsionVector) -> bool:
        return x.lift(max(x.level, self.level)) in self._at(max(x.level, self.level))

    def _at(self, level: int) -> frozenset[TorsionVector]:
        if level == self.level:
            return self.elements
        return frozenset(e.lift(level) for e in self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def span_of_orders(q: int, orders: Sequence[int], level: int | None = None) -> FiniteSubgroup:
    """The subgroup ``sum_i (pi^(-a_i) O / O) e_i``."""
    a = [int(x) for x in orders]
    if any(x < 0 for x in a):
        raise ValueError("orders are non-negative")
    k = max(a, default=0) if level is None else level
    if any(x > k for x in a):
        raise ValueError("level below a generator order")
    _check_cap(q ** sum(a))
    n = len(a)
    per_coord = []
    for ai in a:
        opts = []
        for digits in itertools.product(range(q), repeat=ai):
            opts.append((0,) * (k - ai) + digits)
        per_coord.append(opts)
    elems = frozenset(TorsionVector(k, tuple(c)) for c in itertools.product(*per_coord))
    gens = tuple(basis_point(n, i + 1, ai, k) for i, ai in enumerate(a) if ai > 0)
    return FiniteSubgroup(k, gens, elems)


def subgroup(P: NewtonPolygon, a: Sequence[int]) -> FiniteSubgroup:
    """Subgroup generated by the points ``pi^(-a_i) e_i``."""
    if len(a) != P.n:
        raise ValueError("one exponent per basis vector")
    return span_of_orders(P.q, a)


def torsion_points(P: NewtonPolygon, level: int) -> FiniteSubgroup:
    """All of ``H[pi^level]``."""
    return span_of_orders(P.q, (level,) * P.n, level)


def kernel_valuation_sum(P: NewtonPolygon, C: FiniteSubgroup) -> Fraction:
    return sum((valuation(P, x) for x in C.elements if not x.is_zero()), Fraction(0))


def isogeny_point_valuation(P: NewtonPolygon, C: FiniteSubgroup, x: TorsionVector) -> ExtRat:
    """Valuation of the image of ``x`` under the quotient by ``C``."""
    k = max(C.level, x.level)
    xl = x.lift(k)
    elems = C._at(k)
    if xl in elems:
        return INF
    _check_cap(len(elems))
    return sum((valuation(P, xl.sub(c, P.q)) for c in elems), Fraction(0))


# -- ramification filtrations ---------------------------------------------


def lower_fil_exponents(P: NewtonPolygon, mu: object) -> tuple[int, ...]:
    """``k(i, mu) = max{k >= 0 : l_i^(k) >= mu}``; ``Fil_mu = sum pi^(-k_i) O e_i``."""
    m = as_rat(mu)
    if not m > 0:
        raise ValueError("mu must be positive")
    out = []
    for i in range(1, P.n + 1):
        k = 0
        while lambda_i(P, i, k + 1) >= m:
            k += 1
        out.append(k)
    return tuple(out)


def upper_fil_exponents(P: NewtonPolygon, mu: object) -> tuple[int, ...]:
    """``l(i, mu) = min{l >= 0 : l_i >= mu^(l+2)}``; ``Fil^mu = sum pi^(l_i) O e_i``."""
    m = as_rat(mu)
    if not m > 0:
        raise ValueError("mu must be positive")
    out = []
    for i in range(1, P.n + 1):
        l = 0
        while P.lam(i) < lambda_iter(P, m, l + 2):
            l += 1
        out.append(l)
    return tuple(out)


def lower_class(P: NewtonPolygon, mu: object) -> Vec:
    return vertex(-k for k in lower_fil_exponents(P, mu))


def upper_class(P: NewtonPolygon, mu: object) -> Vec:
    return vertex(upper_fil_exponents(P, mu))


def lower_jumps(P: NewtonPolygon, floor: Fraction) -> list[Fraction]:
    """Sorted values ``l_i^(k) > floor``; the lower filtration only changes there."""
    out = set()
    for i in range(1, P.n + 1):
        k = 1
        while True:
            v = lambda_i(P, i, k)
            if v <= floor:
                break
            out.add(v)
            k += 1
    return sorted(out)


def upper_jumps(P: NewtonPolygon, ceiling: Fraction) -> list[Fraction]:
    """Sorted values ``eta^m(l_i) <= ceiling``, ``m >= 1``, where the upper filtration changes."""
    out = set()
    for i in range(1, P.n + 1):
        v = P.eta(P.lam(i))
        while v <= ceiling:
            out.add(v)
            v = P.eta(v)
    return sorted(out)


@dataclass(frozen=True)
class RamSimplex:
    b: dict
    walls: dict
    vertices: frozenset

    def simplex(self) -> SimplexB:
        return SimplexB.from_dict(len(next(iter(self.vertices))), self.b)


def chamber_data(P: NewtonPolygon) -> tuple[dict[tuple[int, int], int], dict[tuple[int, int], bool]]:
    """``b_ij`` with ``l_i^(b+1) >= l_j > l_i^(b+2)``, and whether the first is an equality."""
    b, walls = {}, {}
    for i in range(1, P.n + 1):
        for j in range(i + 1, P.n + 1):
            lj = P.lam(j)
            k = 0
            while not lambda_i(P, i, k + 2) < lj:
                k += 1
            if not lambda_i(P, i, k + 1) >= lj:
                raise AssertionError("chamber inequalities have no solution")
            b[(i, j)] = k
            walls[(i, j)] = lambda_i(P, i, k + 1) == lj
    return b, walls


def ram_simplex_vertices(P: NewtonPolygon) -> frozenset[Vec]:
    """Classes ``[Fil_mu]`` for ``0 < mu <= l_n``.

    The classes repeat with period ``mu -> mu/q^n``, so evaluating at the
    jumps inside ``(l_n/q^n, l_n]`` and at ``l_n`` covers them all.
    """
    eps = P.slopes[-1]
    floor = eps / P.q**P.n
    pts = [m for m in lower_jumps(P, floor) if m <= eps] + [eps]
    return frozenset(lower_class(P, m) for m in pts)


def ram_simplex(P: NewtonPolygon) -> RamSimplex:
    b, walls = chamber_data(P)
    return RamSimplex(b, walls, ram_simplex_vertices(P))


def lower_class_set(P: NewtonPolygon) -> frozenset[Vec]:
    """All classes ``[Fil_mu]``, ``mu > 0``, from the jump sweep."""
    floor = P.slopes[-1] / P.q**P.n
    pts = lower_jumps(P, floor) + [P.slopes[0] + 1]
    return frozenset(lower_class(P, m) for m in pts)


def upper_class_set(P: NewtonPolygon) -> frozenset[Vec]:
    """All classes ``[Fil^mu]``, ``mu > 0``.

    For ``mu > l_1`` one has ``Fil^(eta(mu)) = pi Fil^mu``, so every class
    already occurs for ``mu <= eta(l_1)``; the filtration is constant
    between consecutive jumps, so the jumps up to ``eta(l_1)`` suffice.
    """
    return frozenset(upper_class(P, m) for m in upper_jumps(P, P.eta(P.slopes[0])))


def filtration_class_sets(P: NewtonPolygon) -> tuple[frozenset[Vec], frozenset[Vec]]:
    """Lower and upper class sets, each computed by sweep and by join/meet
    reconstruction from the ramification simplex; the two routes must agree."""
    lower, upper = lower_class_set(P), upper_class_set(P)
    S = ram_simplex_vertices(P)
    origin = vertex((0,) * P.n)
    lower_rec = frozenset().union(*(join(x, origin) for x in S))
    upper_rec = frozenset().union(*(meet(x, origin) for x in S))
    if lower != lower_rec or upper != upper_rec:
        raise AssertionError("filtration classes disagree with the join/meet reconstruction")
    return lower, upper


def lower_fil_subgroup(P: NewtonPolygon, mu: object, level: int) -> frozenset[TorsionVector]:
    """``{x in H[pi^level] : v(x) >= mu}`` by enumeration."""
    m = as_rat(mu)
    return frozenset(x for x in torsion_points(P, level).elements if valuation(P, x) >= m)


def upper_fil_subgroup(P: NewtonPolygon, mu: object, level: int) -> frozenset[TorsionVector]:
    """Upper filtration of ``H[pi^level]``: the lower one at ``mu^(level+1)``."""
    return lower_fil_subgroup(P, lambda_iter(P, as_rat(mu), level + 1), level)


# -- Hodge-Tate norms ------------------------------------------------------


def _profile_sum(P: NewtonPolygon, idx: Sequence[int], k: int) -> Fraction:
    """Sum of valuations over the nonzero points of ``span(e_j : j in idx)[pi^k]``.

    Points are grouped by their order profile; a profile ``c`` is shared by
    ``prod A(c_j)`` points, all of valuation ``min_j l_j^(c_j)``.
    """
    q = P.q
    total = Fraction(0)
    for prof in itertools.product(range(k + 1), repeat=len(idx)):
        if not any(prof):
            continue
        count = 1
        for c in prof:
            count *= A(c, q)
        total += count * min(lambda_i(P, j, c) for j, c in zip(idx, prof))
    return total


def kernel_sum_coordinate(P: NewtonPolygon, i: int, k: int) -> Fraction:
    """``v(M[pi^k])`` for ``M = span(e_j : j != i)``."""
    return _profile_sum(P, [j for j in range(1, P.n + 1) if j != i], k)


def _stabilized(F, cond, start: int = 1, limit: int = 400) -> Fraction:
    prev = F(start)
    k = start + 1
    while k < limit:
        cur = F(k)
        if cur == prev and cond(k):
            if F(k + 1) != cur:
                raise AssertionError("stabilized sequence moved again")
            return cur
        prev = cur
        k += 1
    raise AssertionError("no stabilization within the iteration limit")


def hodge_tate_norm(P: NewtonPolygon, i: int) -> Fraction:
    """Norm of the i-th dual basis covector: the stable value of
    ``(q v(M[pi^k]) - v(M[pi^(k-1)])) / (q - 1)``."""
    n, q = P.n, P.q
    if not 1 <= i <= n:
        raise IndexError("coordinate index out of range")
    if n == 1:
        return Fraction(0)
    others = [j for j in range(1, n + 1) if j != i]
    bound = q**n * P.slopes[-1]

    def F(k: int) -> Fraction:
        return (q * kernel_sum_coordinate(P, i, k) - kernel_sum_coordinate(P, i, k - 1)) / (q - 1)

    def cond(k: int) -> bool:
        return max(lambda_i(P, j, k) for j in others) <= bound

    return _stabilized(F, cond)


def _order_sum_counts(a: int, b: int, q: int) -> dict[int, int]:
    """For fixed ``y`` of order ``a``, how many ``w`` of order ``b`` give ``y + w`` each order."""
    if a != b:
        return {max(a, b): A(b, q)}
    if a == 0:
        return {0: 1}
    out = {j: A(j, q) for j in range(a)}
    out[a] = A(a, q) - q ** (a - 1)
    return out


def kernel_sum_covector(P: NewtonPolygon, e: Sequence[ExtRat], k: int) -> Fraction:
    """Sum of valuations over the nonzero points of ``ker(phi)`` in ``H[pi^k]``.

    ``phi = sum pi^(e_i) e_i^*`` (an infinite ``e_i`` is a zero coordinate).
    With ``m`` an index of smallest ``e``, the kernel is parametrized by free
    ``x_j`` (``j != m``) and ``x_m = -sum pi^(e_j - e_m) x_j + t`` with
    ``t`` killed by ``pi^(e_m)``.  The sum is accumulated over order
    profiles; the orders of sums follow the counting rule of
    :func:`_order_sum_counts`.
    """
    q, n = P.q, P.n
    es = [as_rat(x) for x in e]
    finite = [x for x in es if not is_inf(x)]
    if not finite:
        raise ValueError("the zero covector has no kernel norm")
    m = min(range(n), key=lambda j: (es[j], j))
    em = int(es[m])
    # state: (min valuation over free coordinates, order of the running sum y) -> count
    states: dict[tuple[ExtRat, int], int] = {(INF, 0): 1}
    for j in range(n):
        if j == m:
            continue
        shift = None if is_inf(es[j]) else int(es[j]) - em
        nxt: dict[tuple[ExtRat, int], int] = {}
        for (mn, o), cnt in states.items():
            for c in range(k + 1):
                val = min(mn, lambda_i(P, j + 1, c))
                if shift is None:
                    key = (val, o)
                    nxt[key] = nxt.get(key, 0) + cnt * A(c, q)
                    continue
                b = max(c - shift, 0)
                # each image point of order b is hit A(c)/A(b) times
                mult = A(c, q) // A(b, q)
                for o2, ways in _order_sum_counts(o, b, q).items():
                    key = (val, o2)
                    nxt[key] = nxt.get(key, 0) + cnt * ways * mult
        states = nxt
    total = Fraction(0)
    tmax = min(em, k)
    for (mn, o), cnt in states.items():
        for c in range(tmax + 1):
            for o2, ways in _order_sum_counts(o, c, q).items():
                v = min(mn, lambda_i(P, m + 1, o2))
                if is_inf(v):
                    continue
                total += cnt * ways * v
    return total


def kernel_sum_covector_enum(P: NewtonPolygon, e: Sequence[ExtRat], k: int) -> Fraction:
    """Same quantity by enumerating ``H[pi^k]`` and testing ``phi(x) = 0``."""
    q, n = P.q, P.n
    es = [as_rat(x) for x in e]
    total = Fraction(0)
    for x in torsion_points(P, k).elements:
        acc = TorsionVector(k, ((0,) * k,))
        for j in range(n):
            if is_inf(es[j]):
                continue
            term = TorsionVector(k, (x.coords[j],)).times_pi(int(es[j]))
            acc = acc.sub(TorsionVector(k, (tuple(_fq_sub(0, c, q) for c in term.coords[0]),)), q)
        if acc.is_zero() and not x.is_zero():
            total += valuation(P, x)
    return total


def hodge_tate_norm_covector(P: NewtonPolygon, e: Sequence[ExtRat]) -> Fraction:
    """Stabilized kernel formula for ``phi = sum pi^(e_i) e_i^*``."""
    q, n = P.q, P.n
    es = [as_rat(x) for x in e]
    emax = max(int(x) for x in es if not is_inf(x))
    bound = q**n * P.slopes[-1]

    def F(k: int) -> Fraction:
        return (q * kernel_sum_covector(P, es, k) - kernel_sum_covector(P, es, k - 1)) / (q - 1)

    def cond(k: int) -> bool:
        return k > emax and max(lambda_i(P, j, k - emax) for j in range(1, n + 1)) <= bound

    return _stabilized(F, cond)


def _lower_norm(P: NewtonPolygon, es: Sequence[ExtRat], lam: Fraction) -> Fraction:
    ks = lower_fil_exponents(P, lam)
    return min(Fraction(x) - k for x, k in zip(es, ks) if not is_inf(x))


def _upper_norm(P: NewtonPolygon, es: Sequence[ExtRat], lam: Fraction) -> Fraction:
    ls = upper_fil_exponents(P, lam)
    return min(Fraction(x) + l for x, l in zip(es, ls) if not is_inf(x))


def _step_integral(cuts: Iterable[Fraction], a: Fraction, b: Fraction, g) -> Fraction:
    """Integral over ``[a, b]`` of a left-continuous step function ``g``
    constant on each ``(c_k, c_(k+1)]``; sampled at the right ends."""
    pts = sorted({a, b} | {c for c in cuts if a < c < b})
    return sum(((x1 - x0) * g(x1) for x0, x1 in zip(pts, pts[1:])), Fraction(0))


def ht_integral_lower(P: NewtonPolygon, e: Sequence[ExtRat], mu: object) -> Fraction:
    """``q/(q-1) int_{mu/q^n}^{mu} f(l) q^(|phi|_l - |phi|_mu) dl + |phi|_mu``
    with ``f(l) = |Fil_l / Fil_inf|`` and ``|phi|_l`` the norm of the dual of ``Fil_l``."""
    q, n = P.q, P.n
    m = Fraction(as_rat(mu))
    if not 0 < m <= P.slopes[-1]:
        raise ValueError("mu must lie in (0, smallest slope]")
    es = [as_rat(x) for x in e]
    base = _lower_norm(P, es, m)
    lo = m / q**n

    def g(lam: Fraction) -> Fraction:
        f = Fraction(q) ** sum(lower_fil_exponents(P, lam))
        return f * Fraction(q) ** (_lower_norm(P, es, lam) - base)

    integral = _step_integral(lower_jumps(P, lo / 2), lo, m, g)
    return Fraction(q, q - 1) * integral + base


def ht_integral_upper(P: NewtonPolygon, e: Sequence[ExtRat], mu: object) -> Fraction:
    """``q/(q-1) int_{mu-1}^{mu} q^(|phi|^l - |phi|^mu) dl + |phi|^mu`` for the upper filtration."""
    q = P.q
    m = Fraction(as_rat(mu))
    if not m > 1:
        raise ValueError("mu must exceed 1")
    es = [as_rat(x) for x in e]
    base = _upper_norm(P, es, m)

    def g(lam: Fraction) -> Fraction:
        # the upper norm jumps right after each jump point: sample just inside
        return Fraction(q) ** (_upper_norm(P, es, lam) - base)

    cuts = upper_jumps(P, m)
    pts = sorted({m - 1, m} | {c for c in cuts if m - 1 < c < m})
    total = Fraction(0)
    for x0, x1 in zip(pts, pts[1:]):
        total += (x1 - x0) * g((x0 + x1) / 2)
    return Fraction(q, q - 1) * total + base


def hodge_tate_norm_integral(
    P: NewtonPolygon, e: Sequence[ExtRat], mu: object | None = None, variant: str = "lower"
) -> Fraction:
    """Integral formula for the Hodge-Tate norm, calibrated on ``e_1^*``."""
    n = P.n
    basis = [0] + [INF] * (n - 1)
    if variant == "lower":
        m = P.slopes[-1] if mu is None else as_rat(mu)
        raw = ht_integral_lower
    elif variant == "upper":
        m = default_upper_mu(P) if mu is None else as_rat(mu)
        raw = ht_integral_upper
    else:
        raise ValueError("variant is 'lower' or 'upper'")
    C = hodge_tate_norm(P, 1) - raw(P, basis, m)
    return raw(P, e, m) + C


def default_upper_mu(P: NewtonPolygon) -> Fraction:
    """A level past which the upper filtration is an arithmetic progression."""
    return P.eta(P.slopes[0]) + 1


def hodge_tate_point(P: NewtonPolygon) -> Vec:
    """Canonical vector of the dual basis norms."""
    return canon(hodge_tate_norm(P, i) for i in range(1, P.n + 1))
