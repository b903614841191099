"""Seeded property battery behind the ``selftest`` command.

Each check runs a small randomized sample of one invariant and raises on
the first counterexample; ``run_all`` reports one line per check.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from . import plconvex
from .building import pr_Q, translate
from .hecke import apply, vertex_polygon
from .iwahori import delta_decomposition, delta_to_apartment, newton_of_delta, sigma_act
from .newton import Context, NewtonPolygon, lambda_iter, lambda_iter_hull, normalized
from .skeleton import canonical_subgroup_exists, hodge_tate_point, psi, psi_inverse
from .torsion_oracle import filtration_class_sets
from .ultrametric import component_of_zero, random_roots


def random_polygon(rng: random.Random, ctx: Context, spread: int = 12) -> NewtonPolygon:
    raw = [Fraction(rng.randint(1, spread), rng.randint(1, spread)) for _ in range(ctx.n)]
    return normalized(ctx, raw)


def random_context(rng: random.Random, max_n: int = 3) -> Context:
    return Context(rng.choice((2, 3)), rng.randint(2, max_n))


def random_quartier_point(rng: random.Random, n: int, top: int = 12) -> tuple[Fraction, ...]:
    x = [Fraction(0)]
    for _ in range(n - 1):
        x.append(x[-1] + Fraction(rng.randint(0, top), rng.randint(1, 4)))
    return tuple(x)


def random_delta(rng: random.Random, n: int) -> tuple[Fraction, ...]:
    raw = [Fraction(rng.randint(1, 20)) for _ in range(n)]
    total = sum(raw)
    return tuple(x / total for x in raw)


def random_convex(rng: random.Random, pieces: int) -> plconvex.PLFun:
    x, y, s = Fraction(0), Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-6, 0))
    pts = [(x, y)]
    for _ in range(pieces):
        dx = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        x, y = x + dx, y + s * dx
        pts.append((x, y))
        s += Fraction(rng.randint(1, 5), rng.randint(1, 3))
    return plconvex.from_points(pts)


def check_legendre(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        f = random_convex(rng, rng.randint(1, 5))
        g = plconvex.legendre_dual(f)
        back = plconvex.legendre_dual_concave(g, f.lo, f.hi)
        if back != f:
            raise AssertionError(f"conjugate is not an involution on {f}")


def check_iterates(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        P = random_polygon(rng, random_context(rng, 4))
        lam = Fraction(rng.randint(1, 30), rng.randint(1, 30))
        k = rng.randint(1, 8)
        if lambda_iter(P, lam, k) != lambda_iter_hull(P, lam, k):
            raise AssertionError(f"iterates disagree on {P}, {lam}, {k}")


def check_psi(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        ctx = random_context(rng)
        x = random_quartier_point(rng, ctx.n)
        if psi(psi_inverse(ctx, x)) != x:
            raise AssertionError(f"psi does not invert at {x}")
        P = random_polygon(rng, ctx)
        if psi_inverse(ctx, psi(P)) != P:
            raise AssertionError(f"psi is not injective at {P}")


def check_equivariance(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        ctx = random_context(rng)
        P = random_polygon(rng, ctx)
        a = [rng.randint(0, 3) for _ in range(ctx.n)]
        if psi(apply(P, a)[0]) != pr_Q(translate(a, psi(P))):
            raise AssertionError(f"Hecke equivariance fails for {P}, {a}")


def check_vertices(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        ctx = random_context(rng, 4)
        x = tuple(sorted(rng.randint(0, 3) for _ in range(ctx.n)))
        x = tuple(c - x[0] for c in x)
        if psi(vertex_polygon(ctx, x)) != x:
            raise AssertionError(f"vertex {x} is not fixed")


def check_filtrations(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        filtration_class_sets(random_polygon(rng, random_context(rng, 4)))


def check_canonical(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        P = random_polygon(rng, random_context(rng, 4))
        for r in range(1, P.n):
            for k in range(1, 5):
                canonical_subgroup_exists(P, r, k)


def check_hodge_tate(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        hodge_tate_point(random_polygon(rng, random_context(rng)))


def check_iwahori(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        ctx = random_context(rng, 4)
        v = random_delta(rng, ctx.n)
        sigma, w = delta_decomposition(ctx.q, v)
        if sigma_act(ctx.q, sigma, w) != v:
            raise AssertionError(f"decomposition of {v} does not round-trip")
        if pr_Q(delta_to_apartment(ctx, v)) != psi(newton_of_delta(ctx, v)):
            raise AssertionError(f"apartment square fails at {v}")


def check_roots(rng: random.Random, trials: int) -> None:
    for _ in range(trials):
        roots = random_roots(rng, rng.randint(1, 8))
        component_of_zero(roots, Fraction(rng.randint(0, 60), rng.randint(1, 5)))


CHECKS: dict[str, tuple[Callable[[random.Random, int], None], int]] = {
    "legendre-involution": (check_legendre, 100),
    "iterate-hull": (check_iterates, 100),
    "psi-bijection": (check_psi, 40),
    "hecke-equivariance": (check_equivariance, 40),
    "vertex-fixed": (check_vertices, 20),
    "filtration-reconstruction": (check_filtrations, 30),
    "canonical-subgroup": (check_canonical, 20),
    "hodge-tate-point": (check_hodge_tate, 10),
    "iwahori-square": (check_iwahori, 30),
    "zero-component": (check_roots, 50),
}


def run_all(seed: int = 0) -> list[tuple[str, str | None]]:
    """``(name, None)`` on success, ``(name, message)`` on failure."""
    out: list[tuple[str, str | None]] = []
    for name, (fn, trials) in CHECKS.items():
        try:
            fn(random.Random(f"{seed}:{name}"), trials)
        except AssertionError as exc:
            out.append((name, str(exc) or "assertion failed"))
        else:
            out.append((name, None))
    return out
