"""Command-line front end: ``newtbuild <verb> key=value ...``.

Exit status is 0 on success, 2 on malformed input and 3 when an internal
consistency check fails.  Tables are tab-separated and start with a
``#schema:`` line naming their columns.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from typing import Callable, Sequence, TextIO
from xml.sax.saxutils import quoteattr

from . import plconvex
from .building import format_vertex, parse_vector, root_pairs, vertex
from .hecke import apply, chamber_of, vertex_polygon
from .iwahori import delta_decomposition, delta_to_apartment, newton_of_delta
from .newton import Context, NewtonPolygon, format_polygon, from_coordinates, lambda_i
from .plconvex import fmt_rat, parse_rat
from .skeleton import (
    canonical_subgroup_exists,
    fundamental_domain_check,
    gh_polytope,
    hecke_orbit,
    psi,
    psi_inverse,
)
from .torsion_oracle import (
    ResourceError,
    lower_class,
    lower_fil_exponents,
    ram_simplex,
    upper_class,
    upper_fil_exponents,
)
from .ultrametric import ball_components, parse_roots

USAGE = """\
usage: newtbuild <verb> [key=value ...]

verbs (polygons are given by q=, n= and P=<slopes>):
  newt q n P                 canonical polygon, Herbrand function and its inverse
  lambda q n P i k           iterated slope l_i^(k)
  fil q n P mu kind=lower|upper
                             filtration exponents and class
  simplex q n P              ramification simplex, tight walls ("-" if none); TSV: vertex
  hecke q n P a              image polygon and permutation
  vertexpoly q n vtx         polygon of a vertex of the quartier
  psi q n P                  quartier point of a polygon
  psiinv q n pt              polygon of a quartier point
  canonical q n P r k        existence of the canonical subgroup
  orbit vtx bound            TSV: vertex
  gh q n                     TSV: subset, slopes, coefficients
  domain-check n D           D = c_0,...,c_(n-1):c;... meaning sum c_l t_l + c >= 0
                             (t_l barycentric by vertex label); TSV: rotation, inequalities
  delta q v                  polygon, piece permutation and apartment point
  balls roots eps            roots="roots m=.. v=..;.. d=(i,j:r;..)"; TSV: members, radius
  svg-decomposition q vmax res
                             SVG of the chambers over the (v(x1), v(x2)) plane (n = 3)
  selftest [seed]            seeded property battery

environment: NEWTB_ENUM_CAP caps brute-force enumerations.
"""


class InputError(ValueError):
    pass


def _opts(args: Sequence[str]) -> dict[str, str]:
    out = {}
    for a in args:
        key, sep, val = a.partition("=")
        if not sep or not key:
            raise InputError(f"expected key=value, got {a!r}")
        if key in out:
            raise InputError(f"option {key} given twice")
        out[key] = val
    return out


def _need(o: dict[str, str], *keys: str) -> list[str]:
    missing = [k for k in keys if k not in o]
    if missing:
        raise InputError("missing option(s): " + ", ".join(missing))
    return [o[k] for k in keys]


def _only(o: dict[str, str], allowed: set[str]) -> None:
    extra = set(o) - allowed
    if extra:
        raise InputError("unknown option(s): " + ", ".join(sorted(extra)))


def _int(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InputError(f"{name} must be an integer") from None


def _ctx(o: dict[str, str]) -> Context:
    q, n = _need(o, "q", "n")
    return Context(_int(q, "q"), _int(n, "n"))


def _polygon(o: dict[str, str]) -> NewtonPolygon:
    ctx = _ctx(o)
    (text,) = _need(o, "P")
    return NewtonPolygon(ctx, tuple(Fraction(parse_rat(t)) for t in text.split(",")))


def _ints(text: str) -> list[int]:
    return [_int(t, "entry") for t in text.split(",")]


def _fmt_vec(x: Sequence[object]) -> str:
    return ",".join(fmt_rat(c) for c in x)


def _table(out: TextIO, columns: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    out.write("#schema: " + "\t".join(columns) + "\n")
    for r in rows:
        out.write("\t".join(r) + "\n")


# -- verbs -----------------------------------------------------------------------


def cmd_newt(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "P"})
    P = _polygon(o)
    out.write(format_polygon(P) + "\n")
    out.write("eta " + P.eta.serialize() + "\n")
    out.write("psi " + P.psi.serialize() + "\n")


def cmd_lambda(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "P", "i", "k"})
    P = _polygon(o)
    i, k = (_int(x, name) for x, name in zip(_need(o, "i", "k"), ("i", "k")))
    if not 1 <= i <= P.n:
        raise InputError("i out of range")
    out.write(fmt_rat(lambda_i(P, i, k)) + "\n")


def cmd_fil(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "P", "mu", "kind"})
    P = _polygon(o)
    (mu,) = _need(o, "mu")
    kind = o.get("kind", "lower")
    if kind == "lower":
        exps, cls = lower_fil_exponents(P, parse_rat(mu)), lower_class(P, parse_rat(mu))
    elif kind == "upper":
        exps, cls = upper_fil_exponents(P, parse_rat(mu)), upper_class(P, parse_rat(mu))
    else:
        raise InputError("kind must be lower or upper")
    out.write("exponents " + ",".join(str(e) for e in exps) + "\n")
    out.write(format_vertex(cls) + "\n")


def cmd_simplex(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "P"})
    R = ram_simplex(_polygon(o))
    out.write(str(R.simplex()) + "\n")
    tight = [f"{i}{j}" for i, j in root_pairs(len(next(iter(R.vertices)))) if R.walls[(i, j)]]
    out.write("walls " + (",".join(tight) or "-") + "\n")
    _table(out, ["vertex"], [[_fmt_vec(v)] for v in sorted(R.vertices)])


def cmd_hecke(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "P", "a"})
    P = _polygon(o)
    (a,) = _need(o, "a")
    image, sigma = apply(P, _ints(a))
    out.write(format_polygon(image) + " sigma=" + ",".join(str(s) for s in sigma) + "\n")


def cmd_vertexpoly(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "vtx"})
    ctx = _ctx(o)
    (x,) = _need(o, "vtx")
    out.write(format_polygon(vertex_polygon(ctx, vertex(parse_vector(x)))) + "\n")


def cmd_psi(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "P"})
    out.write(format_vertex(psi(_polygon(o)), "pt") + "\n")


def cmd_psiinv(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "pt"})
    ctx = _ctx(o)
    (x,) = _need(o, "pt")
    out.write(format_polygon(psi_inverse(ctx, parse_vector(x))) + "\n")


def cmd_canonical(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "P", "r", "k"})
    P = _polygon(o)
    r, k = (_int(x, name) for x, name in zip(_need(o, "r", "k"), ("r", "k")))
    out.write(("true" if canonical_subgroup_exists(P, r, k) else "false") + "\n")


def cmd_orbit(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"vtx", "bound"})
    x, bound = _need(o, "vtx", "bound")
    pts = hecke_orbit(parse_vector(x), _int(bound, "bound"))
    _table(out, ["vertex"], [[_fmt_vec(v)] for v in sorted(pts)])


def cmd_gh(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n"})
    rows = [
        ["{" + ",".join(str(i) for i in e.subset) + "}", _fmt_vec(e.polygon.slopes), _fmt_vec(e.coefficients)]
        for e in gh_polytope(_ctx(o))
    ]
    _table(out, ["subset", "slopes", "coefficients"], rows)


def _parse_domain(text: str, n: int) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    ineqs = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        lhs, sep, c0 = item.partition(":")
        if not sep:
            raise InputError(f"inequality {item!r} needs coefficients:constant")
        coeffs = tuple(Fraction(parse_rat(t)) for t in lhs.split(","))
        if len(coeffs) != n:
            raise InputError(f"inequality {item!r} needs {n} coefficients")
        ineqs.append((coeffs, Fraction(parse_rat(c0))))
    return ineqs


def _fmt_ineqs(ineqs: Sequence[tuple[tuple[Fraction, ...], Fraction]]) -> str:
    return ";".join(_fmt_vec(c) + ":" + fmt_rat(c0) for c, c0 in ineqs) or "-"


def cmd_domain_check(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"n", "D"})
    (n_text,) = _need(o, "n")
    n = _int(n_text, "n")
    D = _parse_domain(o.get("D", ""), n)
    rep = fundamental_domain_check(D, n)
    out.write("covers=" + ("true" if rep.covers else "false") + "\n")
    _table(out, ["rotation", "inequalities"], [[str(m), _fmt_ineqs(f)] for m, f in sorted(rep.boundary.items())])


def cmd_delta(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "v"})
    (q_text, v_text) = _need(o, "q", "v")
    v = parse_vector(v_text)
    ctx = Context(_int(q_text, "q"), len(v))
    sigma, _ = delta_decomposition(ctx.q, v)
    out.write(format_polygon(newton_of_delta(ctx, v)) + "\n")
    out.write("sigma=" + ",".join(str(s) for s in sigma) + "\n")
    out.write(format_vertex(delta_to_apartment(ctx, v), "pt") + "\n")


def cmd_balls(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"roots", "eps"})
    text, eps = _need(o, "roots", "eps")
    comps = ball_components(parse_roots(text), parse_rat(eps))
    _table(out, ["members", "radius"], [[",".join(str(i + 1) for i in c.members), fmt_rat(c.radius)] for c in comps])


# -- SVG ---------------------------------------------------------------------------

CELL = 12  # pixels per grid cell; every coordinate is an integer


def _color(key: tuple[int, ...]) -> str:
    h = 0
    for x in key:
        h = (h * 1000003 + x + 7) % 16777213
    r, g, b = 96 + h % 160, 96 + (h // 160) % 160, 96 + (h // 25600) % 160
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_decomposition(q: int, vmax: Fraction, res: int) -> str:
    """Chambers of the polygons of the points with coordinate valuations
    ``(v1, v2)`` at the centers of a ``res x res`` grid on ``(0, vmax]^2``.

    Each cell carries its exact sample point and chamber as data attributes;
    edges between cells of different chambers are drawn as wall segments.
    """
    if res < 1 or vmax <= 0:
        raise InputError("res and vmax must be positive")
    ctx = Context(q, 3)
    step = vmax / res
    grid: dict[tuple[int, int], tuple[int, ...]] = {}
    cells = []
    for i in range(res):
        for j in range(res):
            v1, v2 = step * i + step / 2, step * j + step / 2
            S, _ = chamber_of(from_coordinates(ctx, (v1, v2)))
            grid[(i, j)] = S.b
            x, y = i * CELL, (res - 1 - j) * CELL
            cells.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{_color(S.b)}" '
                f'data-v1={quoteattr(fmt_rat(v1))} data-v2={quoteattr(fmt_rat(v2))} '
                f'data-chamber={quoteattr(",".join(str(b) for b in S.b))}/>'
            )
    walls = []
    for (i, j), b in grid.items():
        if (i + 1, j) in grid and grid[(i + 1, j)] != b:
            x = (i + 1) * CELL
            y0 = (res - 1 - j) * CELL
            walls.append(f'<line x1="{x}" y1="{y0}" x2="{x}" y2="{y0 + CELL}"/>')
        if (i, j + 1) in grid and grid[(i, j + 1)] != b:
            y = (res - 1 - j) * CELL
            walls.append(f'<line x1="{i * CELL}" y1="{y}" x2="{(i + 1) * CELL}" y2="{y}"/>')
    size = res * CELL
    return "\n".join(
        [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">',
            f"<title>chambers over v(x1), v(x2) in (0, {fmt_rat(vmax)}], q={q}</title>",
            f"<desc>grid {res}x{res}; {CELL} px per cell of side {fmt_rat(step)}; v(x1) to the right, "
            "v(x2) upward</desc>",
            '<g id="cells" stroke="none">',
            *cells,
            "</g>",
            '<g id="walls" stroke="black" stroke-width="1">',
            *walls,
            "</g>",
            "</svg>",
            "",
        ]
    )


def cmd_svg(o: dict[str, str], out: TextIO) -> None:
    _only(o, {"q", "n", "vmax", "res"})
    if o.get("n", "3") != "3":
        raise InputError("the decomposition figure is drawn for n = 3 only")
    q = _int(o.get("q", "2"), "q")
    vmax = Fraction(parse_rat(o.get("vmax", "1")))
    res = _int(o.get("res", "24"), "res")
    out.write(svg_decomposition(q, vmax, res))


def cmd_selftest(o: dict[str, str], out: TextIO) -> None:
    from .selftest import run_all

    _only(o, {"seed"})
    failures = 0
    for name, err in run_all(_int(o.get("seed", "0"), "seed")):
        out.write(f"{'ok' if err is None else 'FAIL'}\t{name}" + ("" if err is None else f"\t{err}") + "\n")
        failures += err is not None
    if failures:
        raise AssertionError(f"{failures} self-check(s) failed")


VERBS: dict[str, Callable[[dict[str, str], TextIO], None]] = {
    "newt": cmd_newt,
    "lambda": cmd_lambda,
    "fil": cmd_fil,
    "simplex": cmd_simplex,
    "hecke": cmd_hecke,
    "vertexpoly": cmd_vertexpoly,
    "psi": cmd_psi,
    "psiinv": cmd_psiinv,
    "canonical": cmd_canonical,
    "orbit": cmd_orbit,
    "gh": cmd_gh,
    "domain-check": cmd_domain_check,
    "delta": cmd_delta,
    "balls": cmd_balls,
    "svg-decomposition": cmd_svg,
    "selftest": cmd_selftest,
}


def run(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if not argv or argv[0] in ("-h", "--help", "help"):
        (out if argv else err).write(USAGE)
        return 0 if argv else 2
    verb = VERBS.get(argv[0])
    if verb is None:
        err.write(f"unknown verb {argv[0]!r}\n" + USAGE)
        return 2
    try:
        verb(_opts(argv[1:]), out)
    except AssertionError as exc:
        err.write(f"invariant violation: {exc}\n")
        return 3
    except (ValueError, IndexError, ArithmeticError, ResourceError, plconvex.DomainError) as exc:
        err.write(f"input error: {exc}\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))
