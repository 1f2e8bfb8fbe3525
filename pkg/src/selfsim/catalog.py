"""Named generating pairs.

Every entry is built from closed-form coordinates and passed through
`validate_pair` before it is returned.  Entries whose coordinates were
reconstructed from their scaling ratios alone carry ``reconstructed=True``.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache

from .geometry import DEFAULT_TOL, Polygon, Similitude, Tolerance, compose
from .pairs import BadParams, GeneratingPair, UnknownName, solve_scale, validate_pair

GOLDEN = (1 + math.sqrt(5)) / 2

NAMES = (
    "golden-bee",
    "right-triangle",
    "trapezoid",
    "sporadic-A",
    "sporadic-B",
    "sporadic-C",
    "sporadic-D",
    "square-4",
    "rect-reducible",
)
# configurations that look like pairs but are not; `validate` should reject them
NON_EXAMPLES = ("equilateral-6",)

# parameter sets listed by `selfsim catalog`
DEFAULT_PARAMS = {"right-triangle": (2, 1), "trapezoid": (3, 1)}


def _linear(a, b, c, d, tx, ty, ratio):
    return Similitude(a, b, c, d, tx, ty, ratio=ratio)


def _scaled(r, tx=0.0, ty=0.0):
    return Similitude._raw(r, 0.0, 0.0, r, tx, ty, r, True)


def _turned(r, quarter_turns, tx=0.0, ty=0.0):
    """``r * R(90 * quarter_turns) x + t`` with exact zeros and signs."""
    co, si = [(1, 0), (0, 1), (-1, 0), (0, -1)][quarter_turns % 4]
    return Similitude._raw(r * co, -r * si, r * si, r * co, tx, ty, r, True)


def golden_bee() -> tuple[Polygon, list[Similitude]]:
    s = 1 / math.sqrt(GOLDEN)
    s2, s3 = s * s, s**3
    hexagon = Polygon([(0, 0), (s, 0), (s, s2), (s3, s2), (s3, 1), (0, 1)])
    f1 = _linear(0.0, -s, s, 0.0, s, 0.0, s)
    f2 = _linear(s2, 0.0, 0.0, -s2, 0.0, 1.0, s2)
    return hexagon, [f1, f2]


def right_triangle(a: int, b: int) -> tuple[Polygon, list[Similitude]]:
    """Hypotenuse ``[0,1]`` on the x-axis; the altitude splits it into two similar copies."""
    s = solve_scale((a, b))
    A, B = (0.0, 0.0), (1.0, 0.0)
    C = (s ** (2 * a), s ** (a + b))
    tri = Polygon([A, B, C])
    f1 = Similitude.from_point_pairs(A, B, A, C, direct=False)
    f2 = Similitude.from_point_pairs(A, B, C, B, direct=False)
    return tri, [f1, f2]


def trapezoid(a: int, b: int) -> tuple[Polygon, list[Similitude]]:
    """Right trapezoid with bases 1 and ``u**2`` and height ``u``, ``u = s**((a-b)/2)``.

    Here ``s`` solves ``s**a + s**b == 1`` so the four pieces have ratios
    ``s**a``, ``s**((a+b)/2)`` twice and ``s**b``.
    """
    s = solve_scale((a, (a + b) // 2, (a + b) // 2, b))
    u = s ** ((a - b) / 2)
    sa, sb, sm = s**a, s**b, s ** ((a + b) / 2)
    quad = Polygon([(0, 0), (1, 0), (u * u, u), (0, u)])
    maps = [
        _scaled(sa, sa, sb * u),
        _turned(sm, 1, sa, 0.0),
        _turned(sm, 3, 0.0, u),
        _scaled(sb, sa, 0.0),
    ]
    return quad, maps


def sporadic_c() -> tuple[Polygon, list[Similitude]]:
    h = math.sqrt(2) / 2
    hexagon = Polygon([(0, 0), (1, 0), (1, h / 2), (0.5, h / 2), (0.5, h), (0, h)])
    maps = [
        _linear(0.0, h, -h, 0.0, 0.0, h, h),
        _scaled(0.5, 0.25, 0.0),
        _turned(0.5, 2, 1.0, h / 2),
    ]
    return hexagon, maps


def square_4() -> tuple[Polygon, list[Similitude]]:
    square = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    return square, [_scaled(0.5, x, y) for y in (0.0, 0.5) for x in (0.0, 0.5)]


def rectangle_strips() -> tuple[Polygon, list[Similitude]]:
    """The ``sqrt(3) x 1`` rectangle cut into three upright strips."""
    r = 1 / math.sqrt(3)
    rect = Polygon([(0, 0), (math.sqrt(3), 0), (math.sqrt(3), 1), (0, 1)])
    return rect, [_turned(r, 1, k * r, 0.0) for k in (1, 2, 3)]


def _expanded(maps, i):
    return list(maps[:i]) + [compose(maps[i], g) for g in maps] + list(maps[i + 1 :])


def rect_reducible() -> tuple[Polygon, list[Similitude]]:
    rect, maps = rectangle_strips()
    return rect, _expanded(maps, 2)


def sporadic_a() -> tuple[Polygon, list[Similitude]]:
    bee, maps = golden_bee()
    return bee, _expanded(maps, 1)


def sporadic_d() -> tuple[Polygon, list[Similitude]]:
    """Rectangle ``1 x sqrt(3)/2``: two turned copies below, three small ones above."""
    r = 1 / math.sqrt(3)
    rect = Polygon([(0, 0), (1, 0), (1, math.sqrt(3) / 2), (0, math.sqrt(3) / 2)])
    maps = [_turned(r, 3, 0.0, r), _turned(r, 3, 0.5, r)]
    maps += [_scaled(1 / 3, k / 3, r) for k in range(3)]
    return rect, maps


def equilateral_6() -> tuple[Polygon, list[Similitude]]:
    """Equilateral triangle cut into one copy of ratio 2/3 and five of ratio 1/3."""
    h = math.sqrt(3) / 2
    tri = Polygon([(0, 0), (1, 0), (0.5, h)])
    third = 1 / 3
    maps = [
        _scaled(2 / 3),
        _scaled(third, 2 / 3, 0.0),
        _scaled(third, 0.5, h / 3),
        _scaled(third, 1 / 3, 2 * h / 3),
        _turned(third, 2, 5 / 6, h / 3),
        _turned(third, 2, 2 / 3, 2 * h / 3),
    ]
    return tri, maps


_RECONSTRUCTED = {"sporadic-A", "sporadic-C", "sporadic-D"}

_BUILDERS = {
    "golden-bee": golden_bee,
    "sporadic-A": sporadic_a,
    "sporadic-B": golden_bee,
    "sporadic-C": sporadic_c,
    "sporadic-D": sporadic_d,
    "square-4": square_4,
    "rect-reducible": rect_reducible,
    "equilateral-6": equilateral_6,
}

_NAME_RE = re.compile(r"^\s*([A-Za-z0-9-]+?)\s*(?:\(([^)]*)\))?\s*$")


def parse_name(text: str) -> tuple[str, tuple[int, ...]]:
    """``"trapezoid(3,1)"`` -> ``("trapezoid", (3, 1))``."""
    m = _NAME_RE.match(text)
    if not m:
        raise UnknownName(f"cannot parse catalog name {text!r}")
    name, args = m.group(1), m.group(2)
    try:
        params = tuple(int(x) for x in args.split(",")) if args and args.strip() else ()
    except ValueError as exc:
        raise BadParams(f"parameters must be integers: {args!r}") from exc
    return name, params


def raw_configuration(name: str, params: tuple[int, ...] = ()) -> tuple[Polygon, list[Similitude]]:
    """Polygon and maps for a name, without certification."""
    if name in ("right-triangle", "trapezoid"):
        params = params or DEFAULT_PARAMS[name]
        if len(params) != 2:
            raise BadParams(f"{name} takes two integers (a, b)")
        a, b = params
        if not a > b >= 1:
            raise BadParams(f"{name} needs a > b >= 1, got ({a}, {b})")
        if name == "right-triangle":
            return right_triangle(a, b)
        if (a - b) % 2:
            raise BadParams(f"trapezoid needs a and b of the same parity, got ({a}, {b})")
        return trapezoid(a, b)
    if name not in _BUILDERS:
        raise UnknownName(f"unknown catalog entry {name!r}")
    if params:
        raise BadParams(f"{name} takes no parameters")
    return _BUILDERS[name]()


@lru_cache(maxsize=64)
def _certified(name: str, params: tuple[int, ...], tol: Tolerance) -> GeneratingPair:
    polygon, maps = raw_configuration(name, params)
    label = f"{name}({','.join(map(str, params))})" if params else name
    pair, _ = validate_pair(polygon, maps, tol, name=label, reconstructed=name in _RECONSTRUCTED)
    return pair


def catalog(name: str, params: tuple[int, ...] | None = None, tol: Tolerance = DEFAULT_TOL) -> GeneratingPair:
    """Certified pair by name; ``name`` may carry its parameters, e.g. ``"right-triangle(3,1)"``."""
    if params is None:
        name, params = parse_name(name)
    if name in NON_EXAMPLES:
        raise UnknownName(f"{name} is not a generating pair; use raw_configuration")
    if name in DEFAULT_PARAMS and not params:
        params = DEFAULT_PARAMS[name]
    return _certified(name, tuple(params), tol)


def entries() -> list[str]:
    """Canonical labels of every catalog pair, defaults filled in."""
    out = []
    for name in NAMES:
        if name in DEFAULT_PARAMS:
            out.append(f"{name}({','.join(map(str, DEFAULT_PARAMS[name]))})")
        else:
            out.append(name)
    return out
