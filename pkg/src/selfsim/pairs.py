"""Generating pairs: a polygon plus similitudes whose images partition it.

A pair is certified by `validate_pair`, which fits integer exponents to
the scaling ratios (all ratios must be powers of one base ``s``) and then
checks the subdivision geometrically.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .geometry import (
    DEFAULT_TOL,
    Location,
    Polygon,
    Similitude,
    Tolerance,
    compose,
    contains,
    corners,
    intersection_area,
    similar,
)


class PairError(ValueError):
    pass


class ExponentFailure(PairError):
    """Scaling ratios could not be written as integer powers of a common base."""


class NoCommonBase(ExponentFailure):
    pass


class SubdivisionFailure(PairError):
    def __init__(self, message: str, report: "ValidationReport"):
        super().__init__(message)
        self.report = report


class UnknownName(PairError):
    pass


class BadParams(PairError):
    pass


A_MAX = 24
FIT_TOL = 1e-8


@dataclass(frozen=True)
class GeneratingPair:
    polygon: Polygon
    maps: tuple[Similitude, ...]
    exponents: tuple[int, ...]
    scale: float
    name: str = ""
    reconstructed: bool = False

    @property
    def N(self) -> int:
        return len(self.maps)

    @property
    def order(self) -> int:
        """Number of prototiles, ``max(exponents)``."""
        return max(self.exponents)

    def tiles(self) -> list[Polygon]:
        return [self.polygon.transformed(f) for f in self.maps]


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    area_defect: float
    max_overlap_area: float
    containment_ok: bool
    exponent_fit_error: float
    reason: str = ""

    def lines(self) -> list[str]:
        return [
            f"passed\t{self.passed}",
            f"area_defect\t{self.area_defect:.3e}",
            f"max_overlap_area\t{self.max_overlap_area:.3e}",
            f"containment_ok\t{self.containment_ok}",
            f"exponent_fit_error\t{self.exponent_fit_error:.3e}",
        ] + ([f"reason\t{self.reason}"] if self.reason else [])


def solve_scale(exponents: Sequence[int]) -> float:
    """Unique root in (0, 1) of ``sum(x**(2*a)) == 1``, by bisection."""
    if len(exponents) < 2 or any(int(a) != a or a < 1 for a in exponents):
        raise ValueError("need at least two positive integer exponents")
    twice = [2 * int(a) for a in exponents]
    lo, hi = 0.0, 1.0
    # left side is increasing in x on (0, 1): 0 at x=0, N at x=1
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if sum(mid**k for k in twice) > 1.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def normalize_exponents(exponents: Sequence[int], scale: float) -> tuple[tuple[int, ...], float]:
    g = reduce(math.gcd, exponents)
    return tuple(a // g for a in exponents), scale**g


def infer_exponents(
    ratios: Sequence[float], a_max: int = A_MAX, fit_tol: float = FIT_TOL
) -> tuple[tuple[int, ...], float]:
    """Integers ``a_n <= a_max`` and ``0 < s < 1`` with ``ratios[n] ~= s**a_n``.

    The smallest ratio is tried with each candidate exponent in turn; that
    fixes ``s`` and the remaining exponents are rounded from logarithms.
    The result is gcd-normalized.
    """
    if not ratios or any(not 0 < r < 1 for r in ratios):
        raise ExponentFailure("every ratio must lie strictly between 0 and 1")
    r_min = min(ratios)
    for a_min in range(1, a_max + 1):
        s = r_min ** (1.0 / a_min)
        ls = math.log(s)
        exps = []
        for r in ratios:
            a = round(math.log(r) / ls)
            if a < 1 or a > a_max or abs(r - s**a) > fit_tol:
                break
            exps.append(a)
        else:
            return normalize_exponents(exps, s)
    raise NoCommonBase(
        f"ratios {['%.10g' % r for r in ratios]} are not integer powers of a common base "
        f"with exponents <= {a_max}"
    )


def validate_pair(
    polygon: Polygon,
    maps: Sequence[Similitude],
    tol: Tolerance = DEFAULT_TOL,
    name: str = "",
    reconstructed: bool = False,
) -> tuple[GeneratingPair, ValidationReport]:
    """Certify ``(polygon, maps)`` as a generating pair.

    Raises `ExponentFailure` if the ratios share no base and
    `SubdivisionFailure` (carrying the report) if the images do not
    partition the polygon.
    """
    if len(maps) < 2:
        raise PairError("a generating pair needs at least two maps")
    ratios = [f.ratio for f in maps]
    exponents, s = infer_exponents(ratios)
    fit_err = max(abs(r - s**a) for r, a in zip(ratios, exponents))
    # the scale equation pins s exactly given the exponents
    s_exact = solve_scale(exponents)
    if abs(s_exact - s) > FIT_TOL:
        report = ValidationReport(False, math.nan, math.nan, False, abs(s_exact - s), "scale equation")
        raise SubdivisionFailure("ratios violate the area equation sum s^(2a) = 1", report)

    images = [polygon.transformed(f) for f in maps]
    A = polygon.area
    area_defect = abs(sum(t.area for t in images) - A)
    max_overlap = 0.0
    for t, u in itertools.combinations(images, 2):
        max_overlap = max(max_overlap, intersection_area(t, u))
    containment = all(
        contains(polygon, v, tol) is not Location.OUTSIDE for t in images for v in t.vertices
    ) and all(abs(intersection_area(t, polygon) - t.area) <= tol.eps_area * max(1.0, A) for t in images)

    area_tol = tol.eps_area * max(1.0, A)
    reasons = []
    if area_defect > area_tol:
        reasons.append("area sum")
    if max_overlap > area_tol:
        reasons.append("overlap")
    if not containment:
        reasons.append("containment")
    report = ValidationReport(
        passed=not reasons,
        area_defect=area_defect,
        max_overlap_area=max_overlap,
        containment_ok=containment,
        exponent_fit_error=fit_err,
        reason=", ".join(reasons),
    )
    if reasons:
        raise SubdivisionFailure("images do not partition the polygon: " + report.reason, report)
    pair = GeneratingPair(polygon, tuple(maps), exponents, s_exact, name, reconstructed)
    return pair, report


# ---------------------------------------------------------------------------
# reducibility


def _snap(p, eps):
    return (round(p[0] / eps), round(p[1] / eps))


def union_outline(polys: Sequence[Polygon], eps: float = 1e-9) -> list[tuple[float, float]] | None:
    """Boundary loop of a union of edge-glued polygons, or None if it is not one simple loop.

    Shared edges (after splitting at T-junctions) cancel in opposite pairs;
    the surviving directed edges are chained into a single loop.
    """
    snap = 1e-7 * max(1.0, max(p.diameter for p in polys))
    coords: dict[tuple[int, int], tuple[float, float]] = {}
    for p in polys:
        for v in p.vertices:
            coords.setdefault(_snap(v, snap), v)
    keys = list(coords)
    edges: dict[tuple, int] = {}
    for p in polys:
        vs = p.vertices
        for i in range(len(vs)):
            a, b = vs[i], vs[(i + 1) % len(vs)]
            ka, kb = _snap(a, snap), _snap(b, snap)
            # split at any vertex of another polygon lying inside this edge
            dx, dy = b[0] - a[0], b[1] - a[1]
            L2 = dx * dx + dy * dy
            inner = []
            for k in keys:
                if k in (ka, kb):
                    continue
                q = coords[k]
                t = ((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / L2
                if 0 < t < 1:
                    px, py = a[0] + t * dx, a[1] + t * dy
                    if math.hypot(q[0] - px, q[1] - py) <= snap:
                        inner.append((t, k))
            chain = [ka] + [k for _, k in sorted(inner)] + [kb]
            for u, v in zip(chain, chain[1:]):
                if edges.get((v, u), 0) > 0:
                    edges[(v, u)] -= 1
                else:
                    edges[(u, v)] = edges.get((u, v), 0) + 1
    live = [e for e, c in edges.items() for _ in range(c)]
    if not live:
        return None
    nxt: dict = {}
    for u, v in live:
        if u in nxt:
            return None  # pinch vertex: not a simple loop
        nxt[u] = v
    start = live[0][0]
    loop = [start]
    cur = nxt[start]
    while cur != start:
        loop.append(cur)
        if cur not in nxt or len(loop) > len(live):
            return None
        cur = nxt[cur]
    if len(loop) != len(live):
        return None
    return [coords[k] for k in loop]


def check_reducible(
    pair: GeneratingPair, tol: Tolerance = DEFAULT_TOL
) -> tuple[tuple[int, ...], Similitude] | None:
    """Search tile subsets ``S`` with ``2 <= |S| < N`` whose union is similar to the polygon.

    Returns ``(indices, similitude)`` for the first witness (smallest subsets
    first), or None if the pair is irreducible.
    """
    tiles = pair.tiles()
    target_area = pair.polygon.area
    for size in range(2, pair.N):
        for subset in itertools.combinations(range(pair.N), size):
            chosen = [tiles[i] for i in subset]
            loop = union_outline(chosen, tol.eps_len)
            if loop is None:
                continue
            pts = corners(loop)
            if len(pts) < 3:
                continue
            try:
                u = Polygon(pts, tol=tol)
            except ValueError:
                continue
            if abs(u.area - sum(t.area for t in chosen)) > 1e-6 * target_area:
                continue
            g = similar(pair.polygon, u, tol)
            if g is not None:
                return subset, g
    return None


def expand(pair: GeneratingPair, i: int, tol: Tolerance = DEFAULT_TOL) -> GeneratingPair:
    """Replace map ``f_i`` by ``{f_i o f_n}``: the trivial way to make a reducible pair."""
    if not 0 <= i < pair.N:
        raise IndexError(i)
    maps = list(pair.maps[:i]) + [compose(pair.maps[i], g) for g in pair.maps] + list(pair.maps[i + 1 :])
    new, _ = validate_pair(pair.polygon, maps, tol, name=f"{pair.name}+expand{i + 1}")
    return new


# ---------------------------------------------------------------------------
# JSON


def pair_to_dict(pair: GeneratingPair) -> dict:
    return {
        "name": pair.name,
        "vertices": [[x, y] for x, y in pair.polygon.vertices],
        "maps": [dict(zip("abcd", f.as_tuple()[:4]), tx=f.tx, ty=f.ty) for f in pair.maps],
        "exponents": list(pair.exponents),
        "scale": pair.scale,
    }


def dumps_pair(pair: GeneratingPair) -> str:
    # repr-based float formatting round-trips doubles exactly
    return json.dumps(pair_to_dict(pair), indent=2)


def pair_from_dict(data: dict, tol: Tolerance = DEFAULT_TOL, validate: bool = True) -> GeneratingPair:
    """Parse the pair JSON schema.  With ``validate`` the pair is re-certified."""
    try:
        poly = Polygon(data["vertices"], tol=tol)
        maps = [
            Similitude(m["a"], m["b"], m["c"], m["d"], m["tx"], m["ty"]) for m in data["maps"]
        ]
        name = str(data.get("name", ""))
    except (KeyError, TypeError) as exc:
        raise PairError(f"malformed pair description: {exc}") from exc
    if validate:
        pair, _ = validate_pair(poly, maps, tol, name=name)
        return pair
    return GeneratingPair(
        poly, tuple(maps), tuple(int(a) for a in data["exponents"]), float(data["scale"]), name
    )


def loads_pair(text: str, tol: Tolerance = DEFAULT_TOL, validate: bool = True) -> GeneratingPair:
    return pair_from_dict(json.loads(text), tol, validate)
