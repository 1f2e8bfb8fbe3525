"""Planar primitives with tolerance-banded predicates.

Similitudes are stored as a 2x2 linear part plus a translation,
``x -> L x + t``.  Polygons are simple, counterclockwise vertex loops.
Everything here is an immutable value; operations are pure.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class GeometryError(ValueError):
    """Base class for geometric input errors."""


class RatioOne(GeometryError):
    """A similitude with scaling ratio 1 has no unique fixed point to report."""


class DegenerateInput(GeometryError):
    """Polygon is not simple, has too few vertices, or has no area."""


@dataclass(frozen=True)
class Tolerance:
    eps_len: float = 1e-9
    eps_area: float = 1e-9

    def __post_init__(self) -> None:
        if not (self.eps_len > 0 and self.eps_area > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()

# re-project the linear part onto r*U after this many chained compositions
_REORTHO_EVERY = 32


class Point(NamedTuple):
    x: float
    y: float


class Location(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class Similitude:
    """Plane map ``x -> L x + t`` with ``L = ratio * U`` and ``U`` orthogonal.

    The linear part is stored row-major as ``(a, b, c, d)``.  The ratio is
    cached at construction and propagated multiplicatively by `compose`,
    so ``compose(f, g).ratio == f.ratio * g.ratio`` holds exactly.
    """

    __slots__ = ("a", "b", "c", "d", "tx", "ty", "ratio", "direct", "_chain")

    def __init__(
        self,
        a: float,
        b: float,
        c: float,
        d: float,
        tx: float = 0.0,
        ty: float = 0.0,
        *,
        ratio: float | None = None,
        tol: float = 1e-9,
    ) -> None:
        vals = (a, b, c, d, tx, ty)
        if not all(math.isfinite(v) for v in vals):
            raise GeometryError("similitude coefficients must be finite")
        det = a * d - b * c
        if det == 0.0:
            raise GeometryError("singular linear part")
        r = math.sqrt(abs(det)) if ratio is None else ratio
        if not r > 0:
            raise GeometryError("ratio must be positive")
        direct = det > 0
        if direct:
            bad = max(abs(a - d), abs(b + c))
        else:
            bad = max(abs(a + d), abs(b - c))
        if bad > tol * max(1.0, r):
            raise GeometryError("linear part is not a scaled orthogonal matrix")
        if abs(math.hypot(a, c) - r) > tol * max(1.0, r):
            raise GeometryError("cached ratio disagrees with the linear part")
        self._set(float(a), float(b), float(c), float(d), float(tx), float(ty), r, direct, 0)

    def _set(self, a, b, c, d, tx, ty, ratio, direct, chain):
        self.a, self.b, self.c, self.d = a, b, c, d
        self.tx, self.ty = tx, ty
        self.ratio = ratio
        self.direct = direct
        self._chain = chain

    @classmethod
    def _raw(cls, a, b, c, d, tx, ty, ratio, direct, chain=0) -> "Similitude":
        obj = cls.__new__(cls)
        obj._set(a, b, c, d, tx, ty, ratio, direct, chain)
        return obj

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls) -> "Similitude":
        return cls._raw(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, True)

    @classmethod
    def from_matrix(cls, m: Sequence[float]) -> "Similitude":
        """Build from ``[a, b, c, d, tx, ty]``."""
        a, b, c, d, tx, ty = m
        return cls(a, b, c, d, tx, ty)

    @classmethod
    def rotation_scale(
        cls,
        ratio: float,
        angle: float = 0.0,
        center: Sequence[float] = (0.0, 0.0),
        reflect: bool = False,
    ) -> "Similitude":
        """Stretch rotation (or stretch reflection in the x-axis then rotation) fixing `center`."""
        co, si = ratio * math.cos(angle), ratio * math.sin(angle)
        if reflect:
            a, b, c, d = co, si, si, -co
        else:
            a, b, c, d = co, -si, si, co
        cx, cy = center
        tx = cx - (a * cx + b * cy)
        ty = cy - (c * cx + d * cy)
        return cls._raw(a, b, c, d, tx, ty, ratio, not reflect)

    @classmethod
    def from_point_pairs(
        cls,
        p0: Sequence[float],
        p1: Sequence[float],
        q0: Sequence[float],
        q1: Sequence[float],
        direct: bool = True,
    ) -> "Similitude":
        """The unique similitude of the given handedness with p0->q0, p1->q1."""
        zp0, zp1 = complex(*p0), complex(*p1)
        zq0, zq1 = complex(*q0), complex(*q1)
        dp = zp1 - zp0
        if dp == 0:
            raise GeometryError("source points coincide")
        if direct:
            m = (zq1 - zq0) / dp
            t = zq0 - m * zp0
            a, b, c, d = m.real, -m.imag, m.imag, m.real
        else:
            m = (zq1 - zq0) / dp.conjugate()
            t = zq0 - m * zp0.conjugate()
            a, b, c, d = m.real, m.imag, m.imag, -m.real
        return cls._raw(a, b, c, d, t.real, t.imag, abs(m), direct)

    # -- behaviour ----------------------------------------------------

    @property
    def orientation(self) -> str:
        return "direct" if self.direct else "indirect"

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.tx, self.ty)

    def __call__(self, p: Sequence[float]) -> Point:
        x, y = p
        return Point(self.a * x + self.b * y + self.tx, self.c * x + self.d * y + self.ty)

    def apply(self, pts: Iterable[Sequence[float]]) -> list[Point]:
        a, b, c, d, tx, ty = self.a, self.b, self.c, self.d, self.tx, self.ty
        return [Point(a * x + b * y + tx, c * x + d * y + ty) for x, y in pts]

    def __matmul__(self, other: "Similitude") -> "Similitude":
        return compose(self, other)

    def __repr__(self) -> str:
        return (
            f"Similitude(a={self.a:.12g}, b={self.b:.12g}, c={self.c:.12g}, "
            f"d={self.d:.12g}, tx={self.tx:.12g}, ty={self.ty:.12g}, {self.orientation})"
        )

    def close_to(self, other: "Similitude", eps: float = 1e-9) -> bool:
        scale = max(1.0, abs(self.tx), abs(self.ty), self.ratio)
        return all(abs(u - v) <= eps * scale for u, v in zip(self.as_tuple(), other.as_tuple()))


def _reorthonormalize(a, b, c, d, ratio, direct):
    if direct:
        u, v = (a + d) / 2, (c - b) / 2
        n = math.hypot(u, v)
        u, v = u / n * ratio, v / n * ratio
        return u, -v, v, u
    u, v = (a - d) / 2, (b + c) / 2
    n = math.hypot(u, v)
    u, v = u / n * ratio, v / n * ratio
    return u, v, v, -u


def compose(f: Similitude, g: Similitude) -> Similitude:
    """``f o g``: apply `g` first, then `f`."""
    a = f.a * g.a + f.b * g.c
    b = f.a * g.b + f.b * g.d
    c = f.c * g.a + f.d * g.c
    d = f.c * g.b + f.d * g.d
    tx = f.a * g.tx + f.b * g.ty + f.tx
    ty = f.c * g.tx + f.d * g.ty + f.ty
    ratio = f.ratio * g.ratio
    direct = f.direct == g.direct
    chain = f._chain + g._chain + 1
    if chain >= _REORTHO_EVERY:
        a, b, c, d = _reorthonormalize(a, b, c, d, ratio, direct)
        chain = 0
    return Similitude._raw(a, b, c, d, tx, ty, ratio, direct, chain)


def invert(f: Similitude) -> Similitude:
    # L^-1 = L^T / r^2 for L = r U
    r2 = f.ratio * f.ratio
    a, b, c, d = f.a / r2, f.c / r2, f.b / r2, f.d / r2
    tx = -(a * f.tx + b * f.ty)
    ty = -(c * f.tx + d * f.ty)
    return Similitude._raw(a, b, c, d, tx, ty, 1.0 / f.ratio, f.direct, f._chain)


def fixed_point(f: Similitude, tol: Tolerance = DEFAULT_TOL) -> Point:
    if abs(f.ratio - 1.0) <= tol.eps_len:
        raise RatioOne("scaling ratio is 1; fixed point not unique or absent")
    # (I - L) x = t
    m00, m01, m10, m11 = 1.0 - f.a, -f.b, -f.c, 1.0 - f.d
    det = m00 * m11 - m01 * m10
    x = (m11 * f.tx - m01 * f.ty) / det
    y = (-m10 * f.tx + m00 * f.ty) / det
    return Point(x, y)


# ---------------------------------------------------------------------------
# polygons


def _signed_area(pts: Sequence[Sequence[float]]) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_cross(p1, p2, q1, q2, eps) -> bool:
    """True if the closed segments share a point (within eps)."""
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True
    for a, b, c, d in ((q1, q2, p1, d1), (q1, q2, p2, d2), (p1, p2, q1, d3), (p1, p2, q2, d4)):
        if abs(d) <= eps and _on_segment(a, b, c, eps):
            return True
    return False


def _on_segment(a, b, p, eps) -> bool:
    return (
        min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
        and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps
    )


class Polygon:
    """Simple polygon with counterclockwise vertices.

    Clockwise input is reversed.  Construction validates simplicity unless
    ``check=False`` (used internally for images of an already valid polygon).
    """

    __slots__ = ("vertices", "_tris", "_bbox", "_area")

    def __init__(
        self,
        vertices: Iterable[Sequence[float]],
        *,
        check: bool = True,
        tol: Tolerance = DEFAULT_TOL,
    ) -> None:
        pts = tuple(Point(float(x), float(y)) for x, y in vertices)
        if check:
            if len(pts) < 3:
                raise DegenerateInput("a polygon needs at least 3 vertices")
            if not all(math.isfinite(c) for p in pts for c in p):
                raise DegenerateInput("non-finite coordinate")
        a = _signed_area(pts)
        if a < 0:
            pts = pts[::-1]
            a = -a
        if check:
            if a <= tol.eps_area * 1e-3:
                raise DegenerateInput("polygon has no area")
            _check_simple(pts, tol.eps_len)
        self.vertices = pts
        self._area = a
        self._tris = None
        self._bbox = None

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __repr__(self) -> str:
        body = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in self.vertices)
        return f"Polygon([{body}])"

    @property
    def area(self) -> float:
        return self._area

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        if self._bbox is None:
            xs = [p[0] for p in self.vertices]
            ys = [p[1] for p in self.vertices]
            self._bbox = (min(xs), min(ys), max(xs), max(ys))
        return self._bbox

    @property
    def centroid(self) -> Point:
        cx = cy = 0.0
        v = self.vertices
        n = len(v)
        for i in range(n):
            x1, y1 = v[i]
            x2, y2 = v[(i + 1) % n]
            k = x1 * y2 - x2 * y1
            cx += (x1 + x2) * k
            cy += (y1 + y2) * k
        return Point(cx / (6 * self._area), cy / (6 * self._area))

    @property
    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return math.hypot(x1 - x0, y1 - y0)

    def triangles(self) -> list[tuple[Point, Point, Point]]:
        """Ear-clipping triangulation, computed once and cached."""
        if self._tris is None:
            self._tris = [tuple(self.vertices[i] for i in t) for t in triangulate(self.vertices)]
        return self._tris

    def transformed(self, f: Similitude) -> "Polygon":
        """Image under `f`; reuses the cached triangulation."""
        pts = f.apply(self.vertices)
        out = Polygon.__new__(Polygon)
        if f.direct:
            out.vertices = tuple(pts)
        else:
            out.vertices = tuple(pts[::-1])
        out._area = self._area * f.ratio * f.ratio
        out._bbox = None
        if self._tris is not None:
            if f.direct:
                out._tris = [tuple(f.apply(t)) for t in self._tris]
            else:
                out._tris = [tuple(f.apply(t[::-1])) for t in self._tris]
        else:
            out._tris = None
        return out


def _check_simple(pts: Sequence[Point], eps: float) -> None:
    n = len(pts)
    for i in range(n):
        if math.dist(pts[i], pts[(i + 1) % n]) <= eps:
            raise DegenerateInput(f"repeated vertex at index {i}")
    for i in range(n):
        p1, p2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            q1, q2 = pts[j], pts[(j + 1) % n]
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent edges: only a fold-back is illegal
                shared = p2 if j == i + 1 else p1
                other_p = p1 if j == i + 1 else p2
                other_q = q2 if j == i + 1 else q1
                u = (other_p[0] - shared[0], other_p[1] - shared[1])
                v = (other_q[0] - shared[0], other_q[1] - shared[1])
                crs = u[0] * v[1] - u[1] * v[0]
                dot = u[0] * v[0] + u[1] * v[1]
                if abs(crs) <= eps * math.hypot(*u) * math.hypot(*v) and dot > 0:
                    raise DegenerateInput(f"edges {i} and {j} fold back on each other")
                continue
            if _segments_cross(p1, p2, q1, q2, eps):
                raise DegenerateInput(f"edges {i} and {j} intersect")


def triangulate(pts: Sequence[Sequence[float]]) -> list[tuple[int, int, int]]:
    """Ear clipping for a simple CCW polygon; straight-angle vertices are dropped."""
    idx = list(range(len(pts)))
    tris: list[tuple[int, int, int]] = []
    scale = max(max(abs(c) for c in p) for p in pts) or 1.0
    eps = 1e-14 * scale * scale
    guard = 0
    while len(idx) > 3:
        n = len(idx)
        clipped = False
        for k in range(n):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = pts[i0], pts[i1], pts[i2]
            cr = _cross(a, b, c)
            if abs(cr) <= eps and (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) > 0:
                del idx[k]
                clipped = True
                break
            if cr <= eps:
                continue
            if any(
                _in_triangle_closed(pts[j], a, b, c, eps)
                for j in idx
                if j not in (i0, i1, i2) and pts[j] not in (a, b, c)
            ):
                continue
            tris.append((i0, i1, i2))
            del idx[k]
            clipped = True
            break
        if not clipped:
            guard += 1
            if guard > 1:
                raise DegenerateInput("ear clipping failed; polygon not simple?")
            # numerically stuck: clip the most convex vertex
            k = max(range(n), key=lambda k: _cross(pts[idx[k - 1]], pts[idx[k]], pts[idx[(k + 1) % n]]))
            tris.append((idx[k - 1], idx[k], idx[(k + 1) % n]))
            del idx[k]
    if len(idx) == 3 and _cross(*(pts[i] for i in idx)) > eps:
        tris.append(tuple(idx))
    return tris


def _in_triangle_closed(p, a, b, c, eps) -> bool:
    return _cross(a, b, p) >= -eps and _cross(b, c, p) >= -eps and _cross(c, a, p) >= -eps


def area(p: Polygon) -> float:
    return p.area


def _clip_area(subject, clip) -> float:
    """Area of the intersection of two CCW convex polygons (Sutherland-Hodgman)."""
    out = list(subject)
    m = len(clip)
    for i in range(m):
        if not out:
            return 0.0
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % m]
        ex, ey = bx - ax, by - ay
        inp = out
        out = []
        n = len(inp)
        px, py = inp[-1]
        pin = ex * (py - ay) - ey * (px - ax) >= 0.0
        for j in range(n):
            qx, qy = inp[j]
            qin = ex * (qy - ay) - ey * (qx - ax) >= 0.0
            if qin != pin:
                # segment p->q crosses the clip line
                dx, dy = qx - px, qy - py
                den = ex * dy - ey * dx
                if den != 0.0:
                    t = (ey * (px - ax) - ex * (py - ay)) / den
                    out.append((px + t * dx, py + t * dy))
            if qin:
                out.append((qx, qy))
            px, py, pin = qx, qy, qin
    if len(out) < 3:
        return 0.0
    return max(0.0, _signed_area(out))


def _tri_bbox(t):
    xs = (t[0][0], t[1][0], t[2][0])
    ys = (t[0][1], t[1][1], t[2][1])
    return min(xs), min(ys), max(xs), max(ys)


def bbox_overlap(b1, b2, eps: float = 0.0) -> bool:
    """True if the boxes overlap with positive extent in both axes (beyond eps)."""
    return (
        min(b1[2], b2[2]) - max(b1[0], b2[0]) > eps
        and min(b1[3], b2[3]) - max(b1[1], b2[1]) > eps
    )


def intersection_area(p: Polygon, q: Polygon) -> float:
    """Area of ``p & q`` for simple (possibly non-convex) polygons.

    Both polygons are triangulated; triangle pairs are clipped against each
    other and the convex pieces summed.
    """
    if not bbox_overlap(p.bbox, q.bbox):
        return 0.0
    total = 0.0
    qt = [(t, _tri_bbox(t)) for t in q.triangles()]
    for s in p.triangles():
        sb = _tri_bbox(s)
        for t, tb in qt:
            if bbox_overlap(sb, tb):
                total += _clip_area(s, t)
    return total


def _point_segment_distance(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.dist(p, a)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def contains(p: Polygon, x: Sequence[float], tol: Tolerance = DEFAULT_TOL) -> Location:
    """Classify `x` against `p`; points within eps_len of an edge are on the boundary."""
    v = p.vertices
    n = len(v)
    for i in range(n):
        if _point_segment_distance(x, v[i], v[(i + 1) % n]) <= tol.eps_len:
            return Location.BOUNDARY
    px, py = x
    inside = False
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if xc > px:
                inside = not inside
    return Location.INSIDE if inside else Location.OUTSIDE


def boundary_distance(p: Polygon, x: Sequence[float]) -> float:
    v = p.vertices
    return min(_point_segment_distance(x, v[i], v[(i + 1) % len(v)]) for i in range(len(v)))


# ---------------------------------------------------------------------------
# congruence and similarity


def corners(p: Polygon | Sequence[Sequence[float]], eps: float = 1e-9) -> list[Point]:
    """Vertices with straight-angle (collinear) vertices removed."""
    pts = list(p.vertices if isinstance(p, Polygon) else p)
    changed = True
    while changed and len(pts) > 3:
        changed = False
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            ab, bc = math.dist(a, b), math.dist(b, c)
            if abs(_cross(a, b, c)) <= eps * max(ab, bc, 1e-300) * max(ab, bc, 1.0):
                if (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) > 0:
                    del pts[i]
                    changed = True
                    break
    return pts


def _signature(pts: Sequence[Point]) -> list[tuple[float, float]]:
    """Per-vertex (length of outgoing edge, interior angle) for a CCW loop."""
    n = len(pts)
    sig = []
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        u = complex(a[0] - b[0], a[1] - b[1])
        v = complex(c[0] - b[0], c[1] - b[1])
        # interior angle measured counterclockwise from the outgoing to the incoming edge
        ang = cmath.phase(u / v) % (2 * math.pi)
        sig.append((abs(v), ang))
    return sig


def shape_key(p: Polygon, ndigits: int = 6, scale_free: bool = False) -> tuple:
    """Canonical hashable key: smallest cyclic (length, angle) sequence over both orientations."""
    pts = corners(p)
    best = None
    for seq in (pts, [(x, -y) for x, y in pts][::-1]):
        sig = _signature(seq)
        if scale_free:
            per = sum(L for L, _ in sig)
            sig = [(L / per, a) for L, a in sig]
        sig = [(round(L, ndigits), round(a, ndigits)) for L, a in sig]
        for k in range(len(sig)):
            cand = tuple(sig[k:] + sig[:k])
            if best is None or cand < best:
                best = cand
    return best


def _motions(p: Polygon, q: Polygon, tol: Tolerance, unit: bool, first: bool) -> list[Similitude]:
    pc, qc = corners(p), corners(q)
    n = len(pc)
    if n != len(qc):
        return []
    ps, qs = _signature(pc), _signature(qc)
    qrev = qc[::-1]
    # reversed loop (clockwise) signature: outgoing edge from each vertex in reverse order
    qs_rev = []
    m = len(qrev)
    for i in range(m):
        a, b, c = qrev[i - 1], qrev[i], qrev[(i + 1) % m]
        u = complex(a[0] - b[0], a[1] - b[1])
        v = complex(c[0] - b[0], c[1] - b[1])
        qs_rev.append((abs(v), cmath.phase(v / u) % (2 * math.pi)))
    atol = 1e-6
    extent = max(1.0, q.diameter, max(abs(c) for pt in qc for c in pt))
    found: list[Similitude] = []
    for direct, qq, qsig in ((True, qc, qs), (False, qrev, qs_rev)):
        for k in range(n):
            rho = qsig[k][0] / ps[0][0]
            if unit and abs(rho - 1.0) > 1e-6:
                continue
            ok = True
            for i in range(n):
                Lq, aq = qsig[(k + i) % n]
                Lp, ap = ps[i]
                if abs(Lq - rho * Lp) > atol * rho * Lp or abs(aq - ap) > atol:
                    ok = False
                    break
            if not ok:
                continue
            f = Similitude.from_point_pairs(pc[0], pc[1], qq[k], qq[(k + 1) % n], direct=direct)
            if unit:
                f = Similitude._raw(*f.as_tuple(), 1.0, f.direct) if abs(f.ratio - 1.0) < 1e-6 else f
            if all(
                math.dist(f(pc[i]), qq[(k + i) % n]) <= tol.eps_len * extent * 10
                for i in range(n)
            ):
                found.append(f)
                if first:
                    return found
    return found


def congruent(p: Polygon, q: Polygon, tol: Tolerance = DEFAULT_TOL) -> Similitude | None:
    """A ratio-1 similitude (reflections allowed) carrying p onto q, or None."""
    if abs(p.area - q.area) > 1e-6 * max(p.area, q.area):
        return None
    found = _motions(p, q, tol, unit=True, first=True)
    return found[0] if found else None


def similar(p: Polygon, q: Polygon, tol: Tolerance = DEFAULT_TOL) -> Similitude | None:
    """A similitude carrying p onto q, or None."""
    found = _motions(p, q, tol, unit=False, first=True)
    return found[0] if found else None


def all_motions(p: Polygon, q: Polygon, tol: Tolerance = DEFAULT_TOL) -> list[Similitude]:
    """Every ratio-1 similitude carrying p onto q (more than one if q has symmetries)."""
    if abs(p.area - q.area) > 1e-6 * max(p.area, q.area):
        return []
    return _motions(p, q, tol, unit=True, first=False)
