"""Theta-driven tilings: patches ``T(theta, k)``, window tilings, and their verification.

A tile is ``t(theta, k, sigma) = f_{-(theta|k)} o f_sigma (p)`` for an
address ``sigma`` on the frontier ``S_{e(theta|k)}``.  Its class
``e(sigma) - e(theta|k)`` says which power of ``s`` it is scaled by.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .addresses import (
    Address,
    LevelTooLarge,
    PrefixExhausted,
    ThetaStream,
    format_address,
    frontier_size,
    inverse_map_of,
    inverse_prefix,
    map_of,
    parse_address,
    parse_stream,
    thread_count,
    weight,
)
from .geometry import (
    DEFAULT_TOL,
    Location,
    Point,
    Polygon,
    Similitude,
    Tolerance,
    all_motions,
    bbox_overlap,
    boundary_distance,
    compose,
    congruent,
    contains,
    fixed_point,
    intersection_area,
    invert,
)
from .pairs import GeneratingPair


class TilingError(RuntimeError):
    pass


class AddressNotOnFrontier(ValueError):
    pass


class DepthTooShallow(TilingError):
    pass


class WeightMismatch(ValueError):
    pass


class TailMismatch(ValueError):
    pass


class CongruenceFailure(TilingError):
    pass


class WindowNotCovered(TilingError):
    pass


class TileLimitExceeded(TilingError):
    pass


DEFAULT_MAX_K = 20
DEFAULT_TILE_CAP = 10**6
COVER_SAMPLES = 256


@dataclass(frozen=True)
class Tile:
    placement: Similitude
    shape: Polygon
    address: Address
    level: int
    size_class: int


@dataclass(frozen=True)
class Patch:
    tiles: tuple[Tile, ...]
    theta: ThetaStream
    level: int
    support: Polygon

    def __len__(self) -> int:
        return len(self.tiles)


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("window radius must be positive")

    @classmethod
    def of(cls, cx: float, cy: float, radius: float) -> "Disk":
        return cls(Point(float(cx), float(cy)), float(radius))

    def meets_box(self, box) -> bool:
        x0, y0, x1, y1 = box
        cx, cy = self.center
        dx = max(x0 - cx, 0.0, cx - x1)
        dy = max(y0 - cy, 0.0, cy - y1)
        return dx * dx + dy * dy <= self.radius * self.radius

    def meets(self, poly: Polygon) -> bool:
        if contains(poly, self.center) is not Location.OUTSIDE:
            return True
        return boundary_distance(poly, self.center) < self.radius

    def holds_point(self, p: Sequence[float]) -> bool:
        return math.dist(p, self.center) <= self.radius


@dataclass(frozen=True)
class WindowTiling:
    window: Disk
    tiles: tuple[Tile, ...]
    covered: bool
    level: int
    theta: ThetaStream

    def __len__(self) -> int:
        return len(self.tiles)


@dataclass(frozen=True)
class PrototileSet:
    """One representative per congruence class, largest first, with tile counts."""

    representatives: tuple[Polygon, ...]
    counts: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.representatives)


# ---------------------------------------------------------------------------
# generation


def _walk(
    pair: GeneratingPair,
    outer: Similitude,
    n: int,
    keep: Callable[[Similitude], bool] | None = None,
    root: Address = (),
) -> Iterator[tuple[Address, Similitude, int]]:
    """Depth-first, lexicographic walk of ``S_n`` below ``root``.

    Yields ``(sigma, outer o f_sigma, e(sigma))``.  Subtrees whose placed
    region fails ``keep`` are skipped.
    """
    exps, maps = pair.exponents, pair.maps
    e0 = sum(exps[i - 1] for i in root)
    stack = [(root, compose(outer, map_of(root, pair)) if root else outer, e0)]
    while stack:
        sigma, F, e = stack.pop()
        if keep is not None and not keep(F):
            continue
        if e >= n:
            yield sigma, F, e
            continue
        for i in range(pair.N, 0, -1):
            stack.append((sigma + (i,), compose(F, maps[i - 1]), e + exps[i - 1]))


def _collect(pair, outer, n, keep, make, workers: int | None, cap: int):
    """Run `_walk` split over top-level branches; order is the same for any worker count."""
    workers = workers or thread_count()

    def branch(i):
        out = []
        for sigma, F, e in _walk(pair, outer, n, keep, root=(i,)):
            t = make(sigma, F, e)
            if t is not None:
                out.append(t)
                if len(out) > cap:
                    raise TileLimitExceeded(f"more than {cap} tiles")
        return out

    roots = range(1, pair.N + 1)
    if workers > 1 and pair.N > 1:
        with ThreadPoolExecutor(max_workers=min(workers, pair.N)) as pool:
            parts = list(pool.map(branch, roots))
    else:
        parts = [branch(i) for i in roots]
    tiles = [t for part in parts for t in part]
    if len(tiles) > cap:
        raise TileLimitExceeded(f"more than {cap} tiles")
    return tiles


def _tile(pair, placement, sigma, level, size_class) -> Tile:
    return Tile(placement, pair.polygon.transformed(placement), sigma, level, size_class)


def level_weight(pair: GeneratingPair, theta: ThetaStream, k: int) -> int:
    return weight(theta.prefix(k), pair)[0]


def make_tile(pair: GeneratingPair, theta: ThetaStream, k: int, sigma: Sequence[int]) -> Tile:
    if k < 1:
        raise ValueError("level must be >= 1")
    sigma = tuple(sigma)
    n = level_weight(pair, theta, k)
    e, e_minus = weight(sigma, pair)
    if not e >= n > e_minus:
        raise AddressNotOnFrontier(f"{format_address(sigma)} is not on the frontier S_{n}")
    placement = compose(inverse_prefix(theta, k, pair), map_of(sigma, pair))
    return _tile(pair, placement, sigma, k, e - n)


def patch(
    pair: GeneratingPair,
    theta: ThetaStream,
    k: int,
    cap: int = DEFAULT_TILE_CAP,
    workers: int | None = None,
) -> Patch:
    """``T(theta, k)``: one tile per address of ``S_{e(theta|k)}``, at most ``cap`` of them."""
    if k < 1:
        raise ValueError("level must be >= 1")
    n = level_weight(pair, theta, k)
    size = frontier_size(pair.exponents, n)
    if size > cap:
        raise LevelTooLarge(f"|S_{n}| = {size} exceeds the cap {cap}")
    g = inverse_prefix(theta, k, pair)
    tiles = _collect(
        pair, g, n, None, lambda sigma, F, e: _tile(pair, F, sigma, k, e - n), workers, cap
    )
    return Patch(tuple(tiles), theta, k, pair.polygon.transformed(g))


def _disk_samples(disk: Disk, count: int = COVER_SAMPLES) -> list[Point]:
    cx, cy = disk.center
    R = disk.radius
    return [
        Point(cx + R * math.cos(2 * math.pi * i / count), cy + R * math.sin(2 * math.pi * i / count))
        for i in range(count)
    ]


def covers(support: Polygon, disk: Disk, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Sampled test that ``support`` contains the disk: every boundary sample is not outside."""
    return all(contains(support, q, tol) is not Location.OUTSIDE for q in _disk_samples(disk))


def generate_window(
    pair: GeneratingPair,
    theta: ThetaStream,
    window: Disk,
    max_k: int = DEFAULT_MAX_K,
    tile_cap: int = DEFAULT_TILE_CAP,
    workers: int | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> WindowTiling:
    """Tiles of ``T(theta)`` meeting a disk.

    Blows ``p`` up level by level until the support covers the disk (or
    ``max_k`` is reached) and then walks the patch at that level, pruning
    subtrees whose bounding box misses the disk.
    """
    limit = theta.max_length()
    if limit is not None:
        max_k = min(max_k, limit)
    if max_k < 1:
        raise PrefixExhausted("stream too short for any level")
    prefix = theta.prefix(max_k)
    g = Similitude.identity()
    covered = False
    k = 0
    for k in range(1, max_k + 1):
        g = compose(g, invert(pair.maps[prefix[k - 1] - 1]))
        if covers(pair.polygon.transformed(g), window, tol):
            covered = True
            break
    n = weight(prefix[:k], pair)[0]
    poly = pair.polygon

    def keep(F: Similitude) -> bool:
        return window.meets_box(_image_box(poly, F))

    def make(sigma, F, e):
        shape = poly.transformed(F)
        if not window.meets(shape):
            return None
        return Tile(F, shape, sigma, k, e - n)

    tiles = _collect(pair, g, n, keep, make, workers, tile_cap)
    return WindowTiling(window, tuple(tiles), covered, k, theta)


def auto_window(
    pair: GeneratingPair, theta: ThetaStream, radius: float, max_k: int = DEFAULT_MAX_K
) -> Disk:
    """Disk of the given radius about the centroid of the first support that holds it.

    Useful when the supports grow into a wedge rather than around ``p``.
    """
    limit = theta.max_length()
    if limit is not None:
        max_k = min(max_k, limit)
    prefix = theta.prefix(max_k)
    g = Similitude.identity()
    disk = Disk(pair.polygon.centroid, radius)
    for k in range(1, max_k + 1):
        g = compose(g, invert(pair.maps[prefix[k - 1] - 1]))
        support = pair.polygon.transformed(g)
        disk = Disk(support.centroid, radius)
        if covers(support, disk):
            break
    return disk


def _image_box(poly: Polygon, F: Similitude):
    pts = F.apply(poly.vertices)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


# ---------------------------------------------------------------------------
# lookup helpers


class _ShapeIndex:
    """Spatial hash of tiles by centroid, for exact-shape lookups."""

    def __init__(self, tiles: Iterable[Tile], cell: float):
        self.cell = cell
        self.buckets: dict[tuple[int, int], list[Tile]] = defaultdict(list)
        for t in tiles:
            self.buckets[self._key(t.shape.centroid)].append(t)

    def _key(self, p):
        return (math.floor(p[0] / self.cell), math.floor(p[1] / self.cell))

    def near(self, p) -> Iterator[Tile]:
        i, j = self._key(p)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                yield from self.buckets.get((i + di, j + dj), ())

    def find_shape(self, shape: Polygon, eps: float) -> Tile | None:
        for t in self.near(shape.centroid):
            if same_shape(t.shape, shape, eps):
                return t
        return None

    def find_placement(self, f: Similitude, centroid, eps: float) -> Tile | None:
        for t in self.near(centroid):
            if t.placement.close_to(f, eps):
                return t
        return None


def _index_for(tiles: Sequence[Tile]) -> _ShapeIndex:
    size = min((math.sqrt(t.shape.area) for t in tiles), default=1.0)
    return _ShapeIndex(tiles, max(size, 1e-9))


def same_shape(p: Polygon, q: Polygon, eps: float = 1e-7) -> bool:
    """Same point set: equal vertex count and every vertex of p near a vertex of q."""
    if len(p) != len(q):
        return False
    scale = eps * max(1.0, p.diameter)
    return all(any(math.dist(u, v) <= scale for v in q.vertices) for u in p.vertices)


def _match_eps(tol: Tolerance) -> float:
    # accumulated composition error grows with depth; 1e3 * eps_len is well below any tile size
    return max(tol.eps_len * 1e3, 1e-7)


# ---------------------------------------------------------------------------
# verification


def tiles_nested(coarse: Sequence[Tile], fine: Sequence[Tile], tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff every placed tile of ``coarse`` occurs among ``fine``."""
    index = _index_for(fine)
    eps = _match_eps(tol)
    return all(index.find_placement(t.placement, t.shape.centroid, eps) is not None for t in coarse)


@dataclass(frozen=True)
class PartitionReport:
    tiles: int
    area_defect: float  # relative to the support area
    max_overlap: float

    def passed(self, rel_tol: float = 1e-8, overlap_tol: float = 1e-9) -> bool:
        return self.area_defect <= rel_tol and self.max_overlap < overlap_tol


def partition_report(tiles: Sequence[Tile], support_area: float) -> PartitionReport:
    """Area sum against the support and the largest pairwise overlap.

    Only pairs whose bounding boxes overlap with positive extent are
    clipped; a uniform grid finds those pairs.
    """
    total = math.fsum(t.shape.area for t in tiles)
    cell = max((t.shape.diameter for t in tiles), default=1.0)
    grid: dict[tuple[int, int], list[int]] = defaultdict(list)
    boxes = [t.shape.bbox for t in tiles]
    for i, (x0, y0, x1, y1) in enumerate(boxes):
        for a in range(math.floor(x0 / cell), math.floor(x1 / cell) + 1):
            for b in range(math.floor(y0 / cell), math.floor(y1 / cell) + 1):
                grid[(a, b)].append(i)
    seen = set()
    worst = 0.0
    eps = 1e-12 * cell
    for members in grid.values():
        for x, i in enumerate(members):
            for j in members[x + 1 :]:
                if (i, j) in seen or not bbox_overlap(boxes[i], boxes[j], eps):
                    continue
                seen.add((i, j))
                worst = max(worst, intersection_area(tiles[i].shape, tiles[j].shape))
    return PartitionReport(len(tiles), abs(total - support_area) / support_area, worst)


def check_nested(pair: GeneratingPair, theta: ThetaStream, k: int, tol: Tolerance = DEFAULT_TOL) -> bool:
    return tiles_nested(patch(pair, theta, k).tiles, patch(pair, theta, k + 1).tiles, tol)


def prototiles(tiles: Patch | WindowTiling | Sequence[Tile], tol: Tolerance = DEFAULT_TOL) -> PrototileSet:
    """Congruence classes of the tile shapes, largest first."""
    seq = tiles.tiles if isinstance(tiles, (Patch, WindowTiling)) else tiles
    if not seq:
        raise ValueError("no tiles to classify")
    reps: list[Polygon] = []
    counts: list[int] = []
    for t in seq:
        for i, r in enumerate(reps):
            if congruent(r, t.shape, tol) is not None:
                counts[i] += 1
                break
        else:
            reps.append(t.shape)
            counts.append(1)
    order = sorted(range(len(reps)), key=lambda i: -reps[i].area)
    return PrototileSet(tuple(reps[i] for i in order), tuple(counts[i] for i in order))


def check_self_similar(
    pair: GeneratingPair,
    alpha: Sequence[int],
    depth: int,
    theta: ThetaStream | None = None,
    tol: Tolerance = DEFAULT_TOL,
    phi: Similitude | None = None,
) -> bool:
    """Check that ``phi = f_{-alpha}`` blows each tile of ``T(theta, depth)`` up
    into a union of tiles of ``T(theta, depth + |alpha|)``.

    ``theta`` defaults to the periodic stream ``alpha alpha ...``, for which
    the check must pass; any other stream serves as a negative control.
    An explicit ``phi`` (see `conjugated_self_similarity`) replaces ``f_{-alpha}``.
    """
    alpha = tuple(alpha)
    if not alpha:
        raise ValueError("alpha must be nonempty")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if theta is None:
        theta = ThetaStream.periodic(alpha, pair.N)
    if phi is None:
        phi = inverse_map_of(alpha, pair)
    coarse = patch(pair, theta, depth)
    fine = patch(pair, theta, depth + len(alpha))
    blown = coarse.support.transformed(phi)
    if fine.support.area < blown.area * (1 - 1e-9):
        raise DepthTooShallow("the finer patch is smaller than the blown-up coarse patch")

    images = [(t, t.shape.transformed(phi)) for t in coarse.tiles]
    # bucket each image under every grid cell its bounding box touches
    by_cell: dict[tuple[int, int], list[int]] = defaultdict(list)
    cell = _index_for(coarse.tiles).cell * phi.ratio
    for j, (_, img) in enumerate(images):
        x0, y0, x1, y1 = img.bbox
        for i in range(math.floor(x0 / cell), math.floor(x1 / cell) + 1):
            for k in range(math.floor(y0 / cell), math.floor(y1 / cell) + 1):
                by_cell[(i, k)].append(j)
    filled = [0.0] * len(images)
    for t in fine.tiles:
        c = t.shape.centroid
        key = (math.floor(c[0] / cell), math.floor(c[1] / cell))
        for j in by_cell.get(key, ()):
            img = images[j][1]
            if contains(img, c, tol) is Location.INSIDE:
                inter = intersection_area(img, t.shape)
                if abs(inter - t.shape.area) > 1e-7 * t.shape.area:
                    return False
                filled[j] += t.shape.area
                break
    return all(
        abs(filled[j] - img.area) <= 1e-7 * img.area + tol.eps_area for j, (_, img) in enumerate(images)
    )


def congruence_motion(
    pair: GeneratingPair,
    theta: ThetaStream,
    K: int,
    psi: ThetaStream,
    L: int,
    test_depth: int | None = None,
    tail_checked: int = 32,
    tol: Tolerance = DEFAULT_TOL,
) -> Similitude:
    """Ratio-one map ``g = f_{-(psi|L)} o (f_{-(theta|K)})^-1`` carrying ``T(theta)`` onto ``T(psi)``.

    Requires equal weights of the two prefixes and equal tails after them
    (checked on the next ``tail_checked`` symbols).  With ``test_depth`` the
    map is verified tile by tile on ``T(theta, test_depth)``.
    """
    e_theta = level_weight(pair, theta, K)
    e_psi = level_weight(pair, psi, L)
    if e_theta != e_psi:
        raise WeightMismatch(f"prefix weights differ: {e_theta} != {e_psi}")
    tail_theta = theta.prefix(K + tail_checked)[K:] if theta.max_length() is None else ()
    tail_psi = psi.prefix(L + tail_checked)[L:] if psi.max_length() is None else ()
    if tail_theta and tail_psi and tail_theta != tail_psi:
        raise TailMismatch("the streams do not share a tail after the given prefixes")
    g = compose(inverse_prefix(psi, L, pair), map_of(tuple(reversed(theta.prefix(K))), pair))
    if test_depth is not None:
        if test_depth < K:
            raise ValueError("test depth must be at least K")
        source = patch(pair, theta, test_depth)
        target = patch(pair, psi, L + test_depth - K)
        index = _index_for(target.tiles)
        eps = _match_eps(tol)
        for t in source.tiles:
            if index.find_shape(t.shape.transformed(g), eps) is None:
                raise CongruenceFailure(f"tile {format_address(t.address)} has no image tile")
    return g


def conjugated_self_similarity(pair: GeneratingPair, beta: Sequence[int], alpha: Sequence[int]) -> Similitude:
    """Self-similarity map of ``T(beta alpha alpha ...)`` when ``e(beta) == e(alpha)``.

    The motion ``g`` onto ``T(alpha alpha ...)`` conjugates that tiling's
    map ``f_{-alpha}``: the result is ``g^-1 o f_{-alpha} o g``.
    """
    beta, alpha = tuple(beta), tuple(alpha)
    if not alpha or not beta:
        raise ValueError("alpha and beta must be nonempty")
    theta = ThetaStream.eventually_periodic(beta, alpha, pair.N)
    psi = ThetaStream.periodic(alpha, pair.N)
    g = congruence_motion(pair, theta, len(beta), psi, len(alpha))
    return compose(invert(g), compose(inverse_map_of(alpha, pair), g))


def fills_plane_certificate(
    pair: GeneratingPair, beta: Sequence[int], alpha: Sequence[int], tol: Tolerance = DEFAULT_TOL
) -> bool:
    """True when the fixed point of ``f_alpha`` is strictly inside ``p``.

    Then the blow-ups along ``beta alpha alpha ...`` exhaust the plane; the
    certificate does not depend on ``beta``.
    """
    if not alpha:
        raise ValueError("alpha must be nonempty")
    weight(tuple(beta), pair)  # validates symbols
    x = fixed_point(map_of(tuple(alpha), pair), tol)
    return contains(pair.polygon, x, tol) is Location.INSIDE and boundary_distance(pair.polygon, x) > tol.eps_len


def quasiperiodicity_probe(
    pair: GeneratingPair,
    theta: ThetaStream,
    k: int,
    radius: float,
    center: Sequence[float] | None = None,
    max_k: int = DEFAULT_MAX_K,
    tol: Tolerance = DEFAULT_TOL,
) -> list[Similitude]:
    """Ratio-one motions carrying ``T(theta, k)`` into the tiling near a disk.

    The search set is the window tiling plus the patch itself, so the
    identity is always found.  Candidate motions come from the tiles
    congruent to an anchor tile of the rarest class in the patch.
    """
    if center is None:
        center = pair.polygon.centroid
    window = generate_window(pair, theta, Disk.of(center[0], center[1], radius), max_k, tol=tol)
    if not window.covered:
        raise WindowNotCovered(f"the support at level {window.level} does not cover the disk")
    the_patch = patch(pair, theta, k)
    eps = _match_eps(tol)

    pool = list(window.tiles)
    index = _index_for(pool)
    pool += [t for t in the_patch.tiles if index.find_shape(t.shape, eps) is None]
    index = _index_for(pool)

    counts = Counter(t.size_class for t in the_patch.tiles)
    rare = min(counts, key=lambda c: (counts[c], c))
    anchor = next(t for t in the_patch.tiles if t.size_class == rare)
    found: list[Similitude] = []
    for u in pool:
        if abs(u.shape.area - anchor.shape.area) > 1e-6 * anchor.shape.area:
            continue
        for g in all_motions(anchor.shape, u.shape, tol):
            if any(g.close_to(h, eps) for h in found):
                continue
            if all(index.find_shape(t.shape.transformed(g), eps) is not None for t in the_patch.tiles):
                found.append(g)
    found.sort(key=lambda g: tuple(round(v, 9) for v in (g.tx, g.ty) + g.as_tuple()[:4]))
    return found


# ---------------------------------------------------------------------------
# JSON


@dataclass(frozen=True)
class TilingDocument:
    pair: str
    theta: str
    level: int
    tiles: tuple[Tile, ...]


def tiling_to_dict(pair: GeneratingPair, tiling: Patch | WindowTiling) -> dict:
    doc = {
        "pair": pair.name,
        "theta": tiling.theta.spec(),
        "level": tiling.level,
        "tiles": [
            {
                "address": format_address(t.address),
                "class": t.size_class,
                "matrix": list(t.placement.as_tuple()),
                "vertices": [[x, y] for x, y in t.shape.vertices],
            }
            for t in tiling.tiles
        ],
    }
    if isinstance(tiling, WindowTiling):
        doc["window"] = [tiling.window.center.x, tiling.window.center.y, tiling.window.radius]
        doc["covered"] = tiling.covered
    return doc


def dumps_tiling(pair: GeneratingPair, tiling: Patch | WindowTiling) -> str:
    return json.dumps(tiling_to_dict(pair, tiling), indent=1)


def tiling_from_dict(data: dict) -> TilingDocument:
    try:
        level = int(data["level"])
        tiles = tuple(
            Tile(
                Similitude.from_matrix(t["matrix"]),
                Polygon(t["vertices"], check=False),
                parse_address(t["address"]),
                level,
                int(t["class"]),
            )
            for t in data["tiles"]
        )
        return TilingDocument(str(data["pair"]), str(data["theta"]), level, tiles)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed tiling description: {exc}") from exc


def loads_tiling(text: str) -> TilingDocument:
    return tiling_from_dict(json.loads(text))


def stream_for(pair: GeneratingPair, spec: str) -> ThetaStream:
    return parse_stream(spec, pair.N)
