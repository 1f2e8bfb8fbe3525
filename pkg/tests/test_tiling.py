import json
import math
from dataclasses import replace

import numpy as np
import pytest
from shapely.ops import unary_union

from selfsim.addresses import (
    LevelTooLarge,
    ThetaStream,
    frontier,
    frontier_size,
    inverse_map_of,
    parse_stream,
)
from selfsim.catalog import catalog, entries
from selfsim.geometry import Similitude, compose, invert
from selfsim.tiling import (
    AddressNotOnFrontier,
    DepthTooShallow,
    Disk,
    TailMismatch,
    WeightMismatch,
    WindowNotCovered,
    auto_window,
    check_nested,
    check_self_similar,
    congruence_motion,
    conjugated_self_similarity,
    dumps_tiling,
    fills_plane_certificate,
    generate_window,
    loads_tiling,
    make_tile,
    partition_report,
    patch,
    prototiles,
    quasiperiodicity_probe,
    tiles_nested,
)

from conftest import TAU, shapely_of

ONES = ThetaStream.periodic((1,), 2)
ALT = ThetaStream.periodic((1, 2), 2)


def numpy_fixed_point(f: Similitude):
    """Solve (I - L) x = t directly."""
    lin = np.array([[f.a, f.b], [f.c, f.d]])
    return np.linalg.solve(np.eye(2) - lin, np.array([f.tx, f.ty]))


# -- single tiles and patches


def test_make_tile_examples(bee):
    t = make_tile(bee, ONES, 1, (1,))
    assert t.placement.close_to(Similitude.identity(), 1e-15)
    assert shapely_of(t.shape).symmetric_difference(shapely_of(bee.polygon)).area < 1e-14
    assert t.size_class == 0
    assert make_tile(bee, ONES, 1, (2,)).size_class == 1
    with pytest.raises(AddressNotOnFrontier):
        make_tile(bee, ONES, 1, (1, 1))
    with pytest.raises(AddressNotOnFrontier):
        make_tile(bee, ALT, 3, (1,))


def test_level_three_patch_has_eight_tiles(bee):
    p = patch(bee, ALT, 3)
    assert len(p) == 8
    assert sorted(t.size_class for t in p.tiles) == [0] * 5 + [1] * 3
    large = [t.shape.area for t in p.tiles if t.size_class == 0]
    small = [t.shape.area for t in p.tiles if t.size_class == 1]
    assert max(large) == pytest.approx(min(large))
    assert max(large) / max(small) == pytest.approx(TAU)


@pytest.mark.parametrize("label", ["golden-bee", "trapezoid(3,1)", "sporadic-D", "square-4"])
def test_level_one_patch_is_one_blow_up(label):
    pair = catalog(label)
    for n in range(1, pair.N + 1):
        p = patch(pair, ThetaStream.periodic((n,), pair.N), 1)
        # one subdivision step for a unit exponent, several for larger ones
        assert len(p) == frontier_size(pair.exponents, pair.exponents[n - 1])
        if pair.exponents[n - 1] == 1:
            assert len(p) == pair.N
        expected = shapely_of(pair.polygon.transformed(invert(pair.maps[n - 1])))
        union = unary_union([shapely_of(t.shape) for t in p.tiles])
        assert union.symmetric_difference(expected).area < 1e-9 * expected.area


def test_square_level_two(square):
    p = patch(square, ThetaStream.periodic((1,), 4), 2)
    assert len(p) == 16
    assert prototiles(p).order == 1
    assert all(t.shape.area == pytest.approx(1.0) for t in p.tiles)


def test_patch_cap(bee):
    with pytest.raises(LevelTooLarge):
        patch(bee, ONES, 30, cap=1000)
    with pytest.raises(ValueError):
        patch(bee, ONES, 0)


def test_patch_addresses_are_the_frontier(trap31):
    theta = parse_stream("champernowne", 4)
    p = patch(trap31, theta, 3)
    n = sum(trap31.exponents[k - 1] for k in theta.prefix(3))
    assert [t.address for t in p.tiles] == list(frontier(trap31, n))


def test_worker_count_does_not_change_output(trap31):
    theta = parse_stream("random:seed=3", 4)
    one = dumps_tiling(trap31, patch(trap31, theta, 4, workers=1))
    three = dumps_tiling(trap31, patch(trap31, theta, 4, workers=3))
    assert one == three


# -- partition against a shapely oracle


@pytest.mark.parametrize("label", entries())
def test_partition_matches_shapely(label):
    pair = catalog(label)
    theta = parse_stream("champernowne", pair.N)
    k = 1
    while len(patch(pair, theta, k + 1)) <= 150:
        k += 1
    p = patch(pair, theta, k)
    report = partition_report(p.tiles, p.support.area)
    shapes = [shapely_of(t.shape) for t in p.tiles]
    worst = max(a.intersection(b).area for i, a in enumerate(shapes) for b in shapes[i + 1 :])
    assert report.max_overlap == pytest.approx(worst, abs=1e-12)
    assert unary_union(shapes).symmetric_difference(shapely_of(p.support)).area < 1e-9 * p.support.area
    assert report.passed()


def test_partition_report_flags_overlap(bee):
    p = patch(bee, ALT, 4)
    shifted = p.tiles[0].placement
    moved = compose(Similitude(1, 0, 0, 1, 0.05, 0.0), shifted)
    tiles = list(p.tiles) + [replace(p.tiles[0], placement=moved, shape=bee.polygon.transformed(moved))]
    report = partition_report(tiles, p.support.area)
    assert not report.passed()
    assert report.max_overlap > 1e-3


# -- nesting


@pytest.mark.parametrize("k", range(1, 7))
def test_golden_bee_nested(bee, k):
    assert check_nested(bee, ONES, k)


@pytest.mark.parametrize("spec", ["periodic:1", "periodic:4", "champernowne", "random:seed=2"])
def test_square_nested(square, spec):
    theta = parse_stream(spec, 4)
    assert all(check_nested(square, theta, k) for k in range(1, 5))


def test_corrupted_patch_is_not_nested(bee):
    coarse = patch(bee, ALT, 4).tiles
    fine = patch(bee, ALT, 5).tiles
    assert tiles_nested(coarse, fine)
    t = coarse[3]
    moved = compose(Similitude(1, 0, 0, 1, 0.01, 0.0), t.placement)
    bad = list(coarse)
    bad[3] = replace(t, placement=moved, shape=bee.polygon.transformed(moved))
    assert not tiles_nested(bad, fine)


# -- windows


def test_alternating_stream_only_fills_a_wedge(bee):
    f1, f2 = bee.maps
    assert numpy_fixed_point(compose(f1, f2)) == pytest.approx([0.0, 0.0], abs=1e-14)
    assert numpy_fixed_point(compose(f2, f1)) == pytest.approx([0.0, 1.0], abs=1e-14)
    c = bee.polygon.centroid
    w = generate_window(bee, ALT, Disk.of(c.x, c.y, 3), max_k=30)
    assert not w.covered
    assert min(x for t in w.tiles for x, _ in t.shape.vertices) > -1e-9
    assert max(y for t in w.tiles for _, y in t.shape.vertices) < 1 + 1e-9


def test_auto_window_lands_inside_the_wedge(bee):
    disk = auto_window(bee, ALT, 3, max_k=30)
    w = generate_window(bee, ALT, disk, max_k=30)
    assert w.covered
    assert disk.center.x - 3 > 0 and disk.center.y + 3 < 1


def test_interior_fixed_point_covers_centroid_disk(bee):
    c = bee.polygon.centroid
    w = generate_window(bee, ONES, Disk.of(c.x, c.y, 3))
    assert w.covered
    assert all(Disk.of(c.x, c.y, 3).meets(t.shape) for t in w.tiles)


def test_small_window_inside_p(bee):
    w = generate_window(bee, ALT, Disk.of(0.3, 0.5, 0.1))
    assert w.covered and w.level == 1


def test_square_window_behind_fixed_corner(square):
    for max_k in (4, 12, 20):
        w = generate_window(square, ThetaStream.periodic((1,), 4), Disk.of(-1, -1, 0.5), max_k=max_k)
        assert not w.covered
        assert len(w) == 0


@pytest.mark.parametrize("spec", ["periodic:1", "champernowne", "random:seed=5"])
def test_window_equals_filtered_patch(bee, spec):
    theta = parse_stream(spec, 2)
    disk = auto_window(bee, theta, 2.5)
    w = generate_window(bee, theta, disk)
    full = patch(bee, theta, w.level)
    # brute force: test every tile of the patch against the disk with shapely
    circle = __import__("shapely.geometry", fromlist=["Point"]).Point(*disk.center).buffer(disk.radius, 512)
    expected = {t.address for t in full.tiles if shapely_of(t.shape).distance(circle) < 1e-9}
    got = {t.address for t in w.tiles}
    assert got <= expected
    # the polygonal circle is inscribed, so only hairline tiles may differ
    assert len(expected - got) <= 2


# -- prototiles


def test_golden_bee_order(bee):
    protos = prototiles(patch(bee, ALT, 10))
    assert protos.order == 2
    big, small = protos.representatives
    assert math.sqrt(big.area / small.area) == pytest.approx(math.sqrt(TAU))
    assert big.diameter / small.diameter == pytest.approx(math.sqrt(TAU))


def test_trapezoid_and_square_orders(trap31, square):
    assert prototiles(patch(trap31, parse_stream("champernowne", 4), 6)).order == 3
    assert prototiles(patch(square, ThetaStream.periodic((2,), 4), 3)).order == 1


def test_prototiles_needs_tiles():
    with pytest.raises(ValueError):
        prototiles([])


# -- self-similarity


@pytest.mark.parametrize("alpha", [(1,), (1, 2)])
def test_self_similar(bee, alpha):
    assert check_self_similar(bee, alpha, 6)


def test_self_similar_negative_control(bee):
    assert not check_self_similar(bee, (1, 2), 6, theta=parse_stream("champernowne", 2))


def test_self_similar_too_shallow(bee):
    with pytest.raises(DepthTooShallow):
        check_self_similar(bee, (2,), 5, theta=ONES)


def test_self_similar_argument_checks(bee):
    with pytest.raises(ValueError):
        check_self_similar(bee, (), 3)
    with pytest.raises(ValueError):
        check_self_similar(bee, (1,), 0)


# -- congruence motions


def test_motion_of_stream_with_itself_is_identity(bee):
    g = congruence_motion(bee, ALT, 3, ALT, 3)
    assert g.close_to(Similitude.identity(), 1e-12)


def test_motion_between_tail_sharing_streams(bee):
    theta = parse_stream("evp:2|1", 2)
    g = congruence_motion(bee, theta, 1, ONES, 2, test_depth=6)
    assert g.ratio == pytest.approx(1.0, abs=1e-12)
    # direct check: g carries the support of T(theta, 6) onto that of T(psi, 7)
    src = patch(bee, theta, 6).support.transformed(g)
    dst = patch(bee, ONES, 7).support
    assert shapely_of(src).symmetric_difference(shapely_of(dst)).area < 1e-9 * dst.area


def test_motion_errors(bee):
    with pytest.raises(WeightMismatch):
        congruence_motion(bee, ALT, 1, ALT, 2)
    with pytest.raises(TailMismatch):
        congruence_motion(bee, ALT, 2, ThetaStream.periodic((2, 1), 2), 2)


# -- plane-filling certificate


def test_certificate_for_interior_fixed_point(bee):
    x = numpy_fixed_point(bee.maps[0])
    assert x == pytest.approx([0.4859, 0.3820], abs=1e-4)
    assert fills_plane_certificate(bee, (), (1,))
    assert fills_plane_certificate(bee, (2, 2), (1,))


def test_certificate_fails_at_corners(bee, square):
    assert not fills_plane_certificate(bee, (), (1, 2))
    assert not fills_plane_certificate(bee, (), (2, 1))
    assert not fills_plane_certificate(square, (), (1,))
    with pytest.raises(ValueError):
        fills_plane_certificate(bee, (), ())


# -- quasiperiodicity probe


def test_probe_finds_repeats(bee):
    disk = auto_window(bee, ALT, 6, max_k=30)
    motions = quasiperiodicity_probe(bee, ALT, 2, 6, center=disk.center, max_k=30)
    assert len(motions) >= 2
    assert any(g.close_to(Similitude.identity(), 1e-9) for g in motions)
    assert all(abs(g.ratio - 1) < 1e-12 for g in motions)


def test_probe_deep_patch_only_finds_itself(bee):
    motions = quasiperiodicity_probe(bee, ONES, 12, 0.5)
    assert len(motions) == 1
    assert motions[0].close_to(Similitude.identity(), 1e-9)


def test_probe_square_grid(square):
    theta = parse_stream("champernowne", 4)
    motions = quasiperiodicity_probe(square, theta, 1, 2.0, max_k=12)
    assert len(motions) >= 8


def test_probe_uncovered_window(square):
    with pytest.raises(WindowNotCovered):
        quasiperiodicity_probe(square, ThetaStream.periodic((1,), 4), 1, 1.0, center=(-1, -1))


# -- JSON


def test_tiling_json_round_trip(trap31):
    p = patch(trap31, parse_stream("evp:2|11", 4), 3)
    text = dumps_tiling(trap31, p)
    doc = loads_tiling(text)
    assert doc.pair == "trapezoid(3,1)" and doc.theta == "evp:2|11" and doc.level == 3
    assert [t.address for t in doc.tiles] == [t.address for t in p.tiles]
    assert [t.shape.vertices for t in doc.tiles] == [t.shape.vertices for t in p.tiles]
    assert [t.placement.as_tuple() for t in doc.tiles] == [t.placement.as_tuple() for t in p.tiles]
    assert dumps_tiling(trap31, p) == text


def test_window_json_records_coverage(bee):
    w = generate_window(bee, ONES, Disk.of(0.5, 0.5, 1.0))
    data = json.loads(dumps_tiling(bee, w))
    assert data["covered"] is True
    assert data["window"] == [0.5, 0.5, 1.0]
    assert len(data["tiles"]) == len(w)


def test_malformed_tiling_json():
    with pytest.raises(ValueError):
        loads_tiling('{"pair": "x", "level": 1}')
    with pytest.raises(ValueError):
        loads_tiling('{"pair": "x", "theta": "periodic:1", "level": 1, "tiles": [{"address": "1"}]}')


def test_placement_is_inverse_prefix_then_address(bee):
    t = make_tile(bee, ALT, 3, (2, 1, 1))
    expected = compose(inverse_map_of((1, 2, 1), bee), compose(bee.maps[1], compose(bee.maps[0], bee.maps[0])))
    assert t.placement.close_to(expected, 1e-12)


@pytest.mark.parametrize("beta,alpha", [((2,), (1, 1)), ((2, 1), (1, 2)), ((1, 2), (2, 1))])
def test_eventually_periodic_self_similarity(bee, beta, alpha):
    phi = conjugated_self_similarity(bee, beta, alpha)
    theta = ThetaStream.eventually_periodic(beta, alpha, 2)
    s_alpha = bee.scale ** sum(bee.exponents[k - 1] for k in alpha)
    assert phi.ratio == pytest.approx(1 / s_alpha, rel=1e-12)
    assert check_self_similar(bee, alpha, 6, theta=theta, phi=phi)
    # the unconjugated map is not a self-similarity of this tiling
    if beta != alpha[: len(beta)]:
        assert not check_self_similar(bee, alpha, 6, theta=theta)


def test_conjugation_needs_matching_weights(bee):
    with pytest.raises(WeightMismatch):
        conjugated_self_similarity(bee, (2,), (1,))


def test_patch_is_capped_before_generation(trap31):
    # |S_19| is about 3.2 million: refused by the default tile cap, not built
    with pytest.raises(LevelTooLarge):
        patch(trap31, parse_stream("champernowne", 4), 8)
