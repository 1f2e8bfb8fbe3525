import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.ops import unary_union

from selfsim.catalog import catalog, entries, raw_configuration
from selfsim.geometry import Polygon, Similitude
from selfsim.pairs import (
    BadParams,
    ExponentFailure,
    NoCommonBase,
    SubdivisionFailure,
    UnknownName,
    check_reducible,
    dumps_pair,
    expand,
    infer_exponents,
    loads_pair,
    normalize_exponents,
    pair_to_dict,
    solve_scale,
    validate_pair,
)

from conftest import TAU, shapely_of


def test_solve_scale_known_roots():
    assert solve_scale((1, 2)) == pytest.approx(1 / math.sqrt(TAU), abs=1e-13)
    s = solve_scale((3, 2, 2, 1))
    assert abs(s**3 + s - 1) < 1e-13
    assert solve_scale((1, 1, 1, 1)) == pytest.approx(0.5, abs=1e-15)


@given(st.lists(st.integers(1, 12), min_size=2, max_size=6))
@settings(max_examples=80, deadline=None)
def test_solve_scale_satisfies_area_equation(exps):
    s = solve_scale(exps)
    assert abs(sum(s ** (2 * a) for a in exps) - 1) < 1e-13


def test_solve_scale_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_scale((1,))
    with pytest.raises(ValueError):
        solve_scale((0, 1))


@given(st.lists(st.integers(1, 24), min_size=2, max_size=5))
@settings(max_examples=120, deadline=None)
def test_infer_recovers_exponents(exps):
    g = math.gcd(*exps)
    s = solve_scale([a // g for a in exps])
    ratios = [s ** (a // g) for a in exps]
    found, base = infer_exponents(ratios)
    assert found == tuple(a // g for a in exps)
    assert base == pytest.approx(s, rel=1e-9)


def test_gcd_normalization():
    exps, s = normalize_exponents((2, 4), 0.9)
    assert exps == (1, 2)
    assert s == pytest.approx(0.81)


def test_no_common_base_for_two_thirds_and_one_third():
    with pytest.raises(NoCommonBase):
        infer_exponents([2 / 3, 1 / 3, 1 / 3])
    with pytest.raises(ExponentFailure):
        infer_exponents([1.5, 0.5])


def test_equilateral_configuration_is_rejected():
    tri, maps = raw_configuration("equilateral-6")
    # the pieces do tile the triangle: the rejection is purely arithmetic
    assert sum(f.ratio**2 for f in maps) == pytest.approx(1.0)
    with pytest.raises(NoCommonBase):
        validate_pair(tri, maps)


@pytest.mark.parametrize("label", entries())
def test_catalog_entries_validate(label):
    pair = catalog(label)
    assert sum(f.ratio**2 for f in pair.maps) == pytest.approx(1.0, abs=1e-10)
    assert all(f.ratio == pytest.approx(pair.scale**a, rel=1e-9) for f, a in zip(pair.maps, pair.exponents))
    assert math.gcd(*pair.exponents) == 1


@pytest.mark.parametrize("label", entries())
def test_catalog_entries_tile_their_polygon_per_shapely(label):
    pair = catalog(label)
    outer = shapely_of(pair.polygon)
    pieces = [shapely_of(t) for t in pair.tiles()]
    union = unary_union(pieces)
    assert union.symmetric_difference(outer).area < 1e-9
    assert sum(p.area for p in pieces) == pytest.approx(outer.area, rel=1e-12)


def test_golden_bee_constants():
    pair = catalog("golden-bee")
    s = 1 / math.sqrt(TAU)
    assert pair.exponents == (1, 2)
    assert pair.scale == pytest.approx(s, abs=1e-13)
    assert len(pair.polygon) == 6
    # every edge is axis-parallel
    vs = pair.polygon.vertices
    assert all(abs(a[0] - b[0]) < 1e-15 or abs(a[1] - b[1]) < 1e-15 for a, b in zip(vs, vs[1:] + vs[:1]))
    large, small = pair.tiles()
    assert large.area / small.area == pytest.approx(TAU)


def test_right_triangle_2_1():
    pair = catalog("right-triangle(2,1)")
    s = pair.scale
    assert s * s == pytest.approx(1 / TAU, abs=1e-12)
    (x0, y0), (x1, y1), (x2, y2) = pair.polygon.vertices
    sides = sorted(math.dist(p, q) for p, q in [((x0, y0), (x1, y1)), ((x1, y1), (x2, y2)), ((x2, y2), (x0, y0))])
    assert sides == pytest.approx([s * s, s, 1.0])


@pytest.mark.parametrize("a,b", [(3, 1), (5, 1), (4, 2), (5, 3), (7, 1)])
def test_trapezoid_family(a, b):
    pair = catalog("trapezoid", (a, b))
    g = math.gcd(a, (a + b) // 2, b)
    assert pair.exponents == tuple(x // g for x in (a, (a + b) // 2, (a + b) // 2, b))
    base = pair.scale**g
    assert base**a + base**b == pytest.approx(1.0, abs=1e-12)
    # the slanted side: the trapezoid's parallel sides are 1 and w^-2 with w = base^((b-a)/2)
    w = base ** ((b - a) / 2)
    xs = sorted(x for x, y in pair.polygon.vertices if y > 0)
    assert xs[-1] == pytest.approx(w**-2)


def test_catalog_examples():
    assert catalog("trapezoid(3,1)").exponents == (3, 2, 2, 1)
    assert catalog("right-triangle(2,1)").N == 2
    c = catalog("sporadic-C")
    assert sorted(f.ratio for f in c.maps) == pytest.approx([0.5, 0.5, math.sqrt(2) / 2])
    a = catalog("sporadic-A")
    s = 1 / math.sqrt(TAU)
    assert sorted(f.ratio for f in a.maps) == pytest.approx([s**4, s**3, s])
    d = catalog("sporadic-D")
    assert sorted(f.ratio for f in d.maps) == pytest.approx([1 / 3] * 3 + [1 / math.sqrt(3)] * 2)
    assert {n for n in ("sporadic-A", "sporadic-C", "sporadic-D") if catalog(n).reconstructed} == {
        "sporadic-A",
        "sporadic-C",
        "sporadic-D",
    }
    assert not catalog("golden-bee").reconstructed


@pytest.mark.parametrize(
    "name,params,error",
    [
        ("no-such-pair", (), UnknownName),
        ("trapezoid", (3, 2), BadParams),
        ("trapezoid", (1, 3), BadParams),
        ("right-triangle", (2, 2), BadParams),
        ("right-triangle", (2,), BadParams),
        ("square-4", (1,), BadParams),
    ],
)
def test_catalog_errors(name, params, error):
    with pytest.raises(error):
        catalog(name, params)


def test_validate_reports_overlap():
    sq = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    maps = [Similitude(0.5, 0, 0, 0.5, x, y) for x, y in [(0, 0), (0.25, 0), (0, 0.5), (0.5, 0.5)]]
    with pytest.raises(SubdivisionFailure) as info:
        validate_pair(sq, maps)
    report = info.value.report
    assert not report.passed
    assert report.max_overlap_area == pytest.approx(0.125)
    # the shifted copy still lies inside the square
    assert report.containment_ok


def test_validate_report_fields(bee):
    _, report = validate_pair(bee.polygon, bee.maps)
    assert report.passed and report.containment_ok
    assert report.area_defect < 1e-12
    assert report.max_overlap_area < 1e-12
    assert any(line.startswith("passed\t") for line in report.lines())


def test_json_round_trip_is_bit_exact():
    for label in entries():
        pair = catalog(label)
        again = loads_pair(dumps_pair(pair))
        assert again.polygon.vertices == pair.polygon.vertices
        assert [f.as_tuple() for f in again.maps] == [f.as_tuple() for f in pair.maps]
        assert again.exponents == pair.exponents
        assert dumps_pair(again) == dumps_pair(pair)


def test_json_schema_keys(bee):
    data = json.loads(dumps_pair(bee))
    assert set(data) == {"name", "vertices", "maps", "exponents", "scale"}
    assert set(data["maps"][0]) == {"a", "b", "c", "d", "tx", "ty"}


def test_json_without_exponents_is_certified():
    data = pair_to_dict(catalog("golden-bee"))
    del data["exponents"], data["scale"]
    assert loads_pair(json.dumps(data)).exponents == (1, 2)


def test_reducibility():
    assert check_reducible(catalog("golden-bee")) is None
    assert check_reducible(catalog("trapezoid(3,1)")) is None
    assert check_reducible(catalog("sporadic-C")) is None
    assert check_reducible(catalog("sporadic-D")) is None
    subset, g = check_reducible(catalog("rect-reducible"))
    assert subset == (2, 3, 4)
    assert g.ratio == pytest.approx(1 / math.sqrt(3))


@pytest.mark.parametrize("label,i", [("golden-bee", 0), ("golden-bee", 1), ("sporadic-C", 2), ("square-4", 3)])
def test_expand_makes_reducible(label, i):
    pair = expand(catalog(label), i)
    assert pair.N == 2 * catalog(label).N - 1
    assert check_reducible(pair) is not None
