"""Chain ordering and the panel/plate/pocket decomposition."""

import math

import pytest

from kirigami.errors import ExteriorTreeError, KirigamiError
from kirigami.geodesics import (GeodesicPolygonal, GeodesicSet, TERMINAL,
                                all_geodesics)
from kirigami.geometry import Point, polygon_area, polyline_length
from kirigami.model import KirigamiSpec
from kirigami.ordering import (RectifiedInterval, _panels, build_chain,
                               decompose, precedes)
from kirigami.sealing import seal_all

from fixtures_data import (OBSTRUCTION_DIST, PARALLEL_CUTS_DIST,
                           VERTICAL_CUT_DIST, Y_JUNCTION_DIST,
                           obstruction_spec, parallel_cuts_spec,
                           vertical_cut_spec, y_junction_spec)
from util_random import random_spec


def _close(a: Point, b: Point, tol: float = 1e-9) -> bool:
    return math.hypot(a.x - b.x, a.y - b.y) <= tol


def _ring_close(ring, expected, tol=1e-9):
    assert len(ring) == len(expected), (ring, expected)
    assert all(_close(a, b, tol) for a, b in zip(ring, expected)), \
        (ring, expected)


def _fake(points) -> GeodesicPolygonal:
    pts = tuple(Point(*p) for p in points)
    return GeodesicPolygonal(
        points=pts,
        node_vertices=(TERMINAL,) * len(pts),
        length=polyline_length(list(pts)),
        edge_runs=(-1,) * (len(pts) - 1),
        side_options=((0,) * (len(pts) - 1),))


def v_pocket_spec() -> KirigamiSpec:
    """V-shaped cut whose legs trap a pocket against the lower geodesic.

    The apex height is tuned so the route over the apex ties exactly with
    the route under both leaf tips.
    """
    h = math.sqrt((math.sqrt(2.5) + 0.5) ** 2 - 4.0)
    return KirigamiSpec(
        domain=(Point(0, -2), Point(4, -2), Point(4, 2), Point(0, 2)),
        vertices=(Point(1.5, -0.5), Point(2.0, h), Point(2.5, -0.5)),
        edges=((0, 1), (1, 2)),
        p=Point(0, 0), q=Point(4, 0))


V_POCKET_DIST = 2 * math.sqrt(2.5) + 1


def wide_vertical_spec() -> KirigamiSpec:
    """Vertical cut with p and q strictly inside a roomy box."""
    return KirigamiSpec(
        domain=(Point(-3, -2), Point(3, -2), Point(3, 2), Point(-3, 2)),
        vertices=(Point(0, -1), Point(0, 1)),
        edges=((0, 1),),
        p=Point(-1, 0), q=Point(1, 0))


def run_cut_spec() -> KirigamiSpec:
    """A cut the unique geodesic runs straight along."""
    return KirigamiSpec(
        domain=(Point(-1, -1), Point(1, -1), Point(1, 1), Point(-1, 1)),
        vertices=(Point(-0.3, 0), Point(0.3, 0)),
        edges=((0, 1),),
        p=Point(-1, 0), q=Point(1, 0))


# ---------------------------------------------------------------------------
# the order itself


def test_precedes_vertical_example():
    gs = all_geodesics(vertical_cut_spec())
    assert len(gs.geodesics) == 2
    south = next(g for g in gs.geodesics if g.points[1].y < 0)
    north = next(g for g in gs.geodesics if g.points[1].y > 0)
    assert precedes(south, north)
    assert not precedes(north, south)
    assert precedes(south, south)
    assert precedes(north, north)


def test_precedes_needs_shared_endpoints():
    g1 = _fake([(-1, 0), (0, 1), (1, 0)])
    g2 = _fake([(-1, 0), (0, -1), (2, 0)])
    with pytest.raises(KirigamiError):
        precedes(g1, g2)


def test_crossing_curves_not_comparable():
    p, q = (-1, 0), (1, 0)
    g1 = _fake([p, (-0.2, 0.4), (0.2, -0.4), q])
    g2 = _fake([p, (-0.2, -0.4), (0.2, 0.4), q])
    assert not precedes(g1, g2)
    assert not precedes(g2, g1)
    gs = GeodesicSet(distance=g1.length, geodesics=(g1, g2))
    with pytest.raises(KirigamiError, match="not comparable"):
        build_chain(gs)


def test_pinched_pair_orders_and_splits():
    p, q = (0, 0), (4, 0)
    lo = _fake([p, (1, -1), (2, 0), (3, -1), q])
    hi = _fake([p, (1, 1), (2, 0), (3, 1), q])
    assert precedes(lo, hi)
    assert not precedes(hi, lo)
    panels = _panels(lo, hi, 1e-7)
    assert len(panels) == 2
    assert all(abs(pn.area - 2.0) < 1e-9 for pn in panels)
    assert panels[0].lower_span == (0, 2) and panels[1].lower_span == (2, 4)
    chain = build_chain(GeodesicSet(distance=lo.length, geodesics=(hi, lo)))
    assert chain.geodesics[0].points == lo.points
    assert chain.loop_areas == ((2.0, 2.0),)


def test_chain_singleton():
    gs = all_geodesics(run_cut_spec())
    chain = build_chain(gs)
    assert len(chain) == 1
    assert chain.loop_areas == ()


def test_chain_y_junction_under_then_over():
    chain = build_chain(all_geodesics(y_junction_spec()))
    assert len(chain) == 2
    assert chain.geodesics[0].points[1].y < 0      # under the bar first
    assert chain.geodesics[1].points[1].y > 0
    assert all(a > 0 for pair in chain.loop_areas for a in pair)


def test_rectified_interval():
    iv = RectifiedInterval(2.5)
    assert iv.end == Point(2.5, 0.0)
    with pytest.raises(ValueError):
        RectifiedInterval(0.0)


# ---------------------------------------------------------------------------
# decomposition of the hand fixtures


def test_decompose_vertical_cut():
    spec = vertical_cut_spec()
    chain = build_chain(all_geodesics(spec))
    dec = decompose(chain, spec)
    assert dec.interval.length == pytest.approx(VERTICAL_CUT_DIST)
    assert dec.chain_trees == ()
    assert len(dec.regions) == 1
    region = dec.regions[0]
    assert len(region.panels) == 1
    pieces = region.panels[0]
    assert region.prefix_end == spec.p and region.suffix_start == spec.q
    assert region.area == pytest.approx(2.0)

    (tree,) = pieces.trees
    assert tree.first_path == (0, 1) and tree.last_path == (0, 1)
    assert tree.lower_marks == (1,) and tree.upper_marks == (1,)

    west, east = pieces.plates
    _ring_close(west, [spec.p, Point(0, -1), Point(0, 1)])
    _ring_close(east, [Point(0, -1), spec.q, Point(0, 1)])
    assert pieces.pockets == ((),)

    # two shards of sheet left over outside the strip, no holes
    assert len(dec.exterior_shells) == 2 and dec.exterior_holes == ()


def test_decompose_y_junction():
    spec = y_junction_spec()
    chain = build_chain(all_geodesics(spec))
    dec = decompose(chain, spec)
    assert dec.interval.length == pytest.approx(Y_JUNCTION_DIST)
    (region,) = dec.regions
    (pieces,) = region.panels
    (tree,) = pieces.trees
    assert tree.lower_marks == (1, 2, 3) and tree.upper_marks == (1,)
    assert tree.first_path == (1, 3, 0)
    assert tree.last_path == (2, 3, 0)

    apex = spec.vertices[0]
    west, east = pieces.plates
    _ring_close(west, [spec.p, Point(1, -1), Point(2, -1), apex])
    _ring_close(east, [Point(3, -1), spec.q, apex, Point(2, -1)])
    assert pieces.pockets == ((),)
    total = sum(abs(polygon_area(list(pl))) for pl in pieces.plates)
    assert total == pytest.approx(pieces.panel.area)


def test_decompose_parallel_cuts_two_trees():
    spec = parallel_cuts_spec()
    chain = build_chain(all_geodesics(spec))
    dec = decompose(chain, spec)
    assert dec.interval.length == pytest.approx(PARALLEL_CUTS_DIST)
    (region,) = dec.regions
    (pieces,) = region.panels
    t0, t1 = pieces.trees
    assert t0.vertices == (0, 1) and t1.vertices == (2, 3)
    assert t0.first_path == (0, 1) and t1.first_path == (2, 3)

    left, middle, right = pieces.plates
    _ring_close(left, [spec.p, Point(0, -1), Point(0, 1)])
    _ring_close(middle, [Point(0, -1), Point(1, -1), Point(1, 1),
                         Point(0, 1)])
    _ring_close(right, [Point(1, -1), spec.q, Point(1, 1)])
    assert pieces.pockets == ((), ())
    total = sum(abs(polygon_area(list(pl))) for pl in pieces.plates)
    assert total == pytest.approx(pieces.panel.area)


def test_decompose_v_pocket():
    spec = v_pocket_spec()
    gs = all_geodesics(spec)
    assert gs.distance == pytest.approx(V_POCKET_DIST)
    assert len(gs.geodesics) == 2
    chain = build_chain(gs)
    dec = decompose(chain, spec)
    (region,) = dec.regions
    (pieces,) = region.panels
    (tree,) = pieces.trees
    a, c, b = spec.vertices
    assert tree.first_path == (0, 1) and tree.last_path == (2, 1)

    west, east = pieces.plates
    _ring_close(west, [spec.p, a, c])
    _ring_close(east, [b, spec.q, c])

    (family,) = pieces.pockets
    (pocket,) = family
    assert pocket.on_lower
    _ring_close(pocket.span, [a, b])
    _ring_close(pocket.rim, [b, c, a])
    _ring_close(pocket.ring, [a, b, c])
    pocket_area = abs(polygon_area(list(pocket.ring)))
    assert pocket_area == pytest.approx(0.5 * (c.y + 0.5))
    plate_area = sum(abs(polygon_area(list(pl))) for pl in pieces.plates)
    assert plate_area + pocket_area == pytest.approx(pieces.panel.area)


def test_decompose_run_cut_rides_the_chain():
    spec = run_cut_spec()
    dec = decompose(build_chain(all_geodesics(spec)), spec)
    assert dec.regions == ()
    assert dec.chain_trees == (0,)
    assert len(dec.exterior_shells) == 1 and dec.exterior_holes == ()
    assert abs(polygon_area(list(dec.exterior_shells[0]))) == \
        pytest.approx(4.0)
    assert dec.interval.length == pytest.approx(2.0)


def test_decompose_interior_endpoints_leave_annulus():
    spec = wide_vertical_spec()
    dec = decompose(build_chain(all_geodesics(spec)), spec)
    assert len(dec.exterior_shells) == 1
    assert len(dec.exterior_holes) == 1
    assert abs(polygon_area(list(dec.exterior_shells[0]))) == \
        pytest.approx(24.0)
    assert abs(polygon_area(list(dec.exterior_holes[0]))) == \
        pytest.approx(2.0)


def test_decompose_obstruction_names_the_tree():
    spec = obstruction_spec()
    gs = all_geodesics(spec)
    assert gs.distance == pytest.approx(OBSTRUCTION_DIST)
    chain = build_chain(gs)
    with pytest.raises(ExteriorTreeError) as exc:
        decompose(chain, spec)
    assert exc.value.trees == ((2, 3, 4, 5),)


# ---------------------------------------------------------------------------
# random suite: seal, order, decompose, account for every drop of area


def test_random_suite_orders_and_accounts():
    import random

    rng = random.Random(29)
    built = 0
    obstructed = 0
    for _ in range(20):
        spec = random_spec(rng)
        trace = seal_all(spec)
        sealed = trace.final_spec
        gs = all_geodesics(sealed)
        chain = build_chain(gs)
        assert [g.length for g in chain.geodesics] == \
            pytest.approx([gs.distance] * len(chain))
        try:
            dec = decompose(chain, sealed)
        except ExteriorTreeError:
            obstructed += 1
            continue
        built += 1
        for region in dec.regions:
            for pieces in region.panels:
                got = sum(abs(polygon_area(list(pl)))
                          for pl in pieces.plates)
                got += sum(abs(polygon_area(list(pk.ring)))
                           for fam in pieces.pockets for pk in fam)
                assert got == pytest.approx(pieces.panel.area, abs=1e-9)
    assert built >= 10
