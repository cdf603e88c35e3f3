"""Folding engine: fold states, plate immersion, whole-sheet assembly."""

import math
import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from kirigami.errors import ConstructionError, UnsupportedConfigurationError
from kirigami.folding import FoldedState, Motion, fold_sheet, verify_immersion
from kirigami.folding.builders import (check_stations, immerse_plate,
                                       prefix_arcs, roll_onto_line)
from kirigami.folding.state import split_convex_exact
from kirigami.geodesics import all_geodesics
from kirigami.geometry import Point, dist, polygon_area
from kirigami.model import KirigamiSpec
from kirigami.ordering import build_chain, decompose
from kirigami.sealing import seal_all

from fixtures_data import (POCKET_DIST, VERTICAL_CUT_DIST, Y_JUNCTION_DIST,
                           cut_free_spec, parallel_cuts_boundary_spec,
                           v_pocket_spec, vertical_cut_spec, y_junction_spec)

R5 = math.sqrt(5.0)
SQUARE = [Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2)]


def _close(a: Point, b: Point, tol: float = 1e-9) -> bool:
    return math.hypot(a.x - b.x, a.y - b.y) <= tol


def _sheet(spec):
    chain = build_chain(all_geodesics(spec))
    dec = decompose(chain, spec)
    return fold_sheet(spec, chain, dec), chain


# --- fold state primitives ---


def test_reflection_fixes_its_line():
    m = Motion.reflection(Point(1.0, 0.0), Point(0.0, 1.0))
    assert _close(m.apply(Point(1.0, 5.0)), Point(1.0, 5.0))
    assert _close(m.apply(Point(3.0, 2.0)), Point(-1.0, 2.0))
    assert m.det() == pytest.approx(-1.0)
    assert m.orthogonality_defect() < 1e-15


def test_fold_moves_exactly_one_side():
    state = FoldedState(SQUARE)
    state.fold(Point(1, 0), Point(0, 1), Point(1.5, 0.5))
    assert state.fold_count == 1
    assert state.total_area() == pytest.approx(4.0)
    for img in state.map_point(Point(1.5, 0.5)):
        assert _close(img, Point(0.5, 0.5))
    for img in state.map_point(Point(0.5, 0.5)):
        assert _close(img, Point(0.5, 0.5))
    for img in state.map_point(Point(0.25, 1.75)):
        assert _close(img, Point(0.25, 1.75))


def test_fold_refuses_seed_on_the_crease():
    state = FoldedState(SQUARE)
    with pytest.raises(ConstructionError):
        state.fold(Point(1, 0), Point(0, 1), Point(1.0, 0.5))


def test_map_walk_refines_at_the_crease():
    state = FoldedState(SQUARE)
    state.fold(Point(1, 0), Point(0, 1), Point(1.5, 0.5))
    entries = state.map_walk([Point(0.5, 0.5), Point(1.8, 0.5)])
    assert entries[0][2] == pytest.approx(0.0)
    assert entries[-1][2] == pytest.approx(1.3)
    assert any(abs(dom.x - 1.0) < 1e-9 for dom, _, _ in entries)
    assert _close(entries[0][1], Point(0.5, 0.5))
    assert _close(entries[-1][1], Point(0.2, 0.5))
    # arclength within one face is preserved by the motion
    for (d0, i0, u0), (d1, i1, u1) in zip(entries, entries[1:]):
        assert dist(i0, i1) == pytest.approx(u1 - u0, abs=1e-9)


def test_hop_points_sit_on_the_shared_edge():
    # The crossing entries must land on the stored face geometry, not a
    # tolerance off it, or the two neighbouring motions disagree there.
    state = FoldedState(SQUARE)
    state.fold(Point(1.2, 0), Point(-0.1, 1), Point(1.9, 0.5))
    state.fold(Point(0.7, 0), Point(0.3, 1), Point(0.1, 0.5))
    for dom, img, _ in state.map_walk([Point(0.05, 0.3), Point(1.95, 1.6)]):
        for alt in state.map_point(dom):
            assert dist(alt, img) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_split_loses_no_area_and_respects_sides(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 8)
    rot = rng.uniform(0.0, 2.0 * math.pi)
    cx, cy = rng.uniform(-2, 2), rng.uniform(-2, 2)
    rx, ry = rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)
    poly = [Point(cx + rx * math.cos(rot + 2 * math.pi * k / n),
                  cy + ry * math.sin(rot + 2 * math.pi * k / n))
            for k in range(n)]
    lpt = Point(rng.uniform(-3, 3), rng.uniform(-3, 3))
    ang = rng.uniform(0.0, math.pi)
    ldir = Point(math.cos(ang), math.sin(ang))
    neg, pos, chord = split_convex_exact(poly, lpt, ldir)
    total = abs(polygon_area(poly))
    parts = sum(abs(polygon_area(part)) for part in (neg, pos)
                if part is not None)
    assert parts == pytest.approx(total, abs=1e-8)
    nx, ny = -ldir.y, ldir.x
    if neg is not None and pos is not None:
        for part, sign in ((neg, -1.0), (pos, 1.0)):
            for v in part:
                side = nx * (v.x - lpt.x) + ny * (v.y - lpt.y)
                assert sign * side >= -1e-8
        assert chord is not None
        for end in chord:
            off = nx * (end.x - lpt.x) + ny * (end.y - lpt.y)
            assert abs(off) <= 1e-8


# --- rolling a stationed walk onto the line ---


def test_roll_straight_walk_is_rigid():
    state = FoldedState(SQUARE)
    folds = roll_onto_line(state, [Point(0, 1), Point(2, 1)], [0.0, 2.0],
                           Point(0, 0), Point(1, 0), anchored=False)
    assert folds == 0
    assert check_stations(state, [Point(0, 1), Point(2, 1)],
                          [0.0, 2.0]) < 1e-12


def test_roll_bent_boundary_walk_folds_once():
    # One bend with reflex material above it, like a geodesic rounding a
    # cut tip; a single crease through the bend rectifies the walk.
    ring = [Point(0, 0), Point(2, 1), Point(4, 0), Point(4, 3), Point(0, 3)]
    state = FoldedState(ring)
    walk = [Point(0, 0), Point(2, 1), Point(4, 0)]
    sts = prefix_arcs(walk)
    area = state.total_area()
    folds = roll_onto_line(state, walk, sts, Point(0, 0), Point(1, 0),
                           anchored=False)
    assert folds == 1
    assert check_stations(state, walk, sts) < 1e-9
    assert state.total_area() == pytest.approx(area)


def test_roll_refuses_a_bend_without_material_to_fold():
    # Only 90 degrees of material at the bend cannot span the straight
    # image; the roll reports it instead of placing the piece wrong.
    ring = [Point(0, 0), Point(1, 1), Point(2, 0), Point(2, -1),
            Point(0, -1)]
    state = FoldedState(ring)
    walk = [Point(0, 0), Point(1, 1), Point(2, 0)]
    with pytest.raises(ConstructionError):
        roll_onto_line(state, walk, prefix_arcs(walk), Point(0, 0),
                       Point(1, 0), anchored=False)


def test_roll_detects_bad_stations():
    state = FoldedState(SQUARE)
    with pytest.raises(ConstructionError):
        roll_onto_line(state, [Point(0, 1), Point(2, 1)], [0.0, 1.0],
                       Point(0, 0), Point(1, 0), anchored=False)


def test_roll_refuses_a_walk_with_material_on_both_sides():
    # An interior walk drags the already placed start along with the fold;
    # the roll has to notice rather than return a wrong placement.
    state = FoldedState(SQUARE)
    walk = [Point(0, 1), Point(1, 1), Point(1, 2)]
    with pytest.raises(ConstructionError):
        roll_onto_line(state, walk, [0.0, 1.0, 2.0],
                       Point(0, 0), Point(1, 0), anchored=False)


def test_roll_staircase_boundary_walk():
    # Two bends, both turning away from the material on the left.
    walk = [Point(0, 0), Point(2, 0), Point(3, -1), Point(3, -3)]
    ring = walk + [Point(6, -3), Point(6, 2), Point(0, 2)]
    state = FoldedState(ring)
    sts = prefix_arcs(walk)
    area = state.total_area()
    folds = roll_onto_line(state, walk, sts, Point(0, 0), Point(1, 0),
                           anchored=False)
    assert folds >= 2
    assert check_stations(state, walk, sts) < 1e-9
    assert state.total_area() == pytest.approx(area)


# --- whole-sheet foldings of the fixture corpus ---


def test_cut_free_sheet_needs_no_folds():
    spec = cut_free_spec()
    sheet, chain = _sheet(spec)
    assert sheet.distance == pytest.approx(2.0)
    assert len(sheet.pieces) == 2
    assert sheet.fold_count() == 0
    report = verify_immersion(sheet, chain, spec)
    assert report.ok, report.errors


def test_vertical_cut_sheet_verifies():
    spec = vertical_cut_spec()
    sheet, chain = _sheet(spec)
    assert sheet.distance == pytest.approx(VERTICAL_CUT_DIST, abs=1e-9)
    report = verify_immersion(sheet, chain, spec)
    assert report.ok, report.errors
    assert report.metrics["rectification"] < 1e-8
    assert report.metrics["continuity"] < 1e-8
    assert report.metrics["area"] < 1e-6


def test_y_junction_sheet_verifies():
    spec = y_junction_spec()
    sheet, chain = _sheet(spec)
    assert sheet.distance == pytest.approx(Y_JUNCTION_DIST, abs=1e-9)
    assert len(chain.geodesics) == 2
    report = verify_immersion(sheet, chain, spec)
    assert report.ok, report.errors


def test_parallel_boundary_middle_plate_sweep():
    spec = parallel_cuts_boundary_spec()
    sheet, chain = _sheet(spec)
    reports = sheet.plate_reports()
    assert len(reports) == 1
    rep = reports[0]
    assert rep.alpha_v == pytest.approx(R5 - 1, abs=1e-9)
    assert rep.alpha_w == pytest.approx(1 - R5, abs=1e-9)
    assert rep.target == pytest.approx(0.0, abs=1e-9)
    assert rep.o_low == pytest.approx(rep.alpha_w, abs=1e-7)
    assert rep.o_high == pytest.approx(rep.alpha_v, abs=1e-7)
    assert rep.iterations <= 60
    assert rep.residual < 1e-8
    assert verify_immersion(sheet, chain, spec).ok


def _middle_plate_pieces(spec):
    chain = build_chain(all_geodesics(spec))
    dec = decompose(chain, spec)
    region = dec.regions[0]
    pp = region.panels[0]
    panel = pp.panel
    arcs_lo = chain.geodesics[0].arclengths()
    arcs_up = chain.geodesics[1].arclengths()
    trees = pp.trees
    ring = pp.plates[1]
    i0, j0 = trees[0].lower_marks[-1], trees[0].upper_marks[-1]
    i1, j1 = trees[1].lower_marks[0], trees[1].upper_marks[0]
    lo_pts = list(panel.lower[i0:i1 + 1])
    up_pts = list(panel.upper[j0:j1 + 1])
    lo_sts = [arcs_lo[panel.lower_span[0] + i] for i in range(i0, i1 + 1)]
    up_sts = [arcs_up[panel.upper_span[0] + j] for j in range(j0, j1 + 1)]
    return ring, lo_pts, lo_sts, up_pts, up_sts


def test_offset_sweep_covers_the_feasible_range():
    # Shifting the upper stations moves the requested offset through the
    # whole feasible interval; the sweep has to land on every target.
    ring, lo_pts, lo_sts, up_pts, up_sts = _middle_plate_pieces(
        parallel_cuts_boundary_spec())
    lo_v, hi_v = 1 - R5, R5 - 1
    for k in range(50):
        g = lo_v + (hi_v - lo_v) * (k + 0.5) / 50.0
        shifted = [s + g for s in up_sts]
        state, rep = immerse_plate(ring, lo_pts, lo_sts, up_pts, shifted)
        assert rep.iterations <= 60, g
        assert rep.residual < 1e-8, g
        assert abs(rep.target - g) < 1e-12
        assert check_stations(state, lo_pts, lo_sts) < 1e-8
        assert check_stations(state, up_pts, shifted) < 1e-8


def test_offset_outside_feasible_range_is_refused():
    ring, lo_pts, lo_sts, up_pts, up_sts = _middle_plate_pieces(
        parallel_cuts_boundary_spec())
    shifted = [s + (R5 - 1) + 0.05 for s in up_sts]
    with pytest.raises(ConstructionError):
        immerse_plate(ring, lo_pts, lo_sts, up_pts, shifted)


def test_pocket_fixture_unsealed():
    spec = v_pocket_spec()
    chain = build_chain(all_geodesics(spec))
    assert chain.geodesics[0].length == pytest.approx(POCKET_DIST, abs=1e-9)
    dec = decompose(chain, spec)
    pp = dec.regions[0].panels[0]
    assert len(pp.plates) == 2
    assert len(pp.pockets) == 1
    sheet = fold_sheet(spec, chain, dec)
    assert any("pocket" in pc.name for pc in sheet.pieces)
    report = verify_immersion(sheet, chain, spec)
    assert report.ok, report.errors


def test_pocket_fixture_sealed():
    # Sealing retracts one arm from the junction until a third route ties;
    # the folding must survive the retracted, critically tied geometry.
    spec = seal_all(v_pocket_spec()).final_spec
    chain = build_chain(all_geodesics(spec))
    assert len(chain.geodesics) == 3
    dec = decompose(chain, spec)
    sheet = fold_sheet(spec, chain, dec)
    report = verify_immersion(sheet, chain, spec)
    assert report.ok, report.errors


def test_interior_endpoints_are_not_foldable():
    spec = KirigamiSpec(
        domain=(Point(-2, -2), Point(2, -2), Point(2, 2), Point(-2, 2)),
        vertices=(Point(0, -1), Point(0, 1)), edges=((0, 1),),
        p=Point(-1.5, 0), q=Point(1.5, 0))
    chain = build_chain(all_geodesics(spec))
    dec = decompose(chain, spec)
    with pytest.raises(UnsupportedConfigurationError):
        fold_sheet(spec, chain, dec)


def test_verifier_catches_a_scaled_motion():
    spec = vertical_cut_spec()
    sheet, chain = _sheet(spec)
    state = sheet.pieces[0].state
    f = next(iter(state.faces()))
    m = state.motions[f]
    state.motions[f] = Motion(0.999 * m.a, 0.999 * m.b, 0.999 * m.c,
                              0.999 * m.d, m.tx, m.ty)
    report = verify_immersion(sheet, chain, spec)
    assert not report.ok
    assert any("orthogonality" in e for e in report.errors)


def test_thin_sliver_cap_rolls_from_the_far_end():
    """Near-tie of three routes around a star of cuts.

    The cap between two of the tied geodesics is a sliver a few
    thousandths wide with a reflex bend.  Rolled from the tree end, the
    bend crease leaves through the opposite leg of the walk and the roll
    never settles; the construction has to fall back to rolling from
    the far end, where the crease refracts across the valley crease and
    exits through the cut.
    """
    spec = KirigamiSpec(
        domain=(Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)),
        vertices=(Point(0.3220131821837879, 0.5945770252951772),
                  Point(0.48567773440757234, 0.39613315680099426),
                  Point(0.7186604379066056, 0.10600311549125857),
                  Point(0.3660588782241384, 0.18745410430454343),
                  Point(0.7406247702962643, 0.5440691317740405),
                  Point(0.315018997558275, 0.47016887991169726)),
        edges=((0, 1), (1, 2), (1, 3), (1, 4), (1, 5)),
        p=Point(0.5210781960643578, 0.0),
        q=Point(0.9395622877438838, 1.0))
    final = seal_all(spec).final_spec
    gs = all_geodesics(final)
    assert len(gs.geodesics) == 3
    chain = build_chain(gs)
    sheet = fold_sheet(final, chain, decompose(chain, final))
    report = verify_immersion(sheet, chain, final)
    assert report.ok, report.errors
