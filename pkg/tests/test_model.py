"""Spec loading, validation, and the angular structure at cut vertices."""

import json
import math

import pytest

from kirigami.errors import InvalidSpecError
from kirigami.geometry import Point
from kirigami.model import (KirigamiSpec, SlitComplex, clean_spec, components,
                            load_spec, spec_from_dict, tree_path, validate)

from fixtures_data import (apex_wall_spec, slot_spec, vertical_cut_spec,
                           y_junction_spec)

DEG = math.pi / 180.0


def test_dict_round_trip(tmp_path):
    spec = y_junction_spec()
    again = spec_from_dict(spec.to_dict())
    assert again == spec
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert load_spec(str(path)) == spec


def test_malformed_dict_rejected():
    with pytest.raises(InvalidSpecError):
        spec_from_dict({"domain": [[0, 0], [1, 0], [0, 1]]})
    with pytest.raises(InvalidSpecError):
        spec_from_dict({"domain": [[0, 0], [1], [0, 1]], "vertices": [],
                        "edges": [], "p": [0, 0], "q": [1, 1]})


def test_accessors():
    spec = y_junction_spec()
    assert spec.cut(2) == (spec.vertices[0], Point(2, -1))
    assert spec.cut_length(0) == pytest.approx(1.0)
    assert spec.degree(3) == 3
    assert sorted(spec.neighbors(3)) == [0, 1, 2]
    assert spec.on_boundary(Point(0, 0.5))
    assert not spec.on_boundary(Point(0.5, 0.5))


def test_clean_spec_normalizes():
    base = vertical_cut_spec()
    messy = KirigamiSpec(
        domain=tuple(reversed(base.domain)),
        vertices=base.vertices + (Point(0.5, 0.5),),
        edges=((0, 1), (1, 0)),
        p=base.p, q=base.q)
    fixed, warnings = clean_spec(messy)
    assert fixed == base
    assert len(warnings) == 3
    # a clean spec passes through untouched
    again, warnings = clean_spec(fixed)
    assert again == fixed and not warnings


def test_validate_accepts_fixtures():
    for spec in (vertical_cut_spec(), y_junction_spec(), slot_spec()):
        rep = validate(spec)
        assert rep.ok, rep.errors


def test_validate_flags_boundary_vertex():
    rep = validate(apex_wall_spec())
    assert rep.ok
    assert any("boundary" in w for w in rep.warnings)


def _with(spec, **kw):
    d = {"domain": spec.domain, "vertices": spec.vertices,
         "edges": spec.edges, "p": spec.p, "q": spec.q}
    d.update(kw)
    return KirigamiSpec(**d)


def test_validate_rejects_bad_geometry():
    base = vertical_cut_spec()
    cases = [
        (_with(base, domain=(Point(0, 0), Point(1, 0))), "3 vertices"),
        (_with(base, domain=(Point(0, 0), Point(1, 1), Point(2, 0),
                             Point(1, 0.5))), "convex"),
        (_with(base, edges=((0, 5),)), "out of range"),
        (_with(base, edges=((0, 0),)), "itself"),
        (_with(base, vertices=(Point(0, -1), Point(0, 3))), "outside"),
        (_with(base, vertices=(Point(0, 0), Point(0, 1e-9))), "coincide"),
        (_with(base, p=Point(0, 0.5)), "lies on cut"),
        (_with(base, p=Point(0, 1)), "coincides with cut vertex"),
        (_with(base, p=Point(-3, 0)), "outside"),
        (_with(base, q=base.p), "p and q coincide"),
    ]
    for spec, needle in cases:
        rep = validate(spec)
        assert any(needle in e for e in rep.errors), (needle, rep.errors)


def test_validate_rejects_crossing_cuts():
    spec = KirigamiSpec(
        domain=(Point(-2, -2), Point(2, -2), Point(2, 2), Point(-2, 2)),
        vertices=(Point(-1, 0), Point(1, 0), Point(0, -1), Point(0, 1)),
        edges=((0, 1), (2, 3)),
        p=Point(-1.5, -1.5), q=Point(1.5, 1.5))
    rep = validate(spec)
    assert any("cross" in e for e in rep.errors)


def test_validate_rejects_overlapping_cuts():
    spec = KirigamiSpec(
        domain=(Point(-2, -2), Point(2, -2), Point(2, 2), Point(-2, 2)),
        vertices=(Point(-1, 0), Point(1, 0), Point(0, 0), Point(0, 1)),
        edges=((0, 1), (2, 0)),
        p=Point(0, -1), q=Point(1.5, 1.5))
    rep = validate(spec)
    assert any("overlap" in e for e in rep.errors)


def test_cycles_validate_but_are_flagged():
    """A cut cycle is legal input; it is reported structurally, not fatal."""
    spec = KirigamiSpec(
        domain=(Point(-3, -3), Point(3, -3), Point(3, 3), Point(-3, 3)),
        vertices=(Point(0, 1), Point(-1, -1), Point(1, -1)),
        edges=((0, 1), (1, 2), (2, 0)),
        p=Point(-2, 0), q=Point(2, 0))
    assert validate(spec).ok
    trees = components(spec)
    assert len(trees) == 1 and trees[0].cyclic
    assert trees[0].leaves == ()


def test_components_and_paths():
    spec = y_junction_spec()
    trees = components(spec)
    assert len(trees) == 1
    assert trees[0].vertices == (0, 1, 2, 3)
    assert trees[0].leaves == (0, 1, 2)
    assert not trees[0].cyclic
    assert tree_path(spec, 1, 0) == [1, 3, 0]
    assert tree_path(spec, 2, 2) == [2]

    split = slot_spec()
    assert len(components(split)) == 2
    assert tree_path(split, 0, 2) is None


# ---------------------------------------------------------------------------
# sectors


def test_tip_has_one_full_sector():
    cx = SlitComplex(vertical_cut_spec())
    secs = cx.sectors(1)  # upper tip, cut hangs straight down
    assert len(secs) == 1
    assert secs[0].width() == pytest.approx(2 * math.pi)
    assert cx.free_sector_ids(1, 137 * DEG) == frozenset({0})
    assert cx.run_sector(1, 0, 1) == 0 == cx.run_sector(1, 0, -1)


def test_junction_sectors_and_flanks():
    cx = SlitComplex(y_junction_spec())
    # vertex 3 joins cuts west (180), east (0) and up (90)
    secs = cx.sectors(3)
    assert len(secs) == 3
    assert cx.dead_sectors(3) == frozenset()
    east = cx.free_sector_ids(3, 40 * DEG)
    west = cx.free_sector_ids(3, 140 * DEG)
    below = cx.free_sector_ids(3, 270 * DEG)
    assert len(east) == len(west) == len(below) == 1
    assert east != west != below != east
    # a ray along a cut is shared by its two flanking sectors
    along = cx.free_sector_ids(3, 0.0)
    assert along == east | below
    assert cx.run_sector(3, 2, 1) in east
    assert cx.run_sector(3, 2, -1) in below
    assert cx.run_sector(3, 1, 1) in below
    assert cx.run_sector(3, 1, -1) in west
    with pytest.raises(ValueError):
        cx.run_sector(3, 3, 1)


def test_corner_vertex_kills_outward_sector():
    # cut hanging from the apex of a triangle: the two boundary edges are
    # walls, and the sector opening outward over the corner is dead
    cx = SlitComplex(apex_wall_spec())
    assert len(cx.sectors(0)) == 3
    assert cx.dead_sectors(0) == frozenset({2})
    assert cx.free_sector_ids(0, 90 * DEG) == frozenset()
    down_w = cx.free_sector_ids(0, 260 * DEG)
    down_e = cx.free_sector_ids(0, 280 * DEG)
    assert len(down_w) == len(down_e) == 1 and down_w != down_e
    assert cx.run_sector(0, 1, -1) in down_w
    assert cx.run_sector(0, 1, 1) in down_e


def test_edge_vertex_kills_outward_sector():
    spec = KirigamiSpec(
        domain=(Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)),
        vertices=(Point(0.5, 0), Point(0.5, 0.5)),
        edges=((0, 1),),
        p=Point(0.2, 0.8), q=Point(0.8, 0.8))
    cx = SlitComplex(spec)
    assert len(cx.sectors(0)) == 3
    assert len(cx.dead_sectors(0)) == 1
    assert cx.free_sector_ids(0, 270 * DEG) == frozenset()
    assert len(cx.free_sector_ids(0, 45 * DEG)) == 1
    # the tip well inside the domain is unaffected
    assert cx.dead_sectors(1) == frozenset()


def test_parallel_cuts_from_one_vertex_rejected():
    spec = KirigamiSpec(
        domain=(Point(-2, -2), Point(2, -2), Point(2, 2), Point(-2, 2)),
        vertices=(Point(0, 0), Point(1, 0), Point(1.5, 0)),
        edges=((0, 1), (0, 2)),
        p=Point(-1, 0), q=Point(0, 1))
    with pytest.raises(InvalidSpecError):
        SlitComplex(spec)
