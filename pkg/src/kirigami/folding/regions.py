"""Drive the per-piece constructions over a region decomposition.

The sheet is flattened piece by piece: caps and tree-less panels by one
stationed boundary walk, interior plates by the offset sweep, pockets by
their geodesic span, and the two components outside the chain by the
extreme curves themselves.  Pieces never need to be stitched: every shared
stretch of geodesic carries the same arclength stations, so agreement
between neighbouring pieces is automatic and is checked, not enforced.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from ..errors import ConstructionError, UnsupportedConfigurationError
from ..geometry import (Point, dist, lerp, on_segment, point_seg_dist,
                        polygon_area, project_t)
from ..model import KirigamiSpec
from ..ordering import GeodesicChain, RegionDecomposition
from .builders import (STATION_TOL, PlateReport, check_stations,
                       immerse_plate, roll_onto_line)
from .state import FoldedState


@dataclass
class FoldPiece:
    """One flattened piece of the sheet."""

    name: str
    state: FoldedState
    report: Optional[PlateReport] = None


@dataclass
class FoldReport:
    """Verification outcome for an assembled sheet."""

    ok: bool
    errors: tuple[str, ...]
    metrics: dict[str, float] = field(default_factory=dict)


@dataclass
class FoldedSheet:
    """All pieces of one flat folding, sharing absolute stations."""

    pieces: tuple[FoldPiece, ...]
    distance: float

    def faces(self) -> Iterator[tuple[FoldPiece, int]]:
        for pc in self.pieces:
            for i in pc.state.faces():
                yield pc, i

    def face_count(self) -> int:
        return sum(1 for _ in self.faces())

    def fold_count(self) -> int:
        return sum(pc.state.fold_count for pc in self.pieces)

    def creases(self) -> list[tuple[Point, Point]]:
        out = []
        for pc in self.pieces:
            out.extend(pc.state.creases)
        return out

    def total_area(self) -> float:
        return sum(pc.state.total_area() for pc in self.pieces)

    def plate_reports(self) -> list[PlateReport]:
        return [pc.report for pc in self.pieces if pc.report is not None]


def _boundary_param(domain: Sequence[Point], p: Point,
                    tol: float = 1e-9) -> Optional[tuple[int, float]]:
    n = len(domain)
    for i in range(n):
        a, b = domain[i], domain[(i + 1) % n]
        if on_segment(p, a, b, tol):
            return i, min(1.0, max(0.0, project_t(p, a, b)))
    return None


def _boundary_arc(domain: Sequence[Point], a: Point, b: Point) -> list[Point]:
    """Domain corners strictly between a and b, walking counterclockwise."""
    pa = _boundary_param(domain, a)
    pb = _boundary_param(domain, b)
    if pa is None or pb is None:
        raise ConstructionError("endpoint left the domain boundary")
    ia, ta = pa
    ib, tb = pb
    if ia == ib and tb >= ta - 1e-12:
        return []
    n = len(domain)
    corners = []
    k = (ia + 1) % n
    for _ in range(n):
        corners.append(domain[k])
        if k == ib:
            break
        k = (k + 1) % n
    return corners


def _station_on(pts: Sequence[Point], sts: Sequence[float], p: Point,
                tol: float = 1e-6) -> float:
    best = None
    for i in range(len(pts) - 1):
        d = point_seg_dist(p, pts[i], pts[i + 1])
        if best is None or d < best[0]:
            seg = dist(pts[i], pts[i + 1])
            t = 0.0 if seg <= 1e-15 else \
                min(1.0, max(0.0, project_t(p, pts[i], pts[i + 1])))
            best = (d, sts[i] + t * (sts[i + 1] - sts[i]))
    if best is None or best[0] > tol:
        raise ConstructionError("pocket span point is not on its geodesic")
    return best[1]


def _degenerate(ring: Sequence[Point]) -> bool:
    pts = [Point(p[0], p[1]) for p in ring]
    return len(pts) < 3 or abs(polygon_area(pts)) <= 1e-12


def _new_piece(name: str, ring: Sequence[Point]) -> Optional[FoldedState]:
    if _degenerate(ring):
        return None
    pts = [Point(p[0], p[1]) for p in ring]
    try:
        return FoldedState(pts)
    except ValueError as err:
        raise ConstructionError(f"piece {name} cannot be meshed: {err}")


def fold_sheet(spec: KirigamiSpec, chain: GeodesicChain,
               dec: RegionDecomposition) -> FoldedSheet:
    """Flat-fold the whole sheet onto the segment of the rectified chain."""
    if _boundary_param(spec.domain, spec.p) is None or \
            _boundary_param(spec.domain, spec.q) is None:
        raise UnsupportedConfigurationError(
            "the flat folding needs p and q on the domain boundary")
    pieces: list[FoldPiece] = []
    for region in dec.regions:
        r = region.index
        arcs_lo = chain.geodesics[r].arclengths()
        arcs_up = chain.geodesics[r + 1].arclengths()
        for k, pp in enumerate(region.panels):
            panel = pp.panel
            lo0 = panel.lower_span[0]
            up0 = panel.upper_span[0]
            st_lo = [arcs_lo[lo0 + i] for i in range(len(panel.lower))]
            st_up = [arcs_up[up0 + i] for i in range(len(panel.upper))]
            trees = pp.trees
            s = len(trees)
            for m, ring in enumerate(pp.plates):
                name = f"region{r}/panel{k}/plate{m}"
                i0 = 0 if m == 0 else trees[m - 1].lower_marks[-1]
                j0 = 0 if m == 0 else trees[m - 1].upper_marks[-1]
                i1 = len(panel.lower) - 1 if m == s else \
                    trees[m].lower_marks[0]
                j1 = len(panel.upper) - 1 if m == s else \
                    trees[m].upper_marks[0]
                lo_pts = list(panel.lower[i0:i1 + 1])
                up_pts = list(panel.upper[j0:j1 + 1])
                lo_sts = st_lo[i0:i1 + 1]
                up_sts = st_up[j0:j1 + 1]
                if m == 0:
                    walk = list(reversed(lo_pts)) + up_pts[1:]
                    sts = list(reversed(lo_sts)) + up_sts[1:]
                    state = _roll_piece(name, ring, walk, sts)
                    if state is not None:
                        pieces.append(FoldPiece(name, state))
                elif m == s:
                    walk = lo_pts + list(reversed(up_pts))[1:]
                    sts = lo_sts + list(reversed(up_sts))[1:]
                    state = _roll_piece(name, ring, walk, sts)
                    if state is not None:
                        pieces.append(FoldPiece(name, state))
                else:
                    if _degenerate(ring):
                        continue
                    built, rep = immerse_plate(ring, lo_pts, lo_sts,
                                               up_pts, up_sts)
                    pieces.append(FoldPiece(name, built, rep))
            for t, fam in enumerate(pp.pockets):
                for x, pk in enumerate(fam):
                    name = f"region{r}/panel{k}/tree{t}/pocket{x}"
                    if pk.on_lower:
                        sts = [_station_on(panel.lower, st_lo, p)
                               for p in pk.span]
                    else:
                        sts = [_station_on(panel.upper, st_up, p)
                               for p in pk.span]
                    state = _roll_piece(name, pk.ring, list(pk.span), sts)
                    if state is not None:
                        pieces.append(FoldPiece(name, state))
    low = chain.geodesics[0]
    high = chain.geodesics[-1]
    dom = list(spec.domain)
    lower_ring = list(reversed(low.points)) + _boundary_arc(dom, spec.p,
                                                            spec.q)
    upper_ring = list(high.points) + _boundary_arc(dom, spec.q, spec.p)
    for name, ring, walk, sts in (
            ("exterior-lower", lower_ring, list(low.points),
             list(low.arclengths())),
            ("exterior-upper", upper_ring, list(high.points),
             list(high.arclengths()))):
        area = polygon_area(ring)
        if abs(area) <= 1e-12:
            continue
        if area < 0:
            raise ConstructionError(f"{name} came out backwards")
        state = _roll_piece(name, ring, walk, sts)
        if state is not None:
            pieces.append(FoldPiece(name, state))
    return FoldedSheet(pieces=tuple(pieces), distance=dec.interval.length)


def _roll_once(state: FoldedState, walk: list[Point],
               sts: list[float]) -> None:
    roll_onto_line(state, walk, sts, Point(0.0, 0.0), Point(1.0, 0.0),
                   anchored=False)
    resid = check_stations(state, walk, sts)
    if resid > STATION_TOL:
        raise ConstructionError(f"missed stations by {resid:.2e}")


def _roll_piece(name: str, ring: Sequence[Point], walk: list[Point],
                sts: list[float]) -> Optional[FoldedState]:
    """Roll one cap or pocket walk onto the line, trying both ends.

    The end the roll starts from decides where its creases refract
    across each other, and on thin pieces one of the two orders can lay
    an early crease through a leg that still has to stay straight; the
    roll then never settles.  The reversed walk describes the same
    placement, so it is a legitimate second attempt.
    """
    state = _new_piece(name, ring)
    if state is None:
        return None
    try:
        _roll_once(state, walk, sts)
        return state
    except ConstructionError as first:
        state = _new_piece(name, ring)
        try:
            _roll_once(state, list(reversed(walk)), sts[::-1])
            return state
        except ConstructionError:
            raise ConstructionError(f"{name}: {first}") from first


_BANK_NUDGE = 1e-7


def _bank_probes(geo, spec: KirigamiSpec,
                 edges: tuple[int, int]) -> list[Point]:
    """Probe offsets for a geodesic sample touching the given curve edges.

    Where the geodesic travels along a slit only the flank it runs on
    belongs to it; the opposite bank folds with its own piece and lands
    elsewhere.  Samples there are pushed a hair toward the travelled
    flank before pieces are consulted.  Free samples keep a single zero
    probe, so every piece containing them still has to agree.
    """
    nruns = len(geo.edge_runs)
    live = [k for k in edges
            if 0 <= k < nruns and geo.edge_runs[k] >= 0]
    if not live:
        return [Point(0.0, 0.0)]
    probes = []
    options = geo.side_options or ((0,) * nruns,)
    for opt in options:
        vx = vy = 0.0
        for k in live:
            i, j = spec.edges[geo.edge_runs[k]]
            a, b = spec.vertices[i], spec.vertices[j]
            dx, dy = b.x - a.x, b.y - a.y
            ln = math.hypot(dx, dy)
            if ln <= 0.0 or opt[k] == 0:
                continue
            vx += opt[k] * (-dy / ln)
            vy += opt[k] * (dx / ln)
        ln = math.hypot(vx, vy)
        cand = (Point(0.0, 0.0) if ln <= 1e-12
                else Point(vx / ln * _BANK_NUDGE, vy / ln * _BANK_NUDGE))
        if all(dist(cand, prev) > 0.0 for prev in probes):
            probes.append(cand)
    return probes or [Point(0.0, 0.0)]


def verify_immersion(sheet: FoldedSheet, chain: GeodesicChain,
                     spec: KirigamiSpec, seed: int = 20210) -> FoldReport:
    """Check the assembled sheet: orthogonality, continuity, stations,
    area accounting and sampled isometry."""
    errors: list[str] = []
    metrics: dict[str, float] = {}

    worst = 0.0
    for pc, i in sheet.faces():
        worst = max(worst, pc.state.motions[i].orthogonality_defect())
    metrics["orthogonality"] = worst
    if worst > 1e-9:
        errors.append(f"orthogonality defect {worst:.2e} exceeds 1e-9")

    worst = 0.0
    for pc in sheet.pieces:
        st = pc.state
        for i, j, a, b in st.records:
            if not (st.alive[i] and st.alive[j]):
                continue
            for t in (0.0, 0.5, 1.0):
                pt = lerp(a, b, t)
                gap = dist(st.motions[i].apply(pt), st.motions[j].apply(pt))
                worst = max(worst, gap)
    metrics["continuity"] = worst
    if worst > 1e-8:
        errors.append(f"continuity gap {worst:.2e} exceeds 1e-8")

    worst = 0.0
    uncovered = 0
    for geo in chain.geodesics:
        arcs = geo.arclengths()
        samples = [(pt, arcs[i], (i - 1, i))
                   for i, pt in enumerate(geo.points)]
        for i in range(len(geo.points) - 1):
            samples.append((lerp(geo.points[i], geo.points[i + 1], 0.5),
                            0.5 * (arcs[i] + arcs[i + 1]), (i, i)))
        for pt, s, edges in samples:
            target = Point(s, 0.0)
            dev = math.inf
            for probe in _bank_probes(geo, spec, edges):
                ppt = Point(pt.x + probe.x, pt.y + probe.y)
                hit = 0.0
                found = False
                for pc in sheet.pieces:
                    for f in pc.state.locate(ppt):
                        found = True
                        hit = max(hit, dist(
                            pc.state.motions[f].apply(pt), target))
                if found:
                    dev = min(dev, hit)
            if math.isinf(dev):
                uncovered += 1
            else:
                worst = max(worst, dev)
    metrics["rectification"] = worst
    if worst > 1e-8:
        errors.append(f"rectified stations off by {worst:.2e} (> 1e-8)")
    if uncovered:
        errors.append(f"{uncovered} geodesic samples lie on no piece")

    area = sheet.total_area()
    expect = abs(polygon_area(list(spec.domain)))
    metrics["area"] = abs(area - expect)
    if abs(area - expect) > 1e-6:
        errors.append(f"face areas sum to {area:.9f}, domain has "
                      f"{expect:.9f}")

    rng = random.Random(seed)
    worst = 0.0
    for pc, i in sheet.faces():
        poly = pc.state.polys[i]
        motion = pc.state.motions[i]
        for _ in range(10):
            pa = _random_in_convex(rng, poly)
            pb = _random_in_convex(rng, poly)
            worst = max(worst, abs(dist(motion.apply(pa), motion.apply(pb))
                                   - dist(pa, pb)))
    metrics["isometry"] = worst
    if worst > 1e-8:
        errors.append(f"sampled isometry error {worst:.2e} exceeds 1e-8")

    return FoldReport(ok=not errors, errors=tuple(errors), metrics=metrics)


def _random_in_convex(rng: random.Random, poly: Sequence[Point]) -> Point:
    ws = [rng.random() for _ in poly]
    tot = sum(ws)
    x = sum(w * p.x for w, p in zip(ws, poly)) / tot
    y = sum(w * p.y for w, p in zip(ws, poly)) / tot
    return Point(x, y)
