"""Ordering co-optimal geodesics and carving the sheet between them.

Two geodesics with the same endpoints are compared by orientation: the
first precedes the second when their concatenated loop bounds all of its
enclosed pieces counterclockwise.  On a minimal configuration this is a
total order, so the geodesics line up in a chain, and consecutive pairs
enclose the regions the folding will treat one at a time.

Within one region the cut trees line up left to right.  Each tree
contributes two paths through itself (joining its outermost contacts
with the two bounding geodesics); between these, the region splits into
cut-free plates and, behind branching trees, pocket polygons pressed
against a single geodesic.
"""

from __future__ import annotations

from dataclasses import dataclass

from shapely.geometry import LineString
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.polygon import orient as shapely_orient
from shapely.ops import polygonize, unary_union

from .errors import ConstructionError, ExteriorTreeError, KirigamiError
from .geometry import (EPS_LEN, Point, dedupe_ring, dist, lerp,
                       point_seg_dist, polygon_area, polygon_contains,
                       polyline_length, same_point)
from .model import KirigamiSpec, components, tree_path
from .geodesics import GeodesicPolygonal, GeodesicSet


@dataclass(frozen=True)
class RectifiedInterval:
    """Target segment for the folding, from the origin along +x."""

    length: float

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError("rectified interval needs positive length")

    @property
    def end(self) -> Point:
        return Point(self.length, 0.0)


@dataclass(frozen=True)
class GeodesicChain:
    """All geodesics sorted from least to greatest.

    loop_areas holds, per consecutive pair, the areas of the simple
    loops their concatenation encloses (the orientation witnesses).
    """

    geodesics: tuple[GeodesicPolygonal, ...]
    loop_areas: tuple[tuple[float, ...], ...]

    def __len__(self) -> int:
        return len(self.geodesics)


def _area_tol(scale: float) -> float:
    return 1e-12 * scale * scale + 1e-12


def _simple_loops(pts: list[Point], tol: float) -> list[list[Point]]:
    """Split a closed polygonal walk at repeated points into simple rings."""
    stack: list[Point] = []
    loops: list[list[Point]] = []
    for p in pts + [pts[0]]:
        hit = next((i for i, s in enumerate(stack)
                    if same_point(s, p, tol)), None)
        if hit is None:
            stack.append(p)
            continue
        loop = stack[hit:]
        if len(loop) >= 3:
            loops.append(loop)
        del stack[hit + 1:]
    return loops


def _proper_crossing(pa: list[Point], pb: list[Point], tol: float) -> bool:
    for i in range(len(pa) - 1):
        a, b = pa[i], pa[i + 1]
        for j in range(len(pb) - 1):
            c, d = pb[j], pb[j + 1]
            d1 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
            d2 = (b.x - a.x) * (d.y - a.y) - (b.y - a.y) * (d.x - a.x)
            d3 = (d.x - c.x) * (a.y - c.y) - (d.y - c.y) * (a.x - c.x)
            d4 = (d.x - c.x) * (b.y - c.y) - (d.y - c.y) * (b.x - c.x)
            lim = tol * max(dist(a, b), dist(c, d))
            if ((d1 > lim and d2 < -lim) or (d1 < -lim and d2 > lim)) and \
               ((d3 > lim and d4 < -lim) or (d3 < -lim and d4 > lim)):
                return True
    return False


def precedes(first: GeodesicPolygonal, second: GeodesicPolygonal,
             tol: float = EPS_LEN) -> bool:
    """Orientation order: does first come before second?

    True when the walk along first and back along second bounds every
    enclosed piece counterclockwise.  Reflexive; curves that cross
    transversally compare False both ways.
    """
    pa, pb = list(first.points), list(second.points)
    if not (same_point(pa[0], pb[0], tol) and same_point(pa[-1], pb[-1], tol)):
        raise KirigamiError("curves do not share their endpoints")
    if _proper_crossing(pa, pb, tol):
        return False
    atol = _area_tol(polyline_length(pa))
    loop = pa + pb[-2:0:-1]
    return all(polygon_area(ring) > -atol
               for ring in _simple_loops(loop, tol))


def build_chain(gs: GeodesicSet, tol: float = EPS_LEN) -> GeodesicChain:
    """Sort a geodesic set into its chain, least first.

    Raises if the order is not total on the set (two members neither of
    which precedes the other), which signals an upstream admissibility
    bug rather than legitimate geometry.
    """
    geos = list(gs.geodesics)
    n = len(geos)
    if n == 0:
        raise KirigamiError("no geodesics to order")
    for g in geos[1:]:
        if abs(g.length - geos[0].length) > tol:
            raise KirigamiError("geodesics of unequal length in one set")
    before = [[precedes(geos[i], geos[j], tol) for j in range(n)]
              for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if before[i][j] and before[j][i]:
                if geos[i].points != geos[j].points:
                    raise KirigamiError(
                        f"order not antisymmetric on geodesics {i},{j}")
            elif not before[i][j] and not before[j][i]:
                raise KirigamiError(
                    f"geodesics {i} and {j} are not comparable")
    ranks = [sum(before[j][i] for j in range(n) if j != i) for i in range(n)]
    if sorted(ranks) != list(range(n)):
        raise KirigamiError("order ranks are not distinct")
    order = sorted(range(n), key=ranks.__getitem__)
    out = [geos[i] for i in order]
    areas = []
    for a, b in zip(out, out[1:]):
        panels = _panels(a, b, tol)
        areas.append(tuple(p.area for p in panels))
    return GeodesicChain(tuple(out), tuple(areas))


# ---------------------------------------------------------------------------
# regions between consecutive geodesics


@dataclass(frozen=True)
class Panel:
    """One simply connected piece of the strip between two geodesics.

    The strip splits into panels wherever the geodesics touch; lower
    runs along the earlier geodesic, upper along the later one, and both
    share their first and last point.
    """

    lower: tuple[Point, ...]
    upper: tuple[Point, ...]
    lower_span: tuple[int, int]   # waypoint index range on the earlier curve
    upper_span: tuple[int, int]
    area: float

    def ring(self) -> list[Point]:
        return dedupe_ring(list(self.lower) + list(self.upper)[-2:0:-1])


def _matches(a: list[Point], b: list[Point],
             tol: float) -> list[tuple[int, int]]:
    out = []
    j = 0
    for i, pa in enumerate(a):
        for j2 in range(j, len(b)):
            if same_point(pa, b[j2], tol):
                out.append((i, j2))
                j = j2 + 1
                break
    return out


def _panels(lo: GeodesicPolygonal, hi: GeodesicPolygonal,
            tol: float) -> list[Panel]:
    a, b = list(lo.points), list(hi.points)
    ms = _matches(a, b, tol)
    if not ms or ms[0] != (0, 0) or ms[-1] != (len(a) - 1, len(b) - 1):
        raise ConstructionError("geodesic pair does not share its endpoints")
    atol = _area_tol(polyline_length(a))
    panels = []
    for (i0, j0), (i1, j1) in zip(ms, ms[1:]):
        low = a[i0:i1 + 1]
        up = b[j0:j1 + 1]
        ring = dedupe_ring(low + up[-2:0:-1])
        area = polygon_area(ring) if len(ring) >= 3 else 0.0
        if abs(area) <= atol:
            continue
        if area < 0:
            raise ConstructionError("geodesic pair encloses clockwise area; "
                                    "chain order is broken")
        panels.append(Panel(tuple(low), tuple(up), (i0, i1), (j0, j1), area))
    return panels


@dataclass(frozen=True)
class PanelTree:
    """A cut tree inside a panel with its two crossing paths.

    first_path joins the tree's earliest contact on the lower geodesic
    to its earliest on the upper one; last_path joins the two latest
    contacts.  Both run lower to upper and may coincide.
    """

    component: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    lower_marks: tuple[int, ...]  # waypoint indices on panel.lower
    upper_marks: tuple[int, ...]
    first_path: tuple[int, ...]   # vertex ids, lower end first
    last_path: tuple[int, ...]


@dataclass(frozen=True)
class Pocket:
    """Cut-free piece pressed between a tree and a single geodesic."""

    tree: int                 # index into the panel's tree list
    rim: tuple[Point, ...]    # boundary portion along the tree
    span: tuple[Point, ...]   # boundary portion along the geodesic
    on_lower: bool
    ring: tuple[Point, ...]


@dataclass(frozen=True)
class PanelPieces:
    panel: Panel
    trees: tuple[PanelTree, ...]
    plates: tuple[tuple[Point, ...], ...]       # s+1 cut-free polygons
    pockets: tuple[tuple[Pocket, ...], ...]     # one family per tree


@dataclass(frozen=True)
class Region:
    """Everything between chain members r and r+1."""

    index: int
    panels: tuple[PanelPieces, ...]
    prefix_end: Point     # last point the pair shares before diverging
    suffix_start: Point   # first point where they rejoin for good
    area: float


@dataclass(frozen=True)
class RegionDecomposition:
    regions: tuple[Region, ...]
    exterior_shells: tuple[tuple[Point, ...], ...]
    exterior_holes: tuple[tuple[Point, ...], ...]
    chain_trees: tuple[int, ...]   # components riding entirely on the chain
    interval: RectifiedInterval


def _on_polyline(p: Point, pts: tuple[Point, ...], tol: float) -> bool:
    return any(point_seg_dist(p, pts[k], pts[k + 1]) <= tol
               for k in range(len(pts) - 1))


def _tree_votes(spec, comp, chain, region_panels, tol):
    """Which pieces of the plane does this tree's interior touch?"""
    votes = set()
    curves = [g.points for g in chain.geodesics]
    for e in comp.edges:
        a, b = spec.cut(e)
        mid = lerp(a, b, 0.5)
        if any(_on_polyline(mid, c, tol) for c in curves):
            continue
        placed = False
        for r, panels in enumerate(region_panels):
            for k, pn in enumerate(panels):
                if polygon_contains(pn.ring(), mid, tol) == "inside":
                    votes.add((r, k))
                    placed = True
        if not placed:
            votes.add("exterior")
    return votes


def _panel_pieces(spec: KirigamiSpec, panel: Panel,
                  tree_comps: list[tuple[int, object]],
                  tol: float) -> PanelPieces:
    verts = spec.vertices
    lower, upper = panel.lower, panel.upper

    def marks(comp, path):
        found = []
        for i, wp in enumerate(path):
            for v in comp.vertices:
                if same_point(verts[v], wp, tol):
                    found.append((i, v))
        return found

    trees = []
    for cid, comp in tree_comps:
        ml = marks(comp, lower)
        mu = marks(comp, upper)
        if not ml or not mu:
            raise ConstructionError(
                f"tree {cid} does not reach both geodesics of its region")
        first = tree_path(spec, ml[0][1], mu[0][1])
        last = tree_path(spec, ml[-1][1], mu[-1][1])
        trees.append(PanelTree(
            component=cid, vertices=comp.vertices, edges=comp.edges,
            lower_marks=tuple(i for i, _ in ml),
            upper_marks=tuple(i for i, _ in mu),
            first_path=tuple(first), last_path=tuple(last)))
    trees.sort(key=lambda t: t.lower_marks[0])
    for a, b in zip(trees, trees[1:]):
        if not (a.lower_marks[-1] < b.lower_marks[0]
                and a.upper_marks[-1] < b.upper_marks[0]):
            raise ConstructionError("trees overlap along a geodesic")

    def pts(vids):
        return [verts[v] for v in vids]

    plates = []
    for m in range(len(trees) + 1):
        ring: list[Point] = []
        if m == 0:
            i0, j0 = 0, 0
        else:
            i0 = trees[m - 1].lower_marks[-1]
            j0 = trees[m - 1].upper_marks[-1]
        if m == len(trees):
            i1, j1 = len(lower) - 1, len(upper) - 1
        else:
            i1 = trees[m].lower_marks[0]
            j1 = trees[m].upper_marks[0]
        ring.extend(lower[i0:i1 + 1])
        if m < len(trees):
            ring.extend(pts(trees[m].first_path))
        ring.extend(reversed(upper[j0:j1 + 1]))
        if m > 0:
            ring.extend(reversed(pts(trees[m - 1].last_path)))
        ring = dedupe_ring(ring, tol)
        plates.append(tuple(ring))

    pockets = _extract_pockets(spec, panel, trees, tol)
    return PanelPieces(panel, tuple(trees), tuple(plates), pockets)


def _extract_pockets(spec, panel, trees, tol):
    """Split the panel by its trees; faces touching one geodesic only."""
    if not trees:
        return ()
    ring = panel.ring()
    lines = [LineString(ring + [ring[0]])]
    for t in trees:
        for e in t.edges:
            lines.append(LineString(spec.cut(e)))
    shell = ShapelyPolygon(ring)
    faces = []
    for face in polygonize(unary_union(lines)):
        if not shell.contains(face.representative_point()):
            continue
        faces.append(shapely_orient(face, 1.0))

    out: list[list[Pocket]] = [[] for _ in trees]
    for face in faces:
        coords = [Point(x, y) for x, y in face.exterior.coords[:-1]]
        kinds = []
        owner = None
        for k in range(len(coords)):
            a, b = coords[k], coords[(k + 1) % len(coords)]
            mid = lerp(a, b, 0.5)
            tagged = None
            for ti, t in enumerate(trees):
                if any(point_seg_dist(mid, *spec.cut(e)) <= tol
                       for e in t.edges):
                    tagged = ("tree", ti)
                    owner = ti
                    break
            if tagged is None:
                if _on_polyline(mid, panel.lower, tol):
                    tagged = ("lower", None)
                elif _on_polyline(mid, panel.upper, tol):
                    tagged = ("upper", None)
                else:
                    raise ConstructionError("panel face edge off all "
                                            "boundaries")
            kinds.append(tagged)
        geo_kinds = {k for k, _ in kinds if k != "tree"}
        if len(geo_kinds) != 1:
            # touches both geodesics: that face is a plate, not a pocket
            continue
        side = geo_kinds.pop()
        n = len(coords)
        # rotate so the geodesic stretch is one contiguous block at the end
        starts = [k for k in range(n)
                  if kinds[k][0] != "tree" and kinds[k - 1][0] == "tree"]
        if len(starts) != 1:
            raise ConstructionError("pocket touches its geodesic twice")
        s = starts[0]
        kinds = kinds[s:] + kinds[:s]
        coords = coords[s:] + coords[:s]
        ngeo = sum(1 for k, _ in kinds if k != "tree")
        span = coords[0:ngeo + 1]
        rim = coords[ngeo:] + [coords[0]]
        out[owner].append(Pocket(
            tree=owner, rim=tuple(rim), span=tuple(span),
            on_lower=side == "lower", ring=tuple(coords)))
    return tuple(tuple(p) for p in out)


def decompose(chain: GeodesicChain, spec: KirigamiSpec,
              tol: float = EPS_LEN) -> RegionDecomposition:
    """Carve the domain along the chain into regions, plates and pockets.

    Raises ExteriorTreeError when a cut tree sits outside the strip the
    chain sweeps; the flat folding cannot treat such trees.
    """
    comps = components(spec)
    region_panels = [_panels(a, b, tol) for a, b in
                     zip(chain.geodesics, chain.geodesics[1:])]

    assignment: dict[tuple[int, int], list[tuple[int, object]]] = {}
    chain_trees: list[int] = []
    outside: list[int] = []
    for cid, comp in enumerate(comps):
        votes = _tree_votes(spec, comp, chain, region_panels, tol)
        if not votes:
            chain_trees.append(cid)
            continue
        if votes == {"exterior"}:
            outside.append(cid)
            continue
        if len(votes) != 1:
            raise ConstructionError(
                f"tree {cid} touches several regions: {sorted(map(str, votes))}")
        assignment.setdefault(votes.pop(), []).append((cid, comp))
    if outside:
        raise ExteriorTreeError(
            "cut trees outside the geodesic strip obstruct the folding",
            trees=tuple(comps[cid].vertices for cid in outside))

    regions = []
    for r, panels in enumerate(region_panels):
        pieces = tuple(
            _panel_pieces(spec, pn, assignment.get((r, k), []), tol)
            for k, pn in enumerate(panels))
        regions.append(Region(
            index=r, panels=pieces,
            prefix_end=panels[0].lower[0],
            suffix_start=panels[-1].lower[-1],
            area=sum(pn.area for pn in panels)))

    hull_panels = (_panels(chain.geodesics[0], chain.geodesics[-1], tol)
                   if len(chain) > 1 else [])
    dom = ShapelyPolygon(spec.domain)
    if hull_panels:
        hull = unary_union([ShapelyPolygon(p.ring()) for p in hull_panels])
        ext = dom.difference(hull)
    else:
        ext = dom
    shells, holes = [], []
    parts = list(ext.geoms) if ext.geom_type == "MultiPolygon" else [ext]
    for part in parts:
        if part.is_empty:
            continue
        shells.append(tuple(Point(x, y)
                            for x, y in part.exterior.coords[:-1]))
        for hole in part.interiors:
            holes.append(tuple(Point(x, y) for x, y in hole.coords[:-1]))
    return RegionDecomposition(
        regions=tuple(regions),
        exterior_shells=tuple(shells),
        exterior_holes=tuple(holes),
        chain_trees=tuple(chain_trees),
        interval=RectifiedInterval(chain.geodesics[0].length))
