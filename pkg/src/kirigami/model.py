"""Problem description: convex sheet, straight cuts, two marked points.

The central object is :class:`KirigamiSpec`.  Cuts are straight segments
between shared vertices; together they must form a planar forest.  The
:class:`SlitComplex` adds the angular structure around each cut vertex
that the path admissibility rules are phrased in: the incident cut
directions split the neighbourhood of a vertex into free sectors, and a
path may pass a vertex only within a single free sector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidSpecError
from .geometry import (EPS, EPS_LEN, Point, angle_of, dist, is_convex_ccw,
                       convex_contains, on_segment, point_seg_dist,
                       polygon_area, seg_intersect, sub)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class KirigamiSpec:
    """A convex domain with straight cuts and two marked points.

    domain    counterclockwise convex polygon
    vertices  cut vertices (shared endpoints carry the tree structure)
    edges     index pairs into ``vertices``, one per straight cut
    p, q      the two marked points, in the closed domain but never on a cut
    """

    domain: tuple[Point, ...]
    vertices: tuple[Point, ...]
    edges: tuple[tuple[int, int], ...]
    p: Point
    q: Point

    def cut(self, e: int) -> tuple[Point, Point]:
        i, j = self.edges[e]
        return self.vertices[i], self.vertices[j]

    def cuts(self) -> list[tuple[Point, Point]]:
        return [self.cut(e) for e in range(len(self.edges))]

    def cut_length(self, e: int) -> float:
        a, b = self.cut(e)
        return dist(a, b)

    def total_cut_length(self) -> float:
        return sum(self.cut_length(e) for e in range(len(self.edges)))

    def degree(self, v: int) -> int:
        return sum(1 for i, j in self.edges if i == v or j == v)

    def neighbors(self, v: int) -> list[int]:
        out = []
        for i, j in self.edges:
            if i == v:
                out.append(j)
            elif j == v:
                out.append(i)
        return out

    def on_boundary(self, pt: Point, tol: float = EPS_LEN) -> bool:
        n = len(self.domain)
        return any(on_segment(pt, self.domain[i], self.domain[(i + 1) % n], tol)
                   for i in range(n))

    def to_dict(self) -> dict:
        return {
            "domain": [[v.x, v.y] for v in self.domain],
            "vertices": [[v.x, v.y] for v in self.vertices],
            "edges": [list(e) for e in self.edges],
            "p": [self.p.x, self.p.y],
            "q": [self.q.x, self.q.y],
        }


def spec_from_dict(data: dict) -> KirigamiSpec:
    """Build a spec from plain JSON data, with shape checks but no geometry checks."""
    try:
        domain = tuple(Point(float(x), float(y)) for x, y in data["domain"])
        vertices = tuple(Point(float(x), float(y)) for x, y in data["vertices"])
        edges = tuple((int(i), int(j)) for i, j in data["edges"])
        p = Point(float(data["p"][0]), float(data["p"][1]))
        q = Point(float(data["q"][0]), float(data["q"][1]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpecError(f"malformed input data: {exc}") from exc
    return KirigamiSpec(domain, vertices, edges, p, q)


def load_spec(path: str) -> KirigamiSpec:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return spec_from_dict(data)


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_if_bad(self) -> None:
        if self.errors:
            raise InvalidSpecError("; ".join(self.errors))


def clean_spec(spec: KirigamiSpec) -> tuple[KirigamiSpec, list[str]]:
    """Normalize harmless irregularities, returning the new spec and warnings.

    Reverses a clockwise domain, removes duplicate edges and drops cut
    vertices that no edge uses.  Anything else is left for validate().
    """
    warnings: list[str] = []
    domain = spec.domain
    if polygon_area(domain) < 0:
        domain = tuple(reversed(domain))
        warnings.append("domain was clockwise; reversed")
    seen = set()
    edges = []
    for i, j in spec.edges:
        key = (min(i, j), max(i, j))
        if key in seen:
            warnings.append(f"duplicate cut {key} removed")
            continue
        seen.add(key)
        edges.append((i, j))
    used = sorted({v for e in edges for v in e})
    if len(used) < len(spec.vertices):
        warnings.append(
            f"dropped {len(spec.vertices) - len(used)} isolated cut vertices")
        remap = {v: k for k, v in enumerate(used)}
        vertices = tuple(spec.vertices[v] for v in used)
        edges = [(remap[i], remap[j]) for i, j in edges]
    else:
        vertices = spec.vertices
    return KirigamiSpec(domain, vertices, tuple(edges), spec.p, spec.q), warnings


def validate(spec: KirigamiSpec, eps: float = EPS,
             tol: float = EPS_LEN) -> ValidationReport:
    rep = ValidationReport()
    err = rep.errors.append
    warn = rep.warnings.append

    if len(spec.domain) < 3:
        err("domain needs at least 3 vertices")
        return rep
    if not is_convex_ccw(spec.domain, eps):
        err("domain must be a convex counterclockwise polygon")
        return rep

    nv = len(spec.vertices)
    for k, (i, j) in enumerate(spec.edges):
        if not (0 <= i < nv and 0 <= j < nv):
            err(f"cut {k} references vertex out of range")
            return rep
        if i == j:
            err(f"cut {k} joins a vertex to itself")
    for v, pt in enumerate(spec.vertices):
        if convex_contains(spec.domain, pt, eps, tol) == "outside":
            err(f"cut vertex {v} lies outside the domain")
        elif spec.on_boundary(pt, tol):
            warn(f"cut vertex {v} lies on the domain boundary")
    for v in range(nv):
        for w in range(v + 1, nv):
            if dist(spec.vertices[v], spec.vertices[w]) <= tol:
                err(f"cut vertices {v} and {w} coincide")
    for k in range(len(spec.edges)):
        if spec.cut_length(k) <= tol:
            err(f"cut {k} has zero length")
    if rep.errors:
        return rep

    # Pairwise position: cuts may only meet at shared vertices.
    for a in range(len(spec.edges)):
        sa = spec.cut(a)
        for b in range(a + 1, len(spec.edges)):
            sb = spec.cut(b)
            hit = seg_intersect(*sa, *sb, eps, tol)
            if hit.kind == "overlap":
                err(f"cuts {a} and {b} overlap along a segment")
            elif hit.kind == "point":
                shared = set(spec.edges[a]) & set(spec.edges[b])
                if not any(dist(hit.point, spec.vertices[v]) <= 2 * tol
                           for v in shared):
                    err(f"cuts {a} and {b} cross or touch away from a shared vertex")

    # Cycles among the cuts are legal raw input (sealing dissolves them);
    # they are reported by components(), not here.
    for name, pt in (("p", spec.p), ("q", spec.q)):
        for v, vp in enumerate(spec.vertices):
            if dist(pt, vp) <= tol:
                err(f"{name} coincides with cut vertex {v}")
                break
        if convex_contains(spec.domain, pt, eps, tol) == "outside":
            err(f"{name} lies outside the domain")
        for k in range(len(spec.edges)):
            if point_seg_dist(pt, *spec.cut(k)) <= tol:
                err(f"{name} lies on cut {k}")
                break
    if dist(spec.p, spec.q) <= tol:
        err("p and q coincide")
    return rep


# ---------------------------------------------------------------------------
# Angular structure around cut vertices


@dataclass(frozen=True)
class Sector:
    """Free angular sector at a vertex, counterclockwise from lo to hi."""

    lo: float
    hi: float  # lo <= hi <= lo + 2*pi

    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, theta: float, slack: float = 1e-12) -> bool:
        t = _wrap_into(theta, self.lo)
        return t <= self.hi + slack


def _wrap_into(theta: float, lo: float) -> float:
    """Shift theta by multiples of 2*pi into [lo, lo + 2*pi)."""
    t = math.fmod(theta - lo, TWO_PI)
    if t < 0:
        t += TWO_PI
    return lo + t


class SlitComplex:
    """Directions and free sectors around every cut vertex.

    A ray from a vertex is located either strictly inside a free sector or
    on one of its boundary directions (that is, along an incident cut).
    Rays along cuts are disambiguated by the side of the cut the material
    stays on; see :meth:`run_sector`.

    Vertices on the domain boundary additionally see the two boundary
    directions as walls.  Sectors outside the interior cone are dead: no
    passage may use them, and a run flank that would open into one is
    closed off.
    """

    def __init__(self, spec: KirigamiSpec, boundary_tol: float = EPS_LEN):
        self.spec = spec
        self._dirs: list[list[tuple[float, int]]] = []
        self._bounds: list[list[float]] = []
        self._nbr_idx: list[dict[int, int]] = []
        self._sectors: list[list[Sector]] = []
        self._dead: list[frozenset[int]] = []
        dom = list(spec.domain)
        if len(dom) >= 3 and polygon_area(dom) < 0.0:
            dom.reverse()
        for v in range(len(spec.vertices)):
            pairs = []
            for w in spec.neighbors(v):
                theta = angle_of(sub(spec.vertices[w], spec.vertices[v]))
                pairs.append((theta, w))
            pairs.sort()
            for k in range(1, len(pairs)):
                if pairs[k][0] - pairs[k - 1][0] <= 1e-12:
                    raise InvalidSpecError(
                        f"cuts {pairs[k-1][1]} and {pairs[k][1]} leave vertex "
                        f"{v} in the same direction")
            self._dirs.append(pairs)
            wall = _wall_angles(spec.vertices[v], dom, boundary_tol) if pairs \
                else None
            bounds = [t for t, _ in pairs]
            if wall is not None:
                for t in wall:
                    if all(_circ_gap(t, b) > 1e-12 for b in bounds):
                        bounds.append(t)
            bounds.sort()
            self._bounds.append(bounds)
            idx = {}
            for theta, w in pairs:
                idx[w] = next(k for k, b in enumerate(bounds) if b == theta)
            self._nbr_idx.append(idx)
            secs = self._build_sectors(bounds)
            self._sectors.append(secs)
            dead = set()
            if wall is not None:
                fwd, bwd = wall
                span = _wrap_into(bwd, fwd) - fwd
                for k, s in enumerate(secs):
                    mid = 0.5 * (s.lo + s.hi)
                    if _wrap_into(mid, fwd - 1e-9) - fwd > span + 2e-9:
                        dead.add(k)
            self._dead.append(frozenset(dead))

    @staticmethod
    def _build_sectors(bounds: list[float]) -> list[Sector]:
        if not bounds:
            return [Sector(-math.pi, math.pi)]
        if len(bounds) == 1:
            t = bounds[0]
            return [Sector(t, t + TWO_PI)]
        out = []
        for k in range(len(bounds)):
            lo = bounds[k]
            hi = bounds[(k + 1) % len(bounds)]
            if hi <= lo:
                hi += TWO_PI
            out.append(Sector(lo, hi))
        return out

    def degree(self, v: int) -> int:
        return len(self._dirs[v])

    def sectors(self, v: int) -> list[Sector]:
        return self._sectors[v]

    def dead_sectors(self, v: int) -> frozenset[int]:
        return self._dead[v]

    def free_sector_ids(self, v: int, theta: float,
                        ang_tol: float = 1e-9) -> frozenset[int]:
        """Live sectors whose closure contains the ray at angle theta.

        A ray strictly inside a sector yields one id; a ray along a cut
        direction yields the two flanking ids (minus any dead ones).
        """
        secs = self._sectors[v]
        dead = self._dead[v]
        if len(secs) == 1:
            return frozenset() if 0 in dead else frozenset({0})
        out = set()
        for k, s in enumerate(secs):
            if k in dead:
                continue
            t = _wrap_into(theta, s.lo - ang_tol)
            if t <= s.hi + ang_tol:
                out.add(k)
        return frozenset(out)

    def run_sector(self, v: int, neighbor: int, side: int) -> int:
        """Sector flanking the cut toward ``neighbor``; side=+1 CCW, -1 CW.

        May name a dead sector; callers treat that as a closed flank.
        """
        idx = self._nbr_idx[v].get(neighbor)
        if idx is None:
            raise ValueError(f"vertex {neighbor} is not adjacent to {v}")
        n = len(self._bounds[v])
        if n == 1:
            return 0
        return idx if side > 0 else (idx - 1) % n


def _circ_gap(a: float, b: float) -> float:
    d = abs(math.fmod(a - b, TWO_PI))
    return min(d, TWO_PI - d)


def _wall_angles(v: Point, dom: list[Point],
                 tol: float) -> Optional[tuple[float, float]]:
    """Boundary directions (forward, backward) at v, or None if interior.

    The interior cone runs counterclockwise from forward to backward for
    a counterclockwise domain.
    """
    n = len(dom)
    for k in range(n):
        if dist(v, dom[k]) <= tol:
            fwd = angle_of(sub(dom[(k + 1) % n], dom[k]))
            bwd = angle_of(sub(dom[(k - 1) % n], dom[k]))
            return fwd, bwd
    for k in range(n):
        a, b = dom[k], dom[(k + 1) % n]
        if point_seg_dist(v, a, b) <= tol:
            fwd = angle_of(sub(b, a))
            bwd = angle_of(sub(a, b))
            return fwd, bwd
    return None


@dataclass(frozen=True)
class CutTree:
    """One connected component of the cut graph.

    Cyclic components are legal in raw input and flagged here; after
    sealing they must be gone (Corollary-style minimality).
    """

    vertices: tuple[int, ...]
    edges: tuple[int, ...]          # edge indices into spec.edges
    leaves: tuple[int, ...]
    cyclic: bool = False


def components(spec: KirigamiSpec) -> list[CutTree]:
    nv = len(spec.vertices)
    parent = list(range(nv))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in spec.edges:
        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for v in range(nv):
        groups.setdefault(find(v), []).append(v)
    out = []
    for verts in groups.values():
        vset = set(verts)
        eids = tuple(k for k, (i, j) in enumerate(spec.edges) if i in vset)
        leaves = tuple(v for v in sorted(verts) if spec.degree(v) == 1)
        out.append(CutTree(tuple(sorted(verts)), eids, leaves,
                           cyclic=len(eids) >= len(verts)))
    out.sort(key=lambda t: t.vertices[0] if t.vertices else -1)
    return out


def tree_path(spec: KirigamiSpec, start: int, goal: int) -> Optional[list[int]]:
    """Vertex path between two vertices of the same tree, or None."""
    if start == goal:
        return [start]
    prev = {start: -1}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for w in spec.neighbors(v):
                if w not in prev:
                    prev[w] = v
                    if w == goal:
                        path = [w]
                        while path[-1] != start:
                            path.append(prev[path[-1]])
                        path.reverse()
                        return path
                    nxt.append(w)
        frontier = nxt
    return None
