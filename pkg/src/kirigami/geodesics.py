"""Shortest paths around straight cuts.

Every geodesic between p and q is a polygonal whose interior vertices are
distinct cut vertices, and whose edges either keep clear of all cut
interiors or coincide with a whole cut.  The search therefore runs on a
visibility graph over {p, q} and the cut vertices.  Passing a vertex is
allowed only within one free angular sector of the slit complex; an edge
running along a cut carries a side flag telling on which flank of the cut
the approximating curves travel, and that flag must be continuable through
the cut's endpoints.

The search state is a directed arc together with its side flag, so that
Dijkstra's relaxation can apply the per-vertex passage test exactly at the
moment two arcs are concatenated.  All co-optimal predecessors are kept
and the full geodesic set is read off the resulting DAG.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConstructionError, KirigamiError, NoPathError
from .geometry import (EPS, EPS_LEN, Point, angle_of, dist, on_segment,
                       orient, point_seg_dist, polyline_length, project_t,
                       same_point, sub)
from .model import KirigamiSpec, SlitComplex

TERMINAL = -1
ENUM_CAP = 10 ** 4


@dataclass(frozen=True)
class GeodesicPolygonal:
    """A single geodesic: points, vertex bookkeeping and run annotations.

    points include collinear pass-through vertices, so consecutive edges
    can individually be full cuts.  ``node_vertices`` holds the cut-vertex
    index of each point (-1 for the two terminals).  ``edge_runs`` marks,
    per edge, the id of the cut it coincides with (or -1), and
    ``side_options`` lists every consistent assignment of flank signs to
    the run edges (sign is relative to the cut's stored orientation;
    0 stands for a free edge).
    """

    points: tuple[Point, ...]
    node_vertices: tuple[int, ...]
    length: float
    edge_runs: tuple[int, ...]
    side_options: tuple[tuple[int, ...], ...]

    @property
    def interior_vertices(self) -> tuple[int, ...]:
        return self.node_vertices[1:-1]

    @property
    def covered_cuts(self) -> tuple[int, ...]:
        return tuple(sorted({e for e in self.edge_runs if e >= 0}))

    def corner_indices(self, eps: float = EPS) -> tuple[int, ...]:
        """Indices of points where the path actually turns (plus the ends)."""
        out = [0]
        for i in range(1, len(self.points) - 1):
            if orient(self.points[i - 1], self.points[i],
                      self.points[i + 1], eps) != 0:
                out.append(i)
        out.append(len(self.points) - 1)
        return tuple(out)

    def arclengths(self) -> tuple[float, ...]:
        out = [0.0]
        for i in range(len(self.points) - 1):
            out.append(out[-1] + dist(self.points[i], self.points[i + 1]))
        return tuple(out)

    def arclength_of_index(self, i: int) -> float:
        return self.arclengths()[i]


@dataclass(frozen=True)
class GeodesicSet:
    distance: float
    geodesics: tuple[GeodesicPolygonal, ...]
    tie_flagged: bool = False


# ---------------------------------------------------------------------------
# Edge classification

FREE, RUN, BLOCKED = 0, 1, 2


def classify_edge(spec: KirigamiSpec, a: Point, b: Point,
                  eps: float = EPS, tol: float = EPS_LEN) -> tuple[int, int]:
    """Classify the open segment (a, b) against all cuts.

    Returns (kind, cut_id): kind FREE, RUN (segment equals that whole cut)
    or BLOCKED.  Pass-through of a cut vertex strictly inside the segment
    is reported as BLOCKED: such edges must be subdivided at the vertex
    before the passage rules can be applied there.
    """
    la = dist(a, b)
    if la <= tol:
        raise ValueError("degenerate edge")
    for v, pt in enumerate(spec.vertices):
        if (point_seg_dist(pt, a, b) <= tol
                and dist(pt, a) > tol and dist(pt, b) > tol):
            return BLOCKED, -1
    run = -1
    for e in range(len(spec.edges)):
        c, d = spec.cut(e)
        if ((same_point(a, c, tol) and same_point(b, d, tol))
                or (same_point(a, d, tol) and same_point(b, c, tol))):
            run = e
            continue
        o1 = orient(a, b, c, eps)
        o2 = orient(a, b, d, eps)
        if o1 == 0 and o2 == 0:
            lo = min(project_t(c, a, b), project_t(d, a, b))
            hi = max(project_t(c, a, b), project_t(d, a, b))
            if min(hi, 1.0) - max(lo, 0.0) > tol / la:
                return BLOCKED, -1
            continue
        o3 = orient(c, d, a, eps)
        o4 = orient(c, d, b, eps)
        if o1 * o2 < 0 and o3 * o4 < 0:
            return BLOCKED, -1
    return (RUN, run) if run >= 0 else (FREE, -1)


def edge_admissible(a: Point, b: Point, cx: SlitComplex) -> bool:
    """Whether a path edge from a to b is allowed by the cut layout."""
    kind, _ = classify_edge(cx.spec, a, b)
    return kind != BLOCKED


# ---------------------------------------------------------------------------
# Search graph

@dataclass
class _Arc:
    u: int
    v: int
    length: float
    run_cut: int       # -1 when free
    in_sets: tuple     # sector-id sets at v, indexed by side (-1, 0, +1)
    out_sets: tuple    # sector-id sets at u


class _Graph:
    def __init__(self, spec: KirigamiSpec, cx: SlitComplex,
                 eps: float, tol: float):
        self.spec = spec
        self.cx = cx
        pts = [spec.p, spec.q, *spec.vertices]
        self.points = pts
        self.vertex_of = [TERMINAL, TERMINAL] + list(range(len(spec.vertices)))
        n = len(pts)
        P = np.array(pts, dtype=float)
        iu, iv = np.triu_indices(n, 1)
        ok = np.ones(len(iu), dtype=bool)
        A = P[iu]
        B = P[iv]
        D = B - A
        seglen = np.hypot(D[:, 0], D[:, 1])
        ok &= seglen > tol
        runs = np.full(len(iu), -1, dtype=int)

        nv = len(spec.vertices)
        if nv:
            V = P[2:]
            # vertex strictly interior to a candidate edge -> composite edge
            W = V[None, :, :] - A[:, None, :]
            t = (W[:, :, 0] * D[:, None, 0] + W[:, :, 1] * D[:, None, 1])
            t = t / np.maximum(seglen[:, None] ** 2, 1e-300)
            tc = np.clip(t, 0.0, 1.0)
            foot = A[:, None, :] + tc[:, :, None] * D[:, None, :]
            dv = np.hypot(V[None, :, 0] - foot[:, :, 0],
                          V[None, :, 1] - foot[:, :, 1])
            slack = tol / np.maximum(seglen, 1e-300)
            interior = ((dv <= tol)
                        & (t > slack[:, None]) & (t < 1.0 - slack[:, None]))
            ok &= ~interior.any(axis=1)

        if len(spec.edges):
            C0 = np.array([spec.vertices[i] for i, _ in spec.edges], float)
            C1 = np.array([spec.vertices[j] for _, j in spec.edges], float)
            E = C1 - C0
            cutlen = np.hypot(E[:, 0], E[:, 1])

            def xr(px, py, qx, qy):
                return px * qy - py * qx

            d1 = xr(D[:, None, 0], D[:, None, 1],
                    C0[None, :, 0] - A[:, None, 0],
                    C0[None, :, 1] - A[:, None, 1])
            d2 = xr(D[:, None, 0], D[:, None, 1],
                    C1[None, :, 0] - A[:, None, 0],
                    C1[None, :, 1] - A[:, None, 1])
            d3 = xr(E[None, :, 0], E[None, :, 1],
                    A[:, None, 0] - C0[None, :, 0],
                    A[:, None, 1] - C0[None, :, 1])
            d4 = xr(E[None, :, 0], E[None, :, 1],
                    B[:, None, 0] - C0[None, :, 0],
                    B[:, None, 1] - C0[None, :, 1])
            band = eps * np.maximum(seglen[:, None] * cutlen[None, :], 1.0)
            s1 = np.where(np.abs(d1) <= band, 0, np.sign(d1))
            s2 = np.where(np.abs(d2) <= band, 0, np.sign(d2))
            s3 = np.where(np.abs(d3) <= band, 0, np.sign(d3))
            s4 = np.where(np.abs(d4) <= band, 0, np.sign(d4))
            crossing = (s1 * s2 < 0) & (s3 * s4 < 0)
            ok &= ~crossing.any(axis=1)

            coll = (s1 == 0) & (s2 == 0)
            if coll.any():
                t0 = ((C0[None, :, 0] - A[:, None, 0]) * D[:, None, 0]
                      + (C0[None, :, 1] - A[:, None, 1]) * D[:, None, 1])
                t1 = ((C1[None, :, 0] - A[:, None, 0]) * D[:, None, 0]
                      + (C1[None, :, 1] - A[:, None, 1]) * D[:, None, 1])
                den = np.maximum(seglen[:, None] ** 2, 1e-300)
                t0, t1 = t0 / den, t1 / den
                lo = np.maximum(np.minimum(t0, t1), 0.0)
                hi = np.minimum(np.maximum(t0, t1), 1.0)
                ovl = (hi - lo) * seglen[:, None]
                overlap = coll & (ovl > tol)
                cut_nodes = np.array(
                    [sorted((i + 2, j + 2)) for i, j in spec.edges], int)
                pairs = np.stack([iu, iv], axis=1)
                is_that_cut = ((pairs[:, None, 0] == cut_nodes[None, :, 0])
                               & (pairs[:, None, 1] == cut_nodes[None, :, 1]))
                bad = overlap & ~is_that_cut
                ok &= ~bad.any(axis=1)
                hits = overlap & is_that_cut
                which = hits.argmax(axis=1)
                runs = np.where(hits.any(axis=1), which, runs)

        self.adj: list[list[_Arc]] = [[] for _ in range(n)]
        for k in np.nonzero(ok)[0]:
            u, v = int(iu[k]), int(iv[k])
            length = float(seglen[k])
            rc = int(runs[k])
            self._add_arc(u, v, length, rc)
            self._add_arc(v, u, length, rc)

    def _sector_sets(self, node: int, other: int, run_cut: int) -> tuple:
        """Passage sector sets at ``node`` for travel toward/from ``other``.

        Index 0: free-edge set; 1 and 2: run flank sets for side +1 / -1,
        sides measured along travel node->other.  For the incoming use the
        caller flips signs.
        """
        vid = self.vertex_of[node]
        if vid == TERMINAL:
            return (None, None, None)
        theta = angle_of(sub(self.points[other], self.points[node]))
        if run_cut < 0:
            return (self.cx.free_sector_ids(vid, theta), None, None)
        wid = self.vertex_of[other]
        dead = self.cx.dead_sectors(vid)

        def flank(side: int) -> frozenset[int]:
            s = self.cx.run_sector(vid, wid, side)
            return frozenset() if s in dead else frozenset({s})

        return (None, flank(1), flank(-1))

    def _add_arc(self, u: int, v: int, length: float, run_cut: int) -> None:
        outs = self._sector_sets(u, v, run_cut)
        ins_raw = self._sector_sets(v, u, run_cut)
        # Incoming ray at v points back toward u; a run travelled with side s
        # flanks the sector on the -s side of that back direction.
        if run_cut >= 0:
            ins = (None, ins_raw[2], ins_raw[1])
        else:
            ins = ins_raw
        self.adj[u].append(_Arc(u, v, length, run_cut, ins, outs))


def _out_set(arc: _Arc, side: int):
    if arc.run_cut < 0:
        return arc.out_sets[0]
    return arc.out_sets[1] if side > 0 else arc.out_sets[2]


def _in_set(arc: _Arc, side: int):
    if arc.run_cut < 0:
        return arc.in_sets[0]
    return arc.in_sets[1] if side > 0 else arc.in_sets[2]


def _passage_ok(a_in: _Arc, s_in: int, a_out: _Arc, s_out: int) -> bool:
    si = _in_set(a_in, s_in)
    so = _out_set(a_out, s_out)
    if si is None or so is None:
        return False
    return not si.isdisjoint(so)


def _run_search(graph: _Graph, tie_eps: float, near_band: float,
                stop_early: bool):
    """Dijkstra over (arc, side) states with co-optimal predecessor lists."""
    states: list[tuple[_Arc, int]] = []
    state_id: dict[tuple[int, int, int, int], int] = {}
    for u in range(len(graph.adj)):
        for arc in graph.adj[u]:
            sides = (0,) if arc.run_cut < 0 else (1, -1)
            for s in sides:
                state_id[(arc.u, arc.v, arc.run_cut, s)] = len(states)
                states.append((arc, s))
    ns = len(states)
    distv = [math.inf] * ns
    preds: list[list[int]] = [[] for _ in range(ns)]
    loose: list[list[int]] = [[] for _ in range(ns)]
    done = [False] * ns
    heap: list[tuple[float, int]] = []
    for arc in graph.adj[0]:
        sid = state_id[(0, arc.v, arc.run_cut, 0)]
        distv[sid] = arc.length
        heapq.heappush(heap, (arc.length, sid))
    best_end = math.inf
    while heap:
        d, sid = heapq.heappop(heap)
        if done[sid] or d > distv[sid] + tie_eps:
            continue
        done[sid] = True
        arc, s = states[sid]
        if arc.v == 1:
            best_end = min(best_end, d)
            if stop_early:
                return best_end, states, state_id, distv, preds, loose
            continue
        if arc.v == 0 or d > best_end + near_band:
            continue
        for nxt in graph.adj[arc.v]:
            if nxt.v == arc.v:
                continue
            sides = (0,) if nxt.run_cut < 0 else (1, -1)
            for s2 in sides:
                if not _passage_ok(arc, s, nxt, s2):
                    continue
                nid = state_id[(nxt.u, nxt.v, nxt.run_cut, s2)]
                nd = d + nxt.length
                if nd < distv[nid] - tie_eps:
                    distv[nid] = nd
                    preds[nid] = [sid]
                    loose[nid] = [sid]
                    heapq.heappush(heap, (nd, nid))
                else:
                    if nd <= distv[nid] + tie_eps and sid not in preds[nid]:
                        preds[nid].append(sid)
                    if nd <= distv[nid] + near_band and sid not in loose[nid]:
                        loose[nid].append(sid)
    return best_end, states, state_id, distv, preds, loose


def geodesic_distance(spec: KirigamiSpec, cx: Optional[SlitComplex] = None,
                      eps: float = EPS, tol: float = EPS_LEN) -> float:
    """Distance only, with an early-exit search.  math.inf when separated."""
    if cx is None:
        cx = SlitComplex(spec)
    graph = _Graph(spec, cx, eps, tol)
    best, *_ = _run_search(graph, 1e-12, 0.0, stop_early=True)
    return best


def _enumerate(states, state_id, distv, preds, best, band, cap):
    """All state paths from p to q with total length within band of best."""
    ends = [state_id[k] for k in state_id
            if k[1] == 1 and distv[state_id[k]] <= best + band]
    out = []
    stack = [(sid, [sid]) for sid in ends]
    while stack:
        sid, tail = stack.pop()
        arc, _ = states[sid]
        if arc.u == 0:
            out.append(list(reversed(tail)))
            if len(out) > cap:
                raise KirigamiError(
                    f"more than {cap} co-optimal geodesics; aborting")
            continue
        for pid in preds[sid]:
            if distv[pid] + arc.length <= distv[sid] + band + 1e-15:
                stack.append((pid, tail + [pid]))
    return out


def all_geodesics(spec: KirigamiSpec, cx: Optional[SlitComplex] = None,
                  eps: float = EPS, tol: float = EPS_LEN,
                  tie_eps: float = 1e-9, cap: int = ENUM_CAP) -> GeodesicSet:
    """Distance and the complete set of geodesics from p to q.

    Co-optimality uses ``tie_eps``; additional near-ties within ``tol``
    (the length-comparison tolerance) do not join the set but raise the
    ``tie_flagged`` bit, signalling that the input sits near a transition.
    """
    if cx is None:
        cx = SlitComplex(spec)
    graph = _Graph(spec, cx, eps, tol)
    best, states, state_id, distv, preds, loose = _run_search(
        graph, tie_eps, tol, stop_early=False)
    if not math.isfinite(best):
        raise NoPathError("p and q are separated by the cuts")
    tight_paths = _enumerate(states, state_id, distv, preds, best, tie_eps, cap)

    curves: dict[tuple, dict] = {}
    for path in tight_paths:
        nodes = [0] + [states[sid][0].v for sid in path]
        sides = []
        runs = []
        for sid in path:
            arc, s = states[sid]
            if arc.run_cut < 0:
                sides.append(0)
            else:
                i, j = graph.spec.edges[arc.run_cut]
                forward = graph.vertex_of[arc.u] == i
                sides.append(s if forward else -s)
            runs.append(arc.run_cut)
        key = tuple(nodes)
        rec = curves.setdefault(key, {"runs": tuple(runs), "sides": set()})
        rec["sides"].add(tuple(sides))

    geods = []
    for key in sorted(curves, key=lambda k: tuple(
            (graph.points[n].x, graph.points[n].y) for n in k)):
        rec = curves[key]
        pts = tuple(graph.points[n] for n in key)
        vids = tuple(graph.vertex_of[n] for n in key)
        interior = vids[1:-1]
        if len(set(interior)) != len(interior):
            raise ConstructionError("geodesic repeats an interior vertex")
        geods.append(GeodesicPolygonal(
            points=pts,
            node_vertices=vids,
            length=polyline_length(pts),
            edge_runs=rec["runs"],
            side_options=tuple(sorted(rec["sides"])),
        ))

    flag = False
    try:
        wide = _enumerate(states, state_id, distv, loose, best, tol, cap)
        wide_keys = {tuple([0] + [states[sid][0].v for sid in p]) for p in wide}
        flag = len(wide_keys) > len(curves)
    except KirigamiError:
        flag = True
    return GeodesicSet(distance=best, geodesics=tuple(geods), tie_flagged=flag)


# ---------------------------------------------------------------------------
# Independent brute-force oracle.
#
# Deliberately shares no machinery with the search above: plain nested
# loops, its own crossing test and an approximator-style sector test using
# numerically perturbed ray angles.  Used to cross-validate distances.

def _bf_cross(a, b, c, d, eps=1e-9):
    def cr(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    d1, d2 = cr(a, b, c), cr(a, b, d)
    d3, d4 = cr(c, d, a), cr(c, d, b)
    band = eps * max(1.0, math.dist(a, b) * math.dist(c, d))
    z1 = 0 if abs(d1) <= band else (1 if d1 > 0 else -1)
    z2 = 0 if abs(d2) <= band else (1 if d2 > 0 else -1)
    z3 = 0 if abs(d3) <= band else (1 if d3 > 0 else -1)
    z4 = 0 if abs(d4) <= band else (1 if d4 > 0 else -1)
    return z1, z2, z3, z4


def _bf_point_on(p, a, b, tol):
    ax, ay = b[0] - a[0], b[1] - a[1]
    ln2 = ax * ax + ay * ay
    if ln2 == 0:
        return math.dist(p, a) <= tol, 0.0
    t = ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / ln2
    tc = min(1.0, max(0.0, t))
    foot = (a[0] + tc * ax, a[1] + tc * ay)
    return math.dist(p, foot) <= tol, t


def _bf_edge_ok(spec, a, b, tol=EPS_LEN):
    """FREE/RUN/BLOCKED verdict, written independently of classify_edge."""
    for pt in spec.vertices:
        onseg, t = _bf_point_on(pt, a, b, tol)
        if onseg and math.dist(pt, a) > tol and math.dist(pt, b) > tol:
            return BLOCKED, -1
    run = -1
    for e, (i, j) in enumerate(spec.edges):
        c = spec.vertices[i]
        d = spec.vertices[j]
        if ((math.dist(a, c) <= tol and math.dist(b, d) <= tol)
                or (math.dist(a, d) <= tol and math.dist(b, c) <= tol)):
            run = e
            continue
        z1, z2, z3, z4 = _bf_cross(tuple(a), tuple(b), tuple(c), tuple(d))
        if z1 * z2 < 0 and z3 * z4 < 0:
            return BLOCKED, -1
        if z1 == 0 and z2 == 0:
            _, tc = _bf_point_on(c, a, b, tol)
            _, td = _bf_point_on(d, a, b, tol)
            lo, hi = min(tc, td), max(tc, td)
            if (min(hi, 1.0) - max(lo, 0.0)) * math.dist(a, b) > tol:
                return BLOCKED, -1
    return (RUN, run) if run >= 0 else (FREE, -1)


def _bf_walls(spec, pt, tol=1e-7):
    """Boundary directions and interior half-plane normals at a point.

    Empty lists for interior points.  Half-planes are given as unit edge
    directions oriented so the domain interior is on the left.
    """
    dom = spec.domain
    n = len(dom)
    area2 = 0.0
    for k in range(n):
        a, b = dom[k], dom[(k + 1) % n]
        area2 += a[0] * b[1] - b[0] * a[1]
    sgn = 1.0 if area2 > 0 else -1.0
    dirs, edges = [], []
    for k in range(n):
        a, b = dom[k], dom[(k + 1) % n]
        on, _ = _bf_point_on(pt, a, b, tol)
        if not on:
            continue
        ex, ey = b[0] - a[0], b[1] - a[1]
        ln = math.hypot(ex, ey)
        edges.append((sgn * ex / ln, sgn * ey / ln))
        if math.dist(pt, a) > tol:
            dirs.append(math.atan2(a[1] - pt[1], a[0] - pt[0]))
        if math.dist(pt, b) > tol:
            dirs.append(math.atan2(b[1] - pt[1], b[0] - pt[0]))
    return dirs, edges


def _bf_sector_walk(spec, seq_vids, pts, runs):
    """Admissibility of the whole sequence via perturbed-angle sectors."""
    delta = 1e-7
    run_positions = [k for k, r in enumerate(runs) if r >= 0]
    for assignment in itertools.product((1, -1), repeat=len(run_positions)):
        side = {k: s for k, s in zip(run_positions, assignment)}
        feasible = True
        for i in range(1, len(pts) - 1):
            vid = seq_vids[i]
            cut_dirs = sorted(
                math.atan2(spec.vertices[w].y - pts[i].y,
                           spec.vertices[w].x - pts[i].x)
                for w in spec.neighbors(vid))
            wdirs, wedges = _bf_walls(spec, pts[i])
            dirs = sorted(cut_dirs + [
                w for w in wdirs
                if all(min(abs(w - c) % (2 * math.pi),
                           2 * math.pi - abs(w - c) % (2 * math.pi)) > 1e-9
                       for c in cut_dirs)])
            if len(dirs) <= 1 and not wedges:
                continue
            ain = math.atan2(pts[i - 1].y - pts[i].y, pts[i - 1].x - pts[i].x)
            aout = math.atan2(pts[i + 1].y - pts[i].y, pts[i + 1].x - pts[i].x)
            if runs[i - 1] >= 0:
                ain -= side[i - 1] * delta
            if runs[i] >= 0:
                aout += side[i] * delta
            # both rays must fall in the same gap of the sorted directions
            def gap(theta):
                for k, lo in enumerate(dirs):
                    hi = dirs[(k + 1) % len(dirs)]
                    span = (hi - lo) % (2 * math.pi) or 2 * math.pi
                    off = (theta - lo) % (2 * math.pi)
                    if 0.0 <= off < span:
                        return k, lo, span
                return len(dirs) - 1, dirs[-1], 2 * math.pi
            gin, lo, span = gap(ain)
            gout, _, _ = gap(aout)
            if gin != gout:
                feasible = False
                break
            if wedges:
                # the shared gap must open toward the domain interior
                probe = lo + 0.5 * span
                dx, dy = math.cos(probe), math.sin(probe)
                if any(ex * dy - ey * dx < -1e-9 for ex, ey in wedges):
                    feasible = False
                    break
        if feasible:
            return True
    return False


def brute_force_distance(spec: KirigamiSpec, max_edges: Optional[int] = None,
                         budget: int = 2_000_000) -> float:
    """Exhaustive minimum over admissible vertex sequences.

    A simple branch-and-bound depth-first search over all sequences of
    distinct cut vertices (up to ``max_edges`` path edges); serves as an
    oracle for all_geodesics on small inputs.
    """
    nv = len(spec.vertices)
    if max_edges is None:
        max_edges = nv + 1
    if nv > 12:
        raise KirigamiError("brute force oracle limited to 12 vertices")
    best = math.inf
    counter = [0]

    kind, _ = _bf_edge_ok(spec, spec.p, spec.q)
    if kind != BLOCKED:
        best = dist(spec.p, spec.q)

    order = sorted(range(nv),
                   key=lambda v: dist(spec.p, spec.vertices[v]))

    def rec(seq_vids, pts, runs, acc):
        nonlocal best
        counter[0] += 1
        if counter[0] > budget:
            raise KirigamiError("brute force budget exceeded")
        if len(pts) - 1 >= max_edges:
            return
        for v in order:
            if v in seq_vids:
                continue
            pv = spec.vertices[v]
            lower = acc + dist(pts[-1], pv) + dist(pv, spec.q)
            if lower >= best - 1e-12:
                continue
            kind, run = _bf_edge_ok(spec, pts[-1], pv)
            if kind == BLOCKED:
                continue
            kq, runq = _bf_edge_ok(spec, pv, spec.q)
            nseq = seq_vids + [v]
            npts = pts + [pv]
            nruns = runs + [run]
            if kq != BLOCKED:
                total = acc + dist(pts[-1], pv) + dist(pv, spec.q)
                if total < best - 1e-12:
                    if _bf_sector_walk(spec, [TERMINAL] + nseq + [TERMINAL],
                                       npts + [spec.q], nruns + [runq]):
                        best = total
            rec(nseq, npts, nruns, acc + dist(pts[-1], pv))

    rec([], [spec.p], [], 0.0)
    return best


# ---------------------------------------------------------------------------
# Shortening of arbitrary admissible polylines

def shorten(path: Sequence[Point], spec: KirigamiSpec,
            eps: float = EPS, tol: float = EPS_LEN) -> GeodesicPolygonal:
    """Pull a polyline from p to q taut into a locally shortest polygonal.

    Rounds of local replacements: dropped zero turns, removed loops, and
    bend-by-bend replacement with the shortest admissible detour through
    the cut vertices near the bend.  Length never increases; the number of
    rounds is capped by (initial length + 1) / (shortest cut edge), after
    which a failure to stabilize is reported as an error.
    """
    pts = [Point(*p) for p in path]
    if len(pts) < 2:
        raise ValueError("path needs at least two points")
    if not same_point(pts[0], spec.p, tol) or not same_point(pts[-1], spec.q, tol):
        raise ValueError("path must start at p and end at q")
    for k in range(len(pts) - 1):
        if same_point(pts[k], pts[k + 1], tol):
            continue
        kind, _ = classify_edge(spec, pts[k], pts[k + 1], eps, tol)
        if kind == BLOCKED:
            # may be a composite edge through a vertex: split and recheck
            mids = [v for v in range(len(spec.vertices))
                    if on_segment(spec.vertices[v], pts[k], pts[k + 1], tol)
                    and dist(spec.vertices[v], pts[k]) > tol
                    and dist(spec.vertices[v], pts[k + 1]) > tol]
            if not mids:
                raise KirigamiError("input path touches a cut interior")

    # snap points lying on cut vertices to them exactly
    def snap(p: Point) -> Point:
        for v in spec.vertices:
            if same_point(p, v, tol):
                return v
        return p

    pts = [snap(p) for p in pts]
    min_gap = min((spec.cut_length(e) for e in range(len(spec.edges))),
                  default=1.0)
    cap = int(math.ceil((polyline_length(pts) + 1.0) / min_gap)) + 8

    cx = SlitComplex(spec)

    def junction_ok(a: Point, b: Point, c: Point) -> bool:
        vid = next((k for k, v in enumerate(spec.vertices)
                    if same_point(b, v, tol)), None)
        if vid is None:
            return True
        si = cx.free_sector_ids(vid, angle_of(sub(a, b)))
        so = cx.free_sector_ids(vid, angle_of(sub(c, b)))
        return not si.isdisjoint(so)

    for _ in range(cap):
        changed = False
        # drop duplicates and straight-through points
        cleaned = [pts[0]]
        for k in range(1, len(pts) - 1):
            if same_point(cleaned[-1], pts[k], tol):
                changed = True
                continue
            cleaned.append(pts[k])
        cleaned.append(pts[-1])
        pts = cleaned
        # remove loops at repeated locations
        k = 1
        while k < len(pts) - 1:
            for j in range(len(pts) - 2, k, -1):
                if same_point(pts[k], pts[j], tol):
                    del pts[k + 1:j + 1]
                    changed = True
                    break
            k += 1
        # bend replacements
        k = 1
        while k < len(pts) - 1:
            a, b, c = pts[k - 1], pts[k], pts[k + 1]
            repl = _best_local_path(spec, a, b, c, eps, tol)
            if repl is not None and (polyline_length(repl)
                                     < polyline_length([a, b, c]) - 1e-12):
                # check passage at the new interior points and at the two
                # seams, whose neighbor segments just changed
                win = list(repl)
                if k - 2 >= 0:
                    win.insert(0, pts[k - 2])
                if k + 2 < len(pts):
                    win.append(pts[k + 2])
                if all(junction_ok(win[i - 1], win[i], win[i + 1])
                       for i in range(1, len(win) - 1)):
                    pts[k - 1:k + 2] = repl
                    changed = True
                    k += max(len(repl) - 2, 1)
                    continue
            k += 1
        if not changed:
            break
    else:
        raise ConstructionError("shortening failed to stabilize")

    # straight-through interior points that are not cut vertices drop out
    out = [pts[0]]
    for k in range(1, len(pts) - 1):
        is_vertex = any(same_point(pts[k], v, tol) for v in spec.vertices)
        if not is_vertex and orient(pts[k - 1], pts[k], pts[k + 1], eps) == 0:
            continue
        out.append(pts[k])
    out.append(pts[-1])
    vids = []
    for k, p in enumerate(out):
        vid = next((i for i, v in enumerate(spec.vertices)
                    if same_point(p, v, tol)), TERMINAL)
        if vid == TERMINAL and 0 < k < len(out) - 1:
            raise ConstructionError(
                "shortening left a bend away from every cut vertex")
        if vid != TERMINAL and 0 < k < len(out) - 1:
            if not junction_ok(out[k - 1], p, out[k + 1]):
                raise ConstructionError(
                    "shortened path passes a vertex between blocked sectors")
        vids.append(vid)
    runs = []
    for k in range(len(out) - 1):
        kind, run = classify_edge(spec, out[k], out[k + 1], eps, tol)
        if kind == BLOCKED:
            raise ConstructionError("shortened path has an inadmissible edge")
        runs.append(run)
    return GeodesicPolygonal(
        points=tuple(out),
        node_vertices=tuple(vids),
        length=polyline_length(out),
        edge_runs=tuple(runs),
        side_options=((0,) * (len(out) - 1),),
    )


def _best_local_path(spec, a, b, c, eps, tol):
    """Shortest admissible detour from a to c near the bend at b."""
    cand = [v for v in spec.vertices
            if _in_triangle(v, a, b, c, tol) and not same_point(v, b, tol)]
    nodes = [a, c, b, *cand]
    n = len(nodes)
    adj = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if same_point(nodes[i], nodes[j], tol):
                continue
            kind, _ = classify_edge(spec, nodes[i], nodes[j], eps, tol)
            if kind != BLOCKED:
                w = dist(nodes[i], nodes[j])
                adj[i].append((j, w))
                adj[j].append((i, w))
    distv = [math.inf] * n
    prev = [-1] * n
    distv[0] = 0.0
    heap = [(0.0, 0)]
    while heap:
        d, i = heapq.heappop(heap)
        if d > distv[i] + 1e-15:
            continue
        if i == 1:
            break
        for j, w in adj[i]:
            if d + w < distv[j] - 1e-15:
                distv[j] = d + w
                prev[j] = i
                heapq.heappush(heap, (d + w, j))
    if not math.isfinite(distv[1]):
        return None
    seq = [1]
    while seq[-1] != 0:
        seq.append(prev[seq[-1]])
    return [nodes[i] for i in reversed(seq)]


def _in_triangle(p, a, b, c, tol):
    big = [a, b, c]
    o = orient(a, b, c)
    if o == 0:
        return on_segment(p, a, c, tol) or on_segment(p, a, b, tol)
    if o < 0:
        big = [a, c, b]
    return all(orient(big[i], big[(i + 1) % 3], p) >= 0 for i in range(3))
