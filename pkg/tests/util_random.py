"""Seeded random spec generation for the oracle and sealing suites."""

import math
import random

from kirigami.geometry import Point, dist, point_seg_dist, seg_intersect
from kirigami.model import KirigamiSpec, validate

UNIT_SQUARE = (Point(0.0, 0.0), Point(1.0, 0.0), Point(1.0, 1.0),
               Point(0.0, 1.0))

MIN_CUT_LEN = 0.08
MIN_SEP = 0.03
MIN_VERTEX_GAP = 0.05
MARGIN = 0.06
MIN_ANGLE_GAP = 0.25


def _seg_seg_dist(a, b, c, d):
    hit = seg_intersect(a, b, c, d)
    if hit is not None and hit.kind != "none":
        return 0.0
    return min(point_seg_dist(a, c, d), point_seg_dist(b, c, d),
               point_seg_dist(c, a, b), point_seg_dist(d, a, b))


def _edge_clear(a, b, verts, edges, shared):
    """New cut [a,b] keeps its distance from everything except at `shared`."""
    for k, v in enumerate(verts):
        if k == shared:
            continue
        if point_seg_dist(v, a, b) < MIN_SEP:
            return False
    for i, j in edges:
        c, d = verts[i], verts[j]
        if shared in (i, j):
            far = d if i == shared else c
            if point_seg_dist(b, c, d) < MIN_SEP:
                return False
            if point_seg_dist(far, a, b) < MIN_SEP:
                return False
            root = verts[shared]
            ang = abs(math.atan2(b.y - root.y, b.x - root.x)
                      - math.atan2(far.y - root.y, far.x - root.x))
            ang = min(ang, 2 * math.pi - ang)
            if ang < MIN_ANGLE_GAP:
                return False
        elif _seg_seg_dist(a, b, c, d) < MIN_SEP:
            return False
    return True


def _rand_interior(rng):
    return Point(rng.uniform(MARGIN, 1 - MARGIN),
                 rng.uniform(MARGIN, 1 - MARGIN))


def random_spec(rng: random.Random, max_vertices: int = 8, max_cuts: int = 5,
                boundary_pq: bool = False) -> KirigamiSpec:
    """One valid spec in the unit square; retries internally until clean."""
    while True:
        spec = _try_build(rng, max_vertices, max_cuts, boundary_pq)
        if spec is None:
            continue
        if not validate(spec).errors:
            return spec


def _try_build(rng, max_vertices, max_cuts, boundary_pq):
    n_cuts = rng.randint(1, max_cuts)
    verts: list[Point] = []
    edges: list[tuple[int, int]] = []
    for _ in range(n_cuts):
        if len(verts) + 1 > max_vertices:
            break
        for _attempt in range(40):
            extend = verts and rng.random() < 0.55
            if extend:
                root = rng.randrange(len(verts))
                a = verts[root]
            else:
                if len(verts) + 2 > max_vertices:
                    continue
                a = _rand_interior(rng)
                if any(dist(a, v) < MIN_VERTEX_GAP for v in verts):
                    continue
                root = None
            ang = rng.uniform(0, 2 * math.pi)
            ln = rng.uniform(MIN_CUT_LEN, 0.45)
            b = Point(a.x + ln * math.cos(ang), a.y + ln * math.sin(ang))
            if not (MARGIN < b.x < 1 - MARGIN and MARGIN < b.y < 1 - MARGIN):
                continue
            if any(dist(b, v) < MIN_VERTEX_GAP for v in verts):
                continue
            if root is None:
                verts.extend([a, b])
                ia, ib = len(verts) - 2, len(verts) - 1
                if not _edge_clear(a, b, verts[:-2], edges, None):
                    verts.pop()
                    verts.pop()
                    continue
                edges.append((ia, ib))
            else:
                if not _edge_clear(a, b, verts, edges, root):
                    continue
                verts.append(b)
                edges.append((root, len(verts) - 1))
            break
    if not edges:
        return None

    def clear_of_cuts(pt):
        return all(point_seg_dist(pt, verts[i], verts[j]) > MIN_SEP
                   for i, j in edges)

    for _ in range(60):
        if boundary_pq:
            p = _boundary_point(rng)
            q = _boundary_point(rng)
        else:
            p = Point(rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99))
            q = Point(rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99))
        if dist(p, q) < 0.3:
            continue
        if clear_of_cuts(p) and clear_of_cuts(q) and \
                all(dist(p, v) > MIN_SEP and dist(q, v) > MIN_SEP
                    for v in verts):
            return KirigamiSpec(domain=UNIT_SQUARE, vertices=tuple(verts),
                                edges=tuple(edges), p=p, q=q)
    return None


def _boundary_point(rng):
    t = rng.uniform(0, 4)
    k = int(t)
    f = t - k
    a = UNIT_SQUARE[k]
    b = UNIT_SQUARE[(k + 1) % 4]
    return Point(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
