"""Planar geometry kernel.

Everything downstream (visibility, sealing, folding) is built on the small
set of predicates and constructions in this module.  All tolerant
comparisons funnel through two knobs: ``EPS`` for dimensionless tests
(orientation sign, parallelism) and ``EPS_LEN`` for tests carrying units
of length (point identity, endpoint slack).  Callers that normalize their
input to unit scale can treat both as absolute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

EPS = 1e-9
EPS_LEN = 1e-7


class Point(NamedTuple):
    x: float
    y: float


Polygon = Sequence[Point]


def sub(a: Point, b: Point) -> Point:
    return Point(a.x - b.x, a.y - b.y)


def add(a: Point, b: Point) -> Point:
    return Point(a.x + b.x, a.y + b.y)


def scale(a: Point, k: float) -> Point:
    return Point(a.x * k, a.y * k)


def dot(a: Point, b: Point) -> float:
    return a.x * b.x + a.y * b.y


def cross(a: Point, b: Point) -> float:
    return a.x * b.y - a.y * b.x


def norm(a: Point) -> float:
    return math.hypot(a.x, a.y)


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def unit(a: Point) -> Point:
    n = norm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return Point(a.x / n, a.y / n)


def perp(a: Point) -> Point:
    """Counterclockwise quarter turn."""
    return Point(-a.y, a.x)


def lerp(a: Point, b: Point, t: float) -> Point:
    return Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def same_point(a: Point, b: Point, tol: float = EPS_LEN) -> bool:
    return dist(a, b) <= tol


def angle_of(a: Point) -> float:
    return math.atan2(a.y, a.x)


def orient(a: Point, b: Point, c: Point, eps: float = EPS) -> int:
    """Sign of the turn a->b->c: +1 left, -1 right, 0 within the collinear band.

    The zero band scales with the product of the arm lengths so the verdict
    does not change under uniform rescaling of the input.
    """
    u = sub(b, a)
    v = sub(c, a)
    d = cross(u, v)
    band = eps * max(norm(u) * norm(v), 1.0)
    if abs(d) <= band:
        return 0
    return 1 if d > 0.0 else -1


def project_t(p: Point, a: Point, b: Point) -> float:
    """Parameter of the foot of p on the line through a, b (a is 0, b is 1)."""
    ab = sub(b, a)
    den = dot(ab, ab)
    if den == 0.0:
        raise ValueError("degenerate line")
    return dot(sub(p, a), ab) / den


def point_seg_dist(p: Point, a: Point, b: Point) -> float:
    if same_point(a, b, 0.0):
        return dist(p, a)
    t = min(1.0, max(0.0, project_t(p, a, b)))
    return dist(p, lerp(a, b, t))


def on_segment(p: Point, a: Point, b: Point, tol: float = EPS_LEN) -> bool:
    return point_seg_dist(p, a, b) <= tol


def reflect(p: Point, a: Point, b: Point) -> Point:
    """Mirror image of p across the line through a and b."""
    d = unit(sub(b, a))
    w = sub(p, a)
    along = dot(w, d)
    off = cross(d, w)
    return Point(
        a.x + along * d.x + off * d.y,
        a.y + along * d.y - off * d.x,
    )


@dataclass(frozen=True)
class SegHit:
    """Outcome of a segment pair intersection test.

    kind is one of "empty", "point", "overlap".  For "point", ``point`` is
    the location and ``t``/``u`` are parameters along the first and second
    segment.  For "overlap", ``seg`` is the shared collinear piece and the
    parameters are those of its midpoint.
    """

    kind: str
    point: Optional[Point] = None
    t: float = math.nan
    u: float = math.nan
    seg: Optional[tuple[Point, Point]] = None


_EMPTY = SegHit("empty")


def seg_intersect(a: Point, b: Point, c: Point, d: Point,
                  eps: float = EPS, tol: float = EPS_LEN) -> SegHit:
    """Intersect closed segments ab and cd.

    Endpoint slack of ``tol`` (a length) is granted on both segments, so
    touches within tol of an end still register as hits with parameters
    clamped to [0, 1].
    """
    r = sub(b, a)
    s = sub(d, c)
    lr = norm(r)
    ls = norm(s)
    if lr <= tol or ls <= tol:
        raise ValueError("degenerate segment in intersection test")
    denom = cross(r, s)
    if abs(denom) <= eps * lr * ls:
        # Parallel.  Either collinear with a shared stretch or disjoint.
        if orient(a, b, c, eps) != 0 or orient(a, b, d, eps) != 0:
            return _EMPTY
        tc = project_t(c, a, b)
        td = project_t(d, a, b)
        lo, hi = min(tc, td), max(tc, td)
        lo = max(lo, 0.0)
        hi = min(hi, 1.0)
        slack = tol / lr
        if hi < lo - slack:
            return _EMPTY
        if hi - lo <= slack:
            tm = min(1.0, max(0.0, 0.5 * (lo + hi)))
            p = lerp(a, b, tm)
            return SegHit("point", point=p, t=tm, u=_param_on(p, c, d))
        pa = lerp(a, b, lo)
        pb = lerp(a, b, hi)
        tm = 0.5 * (lo + hi)
        pm = lerp(a, b, tm)
        return SegHit("overlap", point=pm, t=tm, u=_param_on(pm, c, d),
                      seg=(pa, pb))
    qp = sub(c, a)
    t = cross(qp, s) / denom
    u = cross(qp, r) / denom
    st = tol / lr
    su = tol / ls
    if -st <= t <= 1.0 + st and -su <= u <= 1.0 + su:
        t = min(1.0, max(0.0, t))
        u = min(1.0, max(0.0, u))
        return SegHit("point", point=lerp(a, b, t), t=t, u=u)
    return _EMPTY


def _param_on(p: Point, a: Point, b: Point) -> float:
    return min(1.0, max(0.0, project_t(p, a, b)))


def polygon_area(poly: Polygon) -> float:
    """Signed area, positive for counterclockwise boundaries."""
    s = 0.0
    n = len(poly)
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        s += a.x * b.y - b.x * a.y
    return 0.5 * s


def polygon_perimeter(poly: Polygon) -> float:
    return sum(dist(poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly)))


def polyline_length(pts: Sequence[Point]) -> float:
    return sum(dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))


def is_convex_ccw(poly: Polygon, eps: float = EPS) -> bool:
    """Strict test used on input domains: counterclockwise and convex.

    Collinear triples are tolerated (they just add redundant boundary
    vertices); any right turn fails.
    """
    n = len(poly)
    if n < 3:
        return False
    turned = False
    for i in range(n):
        o = orient(poly[i], poly[(i + 1) % n], poly[(i + 2) % n], eps)
        if o < 0:
            return False
        if o > 0:
            turned = True
    return turned


def convex_contains(poly: Polygon, p: Point, eps: float = EPS,
                    tol: float = EPS_LEN) -> str:
    """Locate p relative to a convex CCW polygon: "inside"/"boundary"/"outside"."""
    n = len(poly)
    boundary = False
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        o = orient(a, b, p, eps)
        if o < 0:
            if point_seg_dist(p, a, b) <= tol:
                boundary = True
                continue
            return "outside"
        if o == 0:
            if on_segment(p, a, b, tol):
                boundary = True
            elif point_seg_dist(p, a, b) > tol and _strictly_right(a, b, p):
                return "outside"
    return "boundary" if boundary else "inside"


def _strictly_right(a: Point, b: Point, p: Point) -> bool:
    return cross(sub(b, a), sub(p, a)) < 0.0


def polygon_contains(poly: Polygon, p: Point, tol: float = EPS_LEN) -> str:
    """General even-odd point location for simple polygons."""
    n = len(poly)
    for i in range(n):
        if on_segment(p, poly[i], poly[(i + 1) % n], tol):
            return "boundary"
    inside = False
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            xcut = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if xcut > p.x:
                inside = not inside
    return "inside" if inside else "outside"


def clip_convex(poly: Polygon, a: Point, b: Point, side: int = 1,
                tol: float = EPS_LEN) -> list[Point]:
    """Clip a convex polygon to one side of the oriented line through a, b.

    side=+1 keeps the left half-plane, side=-1 the right.  Returns [] when
    the kept part is lower-dimensional (area below tol**0.5 scale).
    """
    d = sub(b, a)
    ln = norm(d)
    if ln == 0.0:
        raise ValueError("degenerate clip line")
    out: list[Point] = []
    n = len(poly)
    vals = [side * cross(d, sub(p, a)) / ln for p in poly]
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp >= -tol:
            out.append(p)
        if (vp > tol and vq < -tol) or (vp < -tol and vq > tol):
            t = vp / (vp - vq)
            out.append(lerp(p, q, t))
    out = dedupe_ring(out, tol)
    if len(out) < 3 or abs(polygon_area(out)) <= tol:
        return []
    return out


def dedupe_ring(pts: Sequence[Point], tol: float = EPS_LEN) -> list[Point]:
    """Drop consecutive (cyclically) duplicate points."""
    out: list[Point] = []
    for p in pts:
        if not out or not same_point(out[-1], p, tol):
            out.append(p)
    while len(out) > 1 and same_point(out[0], out[-1], tol):
        out.pop()
    return out


def strip_collinear(poly: Polygon, eps: float = EPS) -> list[Point]:
    """Remove vertices that sit on the straight line through their neighbours."""
    pts = dedupe_ring(list(poly))
    changed = True
    while changed and len(pts) > 3:
        changed = False
        for i in range(len(pts)):
            a = pts[i - 1]
            b = pts[i]
            c = pts[(i + 1) % len(pts)]
            if orient(a, b, c, eps) == 0 and dot(sub(a, b), sub(c, b)) < 0:
                pts.pop(i)
                changed = True
                break
    return pts


def triangulate(poly: Polygon, eps: float = EPS) -> list[tuple[Point, Point, Point]]:
    """Ear-clipping triangulation of a simple polygon (any orientation).

    Collinear vertices are tolerated.  Raises ValueError when no ear can be
    found, which for valid input only happens on self-intersecting rings.
    """
    pts = dedupe_ring(list(poly))
    if polygon_area(pts) < 0:
        pts.reverse()
    if len(pts) < 3:
        raise ValueError("triangulate needs at least 3 distinct vertices")
    tris: list[tuple[Point, Point, Point]] = []
    guard = 0
    limit = 4 * len(pts) * len(pts) + 64
    while len(pts) > 3:
        guard += 1
        if guard > limit:
            raise ValueError("no ear found; polygon is likely self-intersecting")
        n = len(pts)
        clipped = False
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            o = orient(a, b, c, eps)
            if o < 0:
                continue
            if o == 0:
                # Straight-through or spike vertex: drop it, no area lost.
                pts.pop(i)
                clipped = True
                break
            if _ear_clear(pts, i, a, b, c, eps):
                tris.append((a, b, c))
                pts.pop(i)
                clipped = True
                break
        if not clipped:
            raise ValueError("no ear found; polygon is likely self-intersecting")
    if orient(pts[0], pts[1], pts[2], eps) > 0:
        tris.append((pts[0], pts[1], pts[2]))
    return tris


def _ear_clear(pts: Sequence[Point], i: int, a: Point, b: Point, c: Point,
               eps: float) -> bool:
    n = len(pts)
    skip = {(i - 1) % n, i, (i + 1) % n}
    for j in range(n):
        if j in skip:
            continue
        p = pts[j]
        if (orient(a, b, p, eps) >= 0 and orient(b, c, p, eps) >= 0
                and orient(c, a, p, eps) >= 0):
            return False
    return True


def bbox(pts: Sequence[Point]) -> tuple[float, float, float, float]:
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return min(xs), min(ys), max(xs), max(ys)
