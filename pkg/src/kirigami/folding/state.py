"""Fold states: piecewise rigid motions on a convex-face decomposition.

A piece of the sheet is tracked as a set of convex faces, each carrying the
rigid motion that places it in the plane.  A simple fold is a reflection
across a line in the *image*: the line is pulled back through every face's
motion, faces are split along the pulled-back chords, and the connected
component of material on the moving side of the crease (grown from a seed
point, never across the crease itself) is reflected.  Everything else stays
put, so continuity along untouched shared edges is preserved by
construction.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Optional, Sequence

from ..errors import ConstructionError
from ..geometry import (Point, add, cross, dedupe_ring, dist, dot, lerp,
                        norm, polygon_area, sub, triangulate, unit)

SPLIT_TOL = 1e-9
HINGE_TOL = 1e-9
PART_TOL = 1e-12


class Motion:
    """Orthogonal 2x2 matrix plus translation."""

    __slots__ = ("a", "b", "c", "d", "tx", "ty")

    def __init__(self, a: float, b: float, c: float, d: float,
                 tx: float, ty: float) -> None:
        self.a = a
        self.b = b
        self.c = c
        self.d = d
        self.tx = tx
        self.ty = ty

    @staticmethod
    def identity() -> "Motion":
        return Motion(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    @staticmethod
    def reflection(pt: Point, direction: Point) -> "Motion":
        """Reflection across the line through pt with the given direction."""
        d = unit(direction)
        a = d.x * d.x - d.y * d.y
        b = 2.0 * d.x * d.y
        tx = pt.x - (a * pt.x + b * pt.y)
        ty = pt.y - (b * pt.x - a * pt.y)
        return Motion(a, b, b, -a, tx, ty)

    @staticmethod
    def rigid_map(src_pt: Point, src_dir: Point,
                  dst_pt: Point, dst_dir: Point) -> "Motion":
        """Rotation plus translation taking one anchored ray onto another."""
        u = unit(src_dir)
        v = unit(dst_dir)
        co = dot(u, v)
        si = cross(u, v)
        tx = dst_pt.x - (co * src_pt.x - si * src_pt.y)
        ty = dst_pt.y - (si * src_pt.x + co * src_pt.y)
        return Motion(co, -si, si, co, tx, ty)

    def apply(self, p: Point) -> Point:
        return Point(self.a * p.x + self.b * p.y + self.tx,
                     self.c * p.x + self.d * p.y + self.ty)

    def apply_vec(self, v: Point) -> Point:
        return Point(self.a * v.x + self.b * v.y,
                     self.c * v.x + self.d * v.y)

    def compose(self, other: "Motion") -> "Motion":
        """self after other: (self.compose(other))(x) == self(other(x))."""
        return Motion(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.a * other.tx + self.b * other.ty + self.tx,
            self.c * other.tx + self.d * other.ty + self.ty,
        )

    def inverse(self) -> "Motion":
        # Orthogonal: the inverse of the linear part is its transpose.
        return Motion(self.a, self.c, self.b, self.d,
                      -(self.a * self.tx + self.c * self.ty),
                      -(self.b * self.tx + self.d * self.ty))

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def orthogonality_defect(self) -> float:
        """Max absolute entry of Q^T Q - I."""
        e00 = self.a * self.a + self.c * self.c - 1.0
        e01 = self.a * self.b + self.c * self.d
        e11 = self.b * self.b + self.d * self.d - 1.0
        return max(abs(e00), abs(e01), abs(e11))


def split_convex_exact(poly: Sequence[Point], lpt: Point, ldir: Point,
                       tol: float = SPLIT_TOL):
    """Partition a convex polygon by a line without losing any area.

    Returns (neg, pos, chord): the parts on either side of the oriented line
    (pos is the left side) and the chord of on-line points; a part is None
    when the polygon does not extend to that side.
    """
    d = unit(ldir)
    vals = [cross(d, sub(p, lpt)) for p in poly]
    if all(v >= -tol for v in vals):
        return None, list(poly), None
    if all(v <= tol for v in vals):
        return list(poly), None, None
    pos: list[Point] = []
    neg: list[Point] = []
    online: list[Point] = []
    n = len(poly)
    for i in range(n):
        p, vp = poly[i], vals[i]
        q, vq = poly[(i + 1) % n], vals[(i + 1) % n]
        if vp >= -tol:
            pos.append(p)
        if vp <= tol:
            neg.append(p)
        if abs(vp) <= tol:
            online.append(p)
        if (vp > tol and vq < -tol) or (vp < -tol and vq > tol):
            x = lerp(p, q, vp / (vp - vq))
            pos.append(x)
            neg.append(x)
            online.append(x)
    pos = dedupe_ring(pos, PART_TOL)
    neg = dedupe_ring(neg, PART_TOL)
    if len(pos) < 3 or abs(polygon_area(pos)) <= PART_TOL:
        return list(poly), None, None
    if len(neg) < 3 or abs(polygon_area(neg)) <= PART_TOL:
        return None, list(poly), None
    online.sort(key=lambda p: dot(d, p))
    chord = (online[0], online[-1]) if len(online) >= 2 else None
    return neg, pos, chord


class FoldedState:
    """Mutable fold state of one connected, cut-free piece of the sheet."""

    def __init__(self, ring: Sequence[Point]) -> None:
        pts = dedupe_ring(list(ring))
        area = polygon_area(pts)
        if area < 0:
            pts.reverse()
            area = -area
        self.initial_area = area
        self.polys: list[list[Point]] = []
        self.motions: list[Motion] = []
        self.alive: list[bool] = []
        for tri in triangulate(pts):
            self.polys.append(list(tri))
            self.motions.append(Motion.identity())
            self.alive.append(True)
        # records of shared edges: (face, face, end, end)
        self.records: list[tuple[int, int, Point, Point]] = []
        edge_map: dict[tuple, tuple[int, Point, Point]] = {}
        for i, poly in enumerate(self.polys):
            for k in range(len(poly)):
                p, q = poly[k], poly[(k + 1) % len(poly)]
                key = tuple(sorted([(p.x, p.y), (q.x, q.y)]))
                if key in edge_map:
                    j, a, b = edge_map.pop(key)
                    self.records.append((i, j, a, b))
                else:
                    edge_map[key] = (i, p, q)
        self.creases: list[tuple[Point, Point]] = []
        self.fold_count = 0

    def faces(self) -> Iterable[int]:
        return (i for i in range(len(self.polys)) if self.alive[i])

    def face_image(self, i: int) -> list[Point]:
        m = self.motions[i]
        return [m.apply(p) for p in self.polys[i]]

    def total_area(self) -> float:
        return sum(abs(polygon_area(self.polys[i])) for i in self.faces())

    def rigid(self, motion: Motion) -> None:
        for i in self.faces():
            self.motions[i] = motion.compose(self.motions[i])

    def locate(self, p: Point, tol: float = SPLIT_TOL) -> list[int]:
        out = []
        for i in self.faces():
            if _convex_has(self.polys[i], p, tol):
                out.append(i)
        return out

    def map_point(self, p: Point) -> list[Point]:
        return [self.motions[i].apply(p) for i in self.locate(p)]

    def fold(self, cpt: Point, cdir: Point, seed_pt: Point) -> int:
        """Reflect the seed's component on its side of the crease line.

        The crease is given in image coordinates; the seed point in domain
        coordinates.  Returns the number of faces that moved.
        """
        cdir = unit(cdir)
        parts: dict[int, list[int]] = {}
        chords: dict[int, tuple[Point, Point]] = {}
        for i in list(self.faces()):
            minv = self.motions[i].inverse()
            lpt = minv.apply(cpt)
            ldir = minv.apply_vec(cdir)
            neg, pos, chord = split_convex_exact(self.polys[i], lpt, ldir)
            if neg is None or pos is None:
                parts[i] = [i]
                continue
            self.alive[i] = False
            kids = []
            for part in (neg, pos):
                self.polys.append(part)
                self.motions.append(self.motions[i])
                self.alive.append(True)
                kids.append(len(self.polys) - 1)
            parts[i] = kids
            if chord is not None:
                chords[i] = chord
        new_records: list[tuple[int, int, Point, Point]] = []
        for i, kids in parts.items():
            if len(kids) == 2 and i in chords:
                new_records.append((kids[0], kids[1], *chords[i]))
        for i, j, a, b in self.records:
            ki = parts.get(i, [i] if self.alive[i] else [])
            kj = parts.get(j, [j] if self.alive[j] else [])
            ab = dist(a, b)
            if ab <= PART_TOL:
                continue
            for ci in ki:
                ivi = _online_interval(self.polys[ci], a, b)
                if ivi is None:
                    continue
                for cj in kj:
                    ivj = _online_interval(self.polys[cj], a, b)
                    if ivj is None:
                        continue
                    lo = max(ivi[0], ivj[0], 0.0)
                    hi = min(ivi[1], ivj[1], 1.0)
                    if (hi - lo) * ab > SPLIT_TOL:
                        new_records.append((ci, cj, lerp(a, b, lo),
                                            lerp(a, b, hi)))
        self.records = new_records
        seed_faces = self.locate(seed_pt)
        if not seed_faces:
            raise ConstructionError("fold seed lies outside the piece")
        seed_face = None
        seed_val = 0.0
        for f in seed_faces:
            v = cross(cdir, sub(self.motions[f].apply(seed_pt), cpt))
            if abs(v) > abs(seed_val):
                seed_val = v
                seed_face = f
        if seed_face is None or abs(seed_val) <= 1e-13:
            raise ConstructionError("fold seed sits on the crease")
        active = 1.0 if seed_val > 0 else -1.0
        adj: dict[int, list[tuple[int, Point, Point]]] = {}
        for i, j, a, b in self.records:
            adj.setdefault(i, []).append((j, a, b))
            adj.setdefault(j, []).append((i, a, b))
        comp = {seed_face}
        stack = [seed_face]
        while stack:
            f = stack.pop()
            for g, a, b in adj.get(f, ()):
                if g in comp:
                    continue
                mid = self.motions[f].apply(lerp(a, b, 0.5))
                if abs(cross(cdir, sub(mid, cpt))) <= HINGE_TOL:
                    continue
                comp.add(g)
                stack.append(g)
        for f in comp:
            c = _centroid(self.polys[f])
            v = cross(cdir, sub(self.motions[f].apply(c), cpt))
            if v * active < -10.0 * HINGE_TOL:
                raise ConstructionError(
                    "fold scope leaked across the crease; the piece is "
                    "probably not simply connected")
        refl = Motion.reflection(cpt, cdir)
        for f in comp:
            self.motions[f] = refl.compose(self.motions[f])
        for parent, kids in parts.items():
            if len(kids) == 2:
                ina = kids[0] in comp
                inb = kids[1] in comp
                if ina != inb and parent in chords:
                    self.creases.append(chords[parent])
        self.fold_count += 1
        return len(comp)

    def map_walk(self, walk: Sequence[Point]):
        """Trace a domain polyline through the fold state.

        Returns a refined list of (domain point, image point, arclength)
        triples including every face crossing, so consecutive entries are
        related by a single face motion.
        """
        pts = [walk[0]]
        for p in walk[1:]:
            if dist(pts[-1], p) > PART_TOL:
                pts.append(p)
        if len(pts) == 1:
            start_faces = self.locate(pts[0])
            if not start_faces:
                raise ConstructionError("walk starts outside the piece")
            f0 = start_faces[0]
            return [(pts[0], self.motions[f0].apply(pts[0]), 0.0)]
        out = []
        u = 0.0
        for a, b in zip(pts, pts[1:]):
            seg_len = dist(a, b)
            face = None
            best = 0.0
            for cand in self.locate(a):
                iv = _seg_face_interval(self.polys[cand], a, b)
                if iv is None or iv[1] <= 1e-12 or iv[0] > 1e-9:
                    continue
                # A face that merely grazes the segment at a shared vertex
                # produces a tolerance-wide interval; prefer the face the
                # segment actually travels through.
                if iv[1] > best:
                    face = cand
                    best = iv[1]
            if face is None:
                raise ConstructionError("walk leaves the piece")
            if not out:
                out.append((a, self.motions[face].apply(a), 0.0))
            while True:
                iv = _seg_face_interval(self.polys[face], a, b)
                if iv is None:
                    raise ConstructionError("walk lost its face")
                hi = min(iv[1], 1.0)
                dom = lerp(a, b, hi)
                out.append((dom, self.motions[face].apply(dom),
                            u + hi * seg_len))
                if hi >= 1.0 - 1e-12:
                    break
                nxt = None
                best = hi
                for cand in self.locate(dom):
                    if cand == face:
                        continue
                    iv2 = _seg_face_interval(self.polys[cand], a, b)
                    if (iv2 is not None and iv2[1] > best + 1e-12
                            and iv2[0] <= hi + 1e-9):
                        nxt = cand
                        best = iv2[1]
                if nxt is None:
                    raise ConstructionError("walk leaves the piece")
                face = nxt
            u += seg_len
        dedup = [out[0]]
        for entry in out[1:]:
            if entry[2] - dedup[-1][2] > 1e-12:
                dedup.append(entry)
        return dedup


def _centroid(poly: Sequence[Point]) -> Point:
    return Point(sum(p.x for p in poly) / len(poly),
                 sum(p.y for p in poly) / len(poly))


def _convex_has(poly: Sequence[Point], p: Point, tol: float) -> bool:
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        e = sub(b, a)
        ln = norm(e)
        if ln <= PART_TOL:
            continue
        if cross(e, sub(p, a)) / ln < -tol:
            return False
    return True


def _online_interval(poly: Sequence[Point], a: Point, b: Point):
    """Parameter span of the polygon's vertices that sit on segment ab's line."""
    d = sub(b, a)
    ln = norm(d)
    lo = math.inf
    hi = -math.inf
    for p in poly:
        if abs(cross(d, sub(p, a))) / ln <= SPLIT_TOL:
            t = dot(d, sub(p, a)) / (ln * ln)
            lo = min(lo, t)
            hi = max(hi, t)
    if hi < lo:
        return None
    return lo, hi


def _seg_face_interval(poly: Sequence[Point], a: Point, b: Point,
                       tol: float = SPLIT_TOL):
    """Clip parameter range of segment ab against a convex face."""
    lo, hi = 0.0, 1.0
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        e = sub(q, p)
        ln = norm(e)
        if ln <= PART_TOL:
            continue
        va = cross(e, sub(a, p)) / ln
        vb = cross(e, sub(b, p)) / ln
        if va >= -tol and vb >= -tol:
            continue
        if va < -tol and vb < -tol:
            return None
        # The tolerance decides which side an endpoint is on; the crossing
        # itself is taken on the exact edge line, so hop points land on the
        # stored geometry and neighbouring motions agree there.
        t0 = va / (va - vb)
        if va < -tol:
            lo = max(lo, t0)
        else:
            hi = min(hi, t0)
    if lo > hi + 1e-12:
        return None
    return lo, hi
