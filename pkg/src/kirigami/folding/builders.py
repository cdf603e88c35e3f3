"""Piece-level fold constructions.

Every piece of the decomposition is flattened the same way: walk along a
prescribed polyline, compare the walk's image with where its arclength
stations say it should be, and fold at the first divergence until the whole
walk lies on its target line.  Caps, pockets and exterior components need
nothing else.  Interior plates bounded by two trees additionally have to hit
a prescribed offset between their two geodesic stretches; the offset is
swept by rotating a line through the crossing point of the two taut
diagonals, and the matching member of the family is found by bisection.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Optional, Sequence

from ..errors import ConstructionError
from ..geometry import (Point, add, cross, dist, dot, lerp, norm, perp,
                        polygon_contains, polyline_length, same_point, scale,
                        seg_intersect, sub, unit)
from .state import FoldedState, Motion

PLACE_TOL = 1e-9
STATION_TOL = 1e-8
E1 = Point(1.0, 0.0)
ORIGIN = Point(0.0, 0.0)


def prefix_arcs(pts: Sequence[Point]) -> list[float]:
    out = [0.0]
    for a, b in zip(pts, pts[1:]):
        out.append(out[-1] + dist(a, b))
    return out


def interp_at(pts: Sequence[Point], arcs: Sequence[float], a: float) -> Point:
    a = min(max(a, arcs[0]), arcs[-1])
    i = min(max(bisect_right(arcs, a) - 1, 0), len(pts) - 2)
    span = arcs[i + 1] - arcs[i]
    if span <= 1e-15:
        return pts[i]
    return lerp(pts[i], pts[i + 1], (a - arcs[i]) / span)


def sub_polyline(pts: Sequence[Point], arcs: Sequence[float],
                 a0: float, a1: float) -> tuple[list[Point], list[float]]:
    """Portion of a polyline between two arclengths, ends interpolated."""
    if a1 < a0:
        raise ValueError("reversed arc window")
    out_p = [interp_at(pts, arcs, a0)]
    out_a = [a0]
    for p, a in zip(pts, arcs):
        if a0 + 1e-12 < a < a1 - 1e-12:
            out_p.append(p)
            out_a.append(a)
    out_p.append(interp_at(pts, arcs, a1))
    out_a.append(a1)
    keep_p, keep_a = [out_p[0]], [out_a[0]]
    for p, a in zip(out_p[1:], out_a[1:]):
        if a - keep_a[-1] > 1e-12:
            keep_p.append(p)
            keep_a.append(a)
    return keep_p, keep_a


def tangent_at(pts: Sequence[Point], arcs: Sequence[float],
               a: float, sign: int) -> Point:
    """Unit direction along the polyline at arclength a, toward lower or
    higher arcs."""
    if sign < 0:
        j = bisect_left(arcs, a - 1e-9) - 1
        j = min(max(j, 0), len(pts) - 2)
        return unit(sub(pts[j], pts[j + 1]))
    j = bisect_right(arcs, a + 1e-9) - 1
    j = min(max(j, 0), len(pts) - 2)
    return unit(sub(pts[j + 1], pts[j]))


def ray_polyline_hit(origin: Point, dirn: Point, pts: Sequence[Point],
                     arcs: Sequence[float], lo: float, hi: float,
                     skip: float = 1e-9):
    """First hit of a ray with an arc window of a polyline.

    Returns (distance along ray, arclength of the hit, hit point) or None.
    """
    best = None
    for i in range(len(pts) - 1):
        a0, a1 = arcs[i], arcs[i + 1]
        c0, c1 = max(a0, lo), min(a1, hi)
        if c1 - c0 <= 1e-12:
            continue
        span = a1 - a0
        p = pts[i] if c0 == a0 else lerp(pts[i], pts[i + 1], (c0 - a0) / span)
        q = pts[i + 1] if c1 == a1 else lerp(pts[i], pts[i + 1],
                                             (c1 - a0) / span)
        s = sub(q, p)
        ls = norm(s)
        if ls <= 1e-12:
            continue
        denom = cross(dirn, s)
        if abs(denom) <= 1e-12 * ls:
            if abs(cross(dirn, sub(p, origin))) <= 1e-9:
                for pt, arc in ((p, c0), (q, c1)):
                    rho = dot(dirn, sub(pt, origin))
                    if rho > skip and (best is None or rho < best[0]):
                        best = (rho, arc, pt)
            continue
        w = sub(p, origin)
        rho = cross(w, s) / denom
        u = cross(w, dirn) / denom
        slack = 1e-9 / ls
        if rho > skip and -slack <= u <= 1.0 + slack:
            u = min(1.0, max(0.0, u))
            cand = (rho, c0 + u * (c1 - c0), lerp(p, q, u))
            if best is None or cand[0] < best[0]:
                best = cand
    return best


def roll_onto_line(state: FoldedState, walk: Sequence[Point],
                   stations: Sequence[float], origin: Point, direction: Point,
                   anchored: bool, place_tol: float = PLACE_TOL) -> int:
    """Fold until the walk's image equals origin + station * direction.

    Stations must advance at unit speed along the walk (either sign, and the
    sign may flip at walk vertices).  With anchored=False the piece is first
    moved rigidly so the walk's start already matches; with anchored=True
    the start is required to match and only folds are applied.  Returns the
    number of folds.
    """
    dirn = unit(direction)
    pts = [walk[0]]
    sts = [stations[0]]
    for p, s in zip(walk[1:], stations[1:]):
        if dist(pts[-1], p) > 1e-12:
            pts.append(p)
            sts.append(s)
        elif abs(s - sts[-1]) > 1e-9:
            raise ConstructionError("station jump at a repeated walk point")
    if len(pts) < 2:
        return 0
    us = prefix_arcs(pts)
    for i in range(len(pts) - 1):
        du = us[i + 1] - us[i]
        if abs(abs(sts[i + 1] - sts[i]) - du) > 1e-6 * max(1.0, du):
            raise ConstructionError("stations must advance at unit speed")

    def station_at(u: float) -> float:
        i = min(max(bisect_right(us, u) - 1, 0), len(us) - 2)
        du = us[i + 1] - us[i]
        if du <= 1e-15:
            return sts[i]
        return sts[i] + (u - us[i]) * (sts[i + 1] - sts[i]) / du

    def target(s: float) -> Point:
        return add(origin, scale(dirn, s))

    refined = state.map_walk(pts)
    if anchored:
        if dist(refined[0][1], target(sts[0])) > 1e-7:
            raise ConstructionError("anchored walk does not start at its "
                                    "station")
    else:
        img0 = refined[0][1]
        nxt = next((e for e in refined[1:] if e[2] > 1e-12), None)
        if nxt is None:
            return 0
        slope = 1.0 if sts[1] >= sts[0] else -1.0
        state.rigid(Motion.rigid_map(img0, sub(nxt[1], img0),
                                     target(sts[0]), scale(dirn, slope)))
        refined = state.map_walk(pts)
    folds = 0
    cap = 16 * len(pts) + 64
    while True:
        div = None
        for idx in range(1, len(refined)):
            if dist(refined[idx][1], target(station_at(refined[idx][2]))) \
                    > place_tol:
                div = idx
                break
        if div is None:
            # A fold can only break the start if the walk does not bound
            # the material it drags along; report that instead of
            # returning a quietly wrong placement.
            if dist(refined[0][1], target(sts[0])) > 1e-7:
                raise ConstructionError(
                    "walk start broke away from its station; the walk "
                    "must bound the material it folds")
            return folds
        dom0, img0, u0 = refined[div - 1]
        dom1, img1, u1 = refined[div]
        want = scale(dirn, 1.0 if station_at(u1) >= station_at(u0) else -1.0)
        v = unit(sub(img1, img0))
        w = add(v, want)
        cdir = perp(want) if norm(w) < 1e-9 else unit(w)
        state.fold(img0, cdir, lerp(dom0, dom1, 0.5))
        folds += 1
        if folds > cap:
            raise ConstructionError("walk refuses to meet its stations")
        refined = state.map_walk(pts)


def check_stations(state: FoldedState, pts: Sequence[Point],
                   sts: Sequence[float], origin: Point = ORIGIN,
                   direction: Point = E1) -> float:
    """Largest distance between the walk's image and its station targets."""
    dirn = unit(direction)
    us = prefix_arcs(pts)
    worst = 0.0
    for dom, img, u in state.map_walk(pts):
        i = min(max(bisect_right(us, u) - 1, 0), len(us) - 2)
        du = us[i + 1] - us[i]
        s = sts[i] if du <= 1e-15 else \
            sts[i] + (u - us[i]) * (sts[i + 1] - sts[i]) / du
        worst = max(worst, dist(img, add(origin, scale(dirn, s))))
    return worst


def immerse_walk_piece(ring: Sequence[Point], walk: Sequence[Point],
                       stations: Sequence[float]) -> FoldedState:
    """Flatten a piece whose only constraint is one stationed boundary walk."""
    state = FoldedState(ring)
    roll_onto_line(state, walk, stations, ORIGIN, E1, anchored=False)
    resid = check_stations(state, list(walk), list(stations))
    if resid > STATION_TOL:
        raise ConstructionError(
            f"piece boundary missed its stations by {resid:.2e}")
    return state


def shortest_path_in_polygon(ring: Sequence[Point], a: Point,
                             b: Point) -> list[Point]:
    """Taut path between two boundary points of a simple polygon."""
    nodes = [a, b]
    for p in ring:
        if not any(same_point(p, n, 1e-9) for n in nodes[:2]):
            nodes.append(p)
    n = len(nodes)
    ring = list(ring)
    edges = [(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))]

    def visible(u: Point, v: Point) -> bool:
        if same_point(u, v, 1e-9):
            return True
        luv = dist(u, v)
        for t in (0.25, 0.5, 0.75):
            if polygon_contains(ring, lerp(u, v, t), 1e-9) == "outside":
                return False
        for c, d in edges:
            if dist(c, d) <= 1e-12:
                continue
            hit = seg_intersect(u, v, c, d, tol=1e-9)
            if hit.kind == "point":
                et = max(1e-9 / luv, 1e-12)
                eu = max(1e-9 / dist(c, d), 1e-12)
                if et < hit.t < 1.0 - et and eu < hit.u < 1.0 - eu:
                    return False
        return True

    dist_to = {0: 0.0}
    prev: dict[int, int] = {}
    heap = [(0.0, 0)]
    seen = set()
    while heap:
        du, iu = heappop(heap)
        if iu in seen:
            continue
        seen.add(iu)
        if iu == 1:
            break
        for iv in range(n):
            if iv in seen or not visible(nodes[iu], nodes[iv]):
                continue
            cand = du + dist(nodes[iu], nodes[iv])
            if cand < dist_to.get(iv, math.inf) - 1e-15:
                dist_to[iv] = cand
                prev[iv] = iu
                heappush(heap, (cand, iv))
    if 1 not in seen:
        raise ConstructionError("no taut path between the given boundary "
                                "points")
    path = [1]
    while path[-1] != 0:
        path.append(prev[path[-1]])
    return [nodes[i] for i in reversed(path)]


def support_contact(entries, normal: Point, mode: str):
    """Extreme point of an image polyline in a normal direction.

    entries are (domain, image, arc) triples; returns (image, arc, value).
    """
    best = None
    for _, img, arc in entries:
        v = dot(img, normal)
        if best is None or (mode == "min" and v < best[2] - 1e-15) or \
                (mode == "max" and v > best[2] + 1e-15):
            best = (img, arc, v)
    return best


def supporting_bitangents(a_pts: Sequence[Point],
                          b_pts: Sequence[Point]) -> list[tuple[Point, Point]]:
    """Common supporting lines of two point sets, both sets to the left."""
    out = []
    for p in a_pts:
        for q in b_pts:
            if same_point(p, q, 1e-12):
                continue
            d = sub(q, p)
            ln = norm(d)
            if all(cross(d, sub(x, p)) / ln >= -1e-9 for x in a_pts) and \
                    all(cross(d, sub(x, p)) / ln >= -1e-9 for x in b_pts):
                ang = round(math.atan2(d.y, d.x), 6)
                if not any(abs(ang - o) < 1e-5 for _, _, o in out):
                    out.append((p, q, ang))
    return [(p, q) for p, q, _ in out]


@dataclass
class PlateReport:
    """What the offset sweep of one interior plate did."""

    alpha_w: float
    alpha_v: float
    target: float
    o_low: float
    o_high: float
    iterations: int
    case_upper: str
    case_lower: str
    residual: float
    branch: str = "plain"
    folds: int = 0


def immerse_plate(ring: Sequence[Point],
                  lower_pts: Sequence[Point], lower_sts: Sequence[float],
                  upper_pts: Sequence[Point], upper_sts: Sequence[float],
                  ) -> tuple[FoldedState, PlateReport]:
    """Flatten a plate between two trees, hitting the station offset."""
    lower_pts = list(lower_pts)
    upper_pts = list(upper_pts)
    g = upper_sts[0] - lower_sts[0]
    xi_a = shortest_path_in_polygon(ring, lower_pts[0], upper_pts[-1])
    xi_b = shortest_path_in_polygon(ring, upper_pts[0], lower_pts[-1])
    arcs_a = prefix_arcs(xi_a)
    arcs_b = prefix_arcs(xi_b)
    len_a, len_b = arcs_a[-1], arcs_b[-1]
    len_up = polyline_length(upper_pts)
    len_lo = polyline_length(lower_pts)
    alpha_v = len_a - len_up
    alpha_w = len_lo - len_b
    if not (alpha_w - 1e-7 <= g <= alpha_v + 1e-7):
        raise ConstructionError(
            f"station offset {g:.9g} falls outside the feasible range "
            f"[{alpha_w:.9g}, {alpha_v:.9g}]")

    # Crossing structure of the two taut paths.
    meets = []
    for i in range(len(xi_b) - 1):
        for j in range(len(xi_a) - 1):
            hit = seg_intersect(xi_b[i], xi_b[i + 1], xi_a[j], xi_a[j + 1],
                                tol=1e-9)
            if hit.kind == "point":
                meets.append((arcs_b[i] + hit.t * (arcs_b[i + 1] - arcs_b[i]),
                              arcs_a[j] + hit.u * (arcs_a[j + 1] - arcs_a[j]),
                              hit.point))
            elif hit.kind == "overlap":
                for pt in hit.seg:
                    tb = arcs_b[i] + _param_frac(pt, xi_b[i], xi_b[i + 1]) \
                        * (arcs_b[i + 1] - arcs_b[i])
                    ta = arcs_a[j] + _param_frac(pt, xi_a[j], xi_a[j + 1]) \
                        * (arcs_a[j + 1] - arcs_a[j])
                    meets.append((tb, ta, pt))
    if not meets:
        raise ConstructionError("taut paths of a plate do not meet")
    e_rec = max(meets, key=lambda m: m[0])
    ep_rec = min(meets, key=lambda m: m[0])
    cas2 = dist(e_rec[2], ep_rec[2]) > 1e-9

    variants = ["plain"]
    if cas2:
        variants = ["shared"]
    else:
        bend_b = _bend_angle(xi_b, arcs_b, e_rec[0]) > 1e-9
        bend_a = _bend_angle(xi_a, arcs_a, e_rec[1]) > 1e-9
        if bend_b and bend_a:
            variants = ["vertex-b", "vertex-a"]

    last_err: Optional[ConstructionError] = None
    for branch in variants:
        state = FoldedState(ring)
        try:
            _plate_prefolds(state, branch, xi_a, arcs_a, xi_b, arcs_b,
                            e_rec, ep_rec)
            report = _plate_sweep(state, branch, g, alpha_w, alpha_v,
                                  xi_a, arcs_a, xi_b, arcs_b, e_rec, ep_rec,
                                  lower_pts, lower_sts, upper_pts, upper_sts,
                                  len_lo, len_up)
            return state, report
        except ConstructionError as err:
            last_err = err
    raise last_err if last_err else ConstructionError("plate build failed")


def _param_frac(p: Point, a: Point, b: Point) -> float:
    d = dist(a, b)
    return 0.0 if d <= 1e-15 else min(1.0, max(0.0, dist(a, p) / d))


def _bend_angle(pts, arcs, a):
    if a <= 1e-9 or a >= arcs[-1] - 1e-9:
        return 0.0
    t_in = tangent_at(pts, arcs, a, -1)
    t_out = tangent_at(pts, arcs, a, +1)
    # Straight passage means the outgoing direction opposes the incoming
    # tangent (which points backward).  atan2 keeps the angle linear in
    # rounding noise where acos would square-root it.
    return abs(math.atan2(abs(cross(t_in, t_out)), -dot(t_in, t_out)))


def _plate_prefolds(state, branch, xi_a, arcs_a, xi_b, arcs_b, e_rec, ep_rec):
    if branch == "shared":
        pts, arcs = sub_polyline(xi_b, arcs_b, ep_rec[0], e_rec[0])
        if len(pts) > 2:
            chord = sub(e_rec[2], ep_rec[2])
            roll_onto_line(state, pts, [a - arcs[0] for a in arcs],
                           ep_rec[2], chord, anchored=True)
    elif branch in ("vertex-b", "vertex-a"):
        pts, arcs, arc_e = (xi_b, arcs_b, e_rec[0]) if branch == "vertex-b" \
            else (xi_a, arcs_a, e_rec[1])
        t_in = tangent_at(pts, arcs, arc_e, -1)
        t_out = tangent_at(pts, arcs, arc_e, +1)
        cdir = sub(t_out, t_in)
        if norm(cdir) < 1e-12:
            return
        j = min(bisect_right(arcs, arc_e + 1e-9) - 1, len(pts) - 2)
        seed = interp_at(pts, arcs, min(arcs[-1],
                                        0.5 * (arc_e + arcs[j + 1])))
        state.fold(e_rec[2], unit(cdir), seed)


def _plate_sweep(state, branch, g, alpha_w, alpha_v, xi_a, arcs_a,
                 xi_b, arcs_b, e_rec, ep_rec, lower_pts, lower_sts,
                 upper_pts, upper_sts, len_lo, len_up):
    img_a = state.map_walk(xi_a)
    img_b = state.map_walk(xi_b)
    pa = [e[1] for e in img_a]
    aa = [e[2] for e in img_a]
    pb = [e[1] for e in img_b]
    ab = [e[2] for e in img_b]
    img_lo = state.map_walk(lower_pts)
    img_up = state.map_walk(upper_pts)
    e_img = interp_at(pb, ab, e_rec[0])
    ep_img = interp_at(pb, ab, ep_rec[0])
    e_center = lerp(ep_img, e_img, 0.5)
    win_up_b = (0.0, ep_rec[0])
    win_lo_b = (e_rec[0], ab[-1])
    a_lo_arc = min(e_rec[1], ep_rec[1])
    a_hi_arc = max(e_rec[1], ep_rec[1])
    win_up_a = (a_hi_arc, aa[-1])
    win_lo_a = (0.0, a_lo_arc)

    def o_eval(theta):
        r1 = Point(math.cos(theta), math.sin(theta))
        dhat = scale(r1, -1.0)
        nhat = perp(dhat)
        hit = ray_polyline_hit(e_center, r1, pb, ab, *win_up_b)
        if hit is not None:
            case_u, data_u = "B1", hit
            param_bl = -(hit[0] + hit[1])
        else:
            hit = ray_polyline_hit(e_center, dhat, pa, aa, *win_up_a)
            if hit is not None:
                case_u, data_u = "A2", hit
                param_bl = (hit[0] + (aa[-1] - hit[1])) - len_up
            else:
                tau = support_contact(img_up, nhat, "min")
                case_u, data_u = "C", tau
                param_bl = dot(sub(tau[0], e_center), dhat) - tau[1]
        hit = ray_polyline_hit(e_center, dhat, pb, ab, *win_lo_b)
        if hit is not None:
            case_l, data_l = "B2", hit
            param_al = (hit[0] + (ab[-1] - hit[1])) - len_lo
        else:
            hit = ray_polyline_hit(e_center, r1, pa, aa, *win_lo_a)
            if hit is not None:
                case_l, data_l = "A1", hit
                param_al = -(hit[0] + hit[1])
            else:
                tau = support_contact(img_lo, nhat, "max")
                case_l, data_l = "C", tau
                param_al = dot(sub(tau[0], e_center), dhat) - tau[1]
        return param_bl - param_al, (case_u, data_u), (case_l, data_l), \
            param_bl, param_al

    theta_w = math.atan2(*reversed(tangent_at(pb, ab, ep_rec[0], -1)))
    theta_v = math.atan2(*reversed(tangent_at(pa, aa, a_lo_arc, -1)))
    sweep = None
    for sgn in (1.0, -1.0):
        delta = (theta_v - theta_w) * sgn % (2.0 * math.pi)
        if delta <= 1e-12:
            delta = 2.0 * math.pi
        eps_t = min(1e-9, 0.001 * delta)
        o_lo = o_eval(theta_w + sgn * eps_t)[0]
        o_hi = o_eval(theta_w + sgn * (delta - eps_t))[0]
        if abs(o_lo - alpha_w) <= 1e-5 and abs(o_hi - alpha_v) <= 1e-5:
            sweep = (sgn, delta, eps_t, o_lo, o_hi)
            break
    if sweep is None:
        raise ConstructionError("offset sweep endpoints do not reproduce "
                                "the feasible range")
    sgn, delta, eps_t, o_lo, o_hi = sweep

    def theta_of(t):
        return theta_w + sgn * (eps_t + t * (delta - 2.0 * eps_t))

    iterations = 0
    if g <= o_lo:
        t_star = 0.0
    elif g >= o_hi:
        t_star = 1.0
    else:
        t0, f0 = 0.0, o_lo - g
        t1, f1 = 1.0, o_hi - g
        t_star = 0.5
        while iterations < 60:
            iterations += 1
            t_star = 0.5 * (t0 + t1)
            fm = o_eval(theta_of(t_star))[0] - g
            if abs(fm) <= 1e-10:
                break
            if (fm > 0.0) == (f1 > 0.0):
                t1, f1 = t_star, fm
            else:
                t0, f0 = t_star, fm
    theta = theta_of(t_star)
    o_star, up, lo, param_bl, param_al = o_eval(theta)
    r1 = Point(math.cos(theta), math.sin(theta))
    dhat = scale(r1, -1.0)
    nhat = perp(dhat)
    arcs_lo_chain = prefix_arcs(lower_pts)
    arcs_up_chain = prefix_arcs(upper_pts)

    folds = 0
    # Upper side first, then lower; the final rigid motion anchors both.
    case_u, data_u = up
    if case_u == "B1":
        rho, arc_hit, _ = data_u
        sp, sa = sub_polyline(xi_b, arcs_b, 0.0, arc_hit)
        walk = list(reversed(sp))
        sts = [-(rho + (arc_hit - a)) for a in reversed(sa)]
        folds += roll_onto_line(state, walk, sts, e_center, dhat, True)
        sts = [param_bl + a for a in arcs_up_chain]
        folds += roll_onto_line(state, upper_pts, sts, e_center, dhat, True)
    elif case_u == "A2":
        rho, arc_hit, _ = data_u
        sp, sa = sub_polyline(xi_a, arcs_a, arc_hit, arcs_a[-1])
        sts = [rho + (a - arc_hit) for a in sa]
        folds += roll_onto_line(state, sp, sts, e_center, dhat, True)
        sts = [param_bl + a for a in arcs_up_chain]
        folds += roll_onto_line(state, list(reversed(upper_pts)),
                                list(reversed(sts)), e_center, dhat, True)
    else:
        folds += _roll_about_contact(state, upper_pts, arcs_up_chain, data_u,
                                     e_center, dhat, nhat)
    case_l, data_l = lo
    if case_l == "B2":
        rho, arc_hit, _ = data_l
        sp, sa = sub_polyline(xi_b, arcs_b, arc_hit, arcs_b[-1])
        sts = [rho + (a - arc_hit) for a in sa]
        folds += roll_onto_line(state, sp, sts, e_center, dhat, True)
        sts = [param_al + a for a in arcs_lo_chain]
        folds += roll_onto_line(state, list(reversed(lower_pts)),
                                list(reversed(sts)), e_center, dhat, True)
    elif case_l == "A1":
        rho, arc_hit, _ = data_l
        sp, sa = sub_polyline(xi_a, arcs_a, 0.0, arc_hit)
        walk = list(reversed(sp))
        sts = [-(rho + (arc_hit - a)) for a in reversed(sa)]
        folds += roll_onto_line(state, walk, sts, e_center, dhat, True)
        sts = [param_al + a for a in arcs_lo_chain]
        folds += roll_onto_line(state, lower_pts, sts, e_center, dhat, True)
    else:
        folds += _roll_about_contact(state, lower_pts, arcs_lo_chain, data_l,
                                     e_center, dhat, nhat)

    shift = lower_sts[0] - param_al
    state.rigid(Motion.rigid_map(e_center, dhat, Point(shift, 0.0), E1))
    residual = max(check_stations(state, lower_pts, list(lower_sts)),
                   check_stations(state, upper_pts, list(upper_sts)))
    if residual > STATION_TOL:
        raise ConstructionError(
            f"plate chains missed their stations by {residual:.2e}")
    return PlateReport(alpha_w=alpha_w, alpha_v=alpha_v, target=g,
                       o_low=o_lo, o_high=o_hi, iterations=iterations,
                       case_upper=case_u, case_lower=case_l,
                       residual=residual, branch=branch, folds=folds)


def _roll_about_contact(state, chain, chain_arcs, tau, e_center, dhat, nhat):
    """Case without a ray hit: roll the chain onto its parallel supporting
    line through the contact, then bring that line down with one crease."""
    tau_img, tau_arc, _ = tau
    h = dot(sub(tau_img, e_center), nhat)
    base = dot(sub(tau_img, e_center), dhat)
    gamma_origin = add(e_center, scale(nhat, h))
    folds = 0
    tau_dom = interp_at(chain, chain_arcs, tau_arc)
    left_p, left_a = sub_polyline(chain, chain_arcs, 0.0, tau_arc)
    if len(left_p) >= 2:
        walk = list(reversed(left_p))
        sts = [base + (a - tau_arc) for a in reversed(left_a)]
        folds += roll_onto_line(state, walk, sts, gamma_origin, dhat, True)
    right_p, right_a = sub_polyline(chain, chain_arcs, tau_arc,
                                    chain_arcs[-1])
    if len(right_p) >= 2:
        sts = [base + (a - tau_arc) for a in right_a]
        folds += roll_onto_line(state, right_p, sts, gamma_origin, dhat, True)
    if abs(h) > 1e-12:
        state.fold(add(e_center, scale(nhat, 0.5 * h)), dhat, tau_dom)
        folds += 1
    return folds
