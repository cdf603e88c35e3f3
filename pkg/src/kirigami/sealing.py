"""Shrinking cuts as far as the p-q distance allows.

Each cut is sealed from each endpoint in turn: the endpoint slides along
the cut up to the largest amount that keeps dist(p,q) unchanged.  The
distance is monotone non-increasing in the sealed amount (a smaller cut
obstructs less), so the threshold is found by bisection between a small
probe and full removal.  What survives is a minimal configuration: a
forest, every shrink strictly costly, every leaf on some geodesic.

An endpoint shared with other cuts detaches the moment it moves: the
sliding copy becomes a new degree-1 vertex and the junction keeps the
remaining cuts.  This is also why a zero result commits nothing, since
even an arbitrarily small detachment can open a passage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import EPS_LEN, Point, dist
from .model import KirigamiSpec, ValidationReport, components
from .geodesics import TERMINAL, all_geodesics, geodesic_distance

# a committed seal keeps the distance at least this close to the original
KEEP_TOL = 1e-10
PROBE_FRAC = 1e-4
BISECT_ITERS = 40


@dataclass(frozen=True)
class SealStep:
    """One endpoint pass: cut and endpoint in original numbering."""

    cut: int
    endpoint: int
    t: float
    before: float
    after: float


@dataclass(frozen=True)
class SealTrace:
    steps: tuple[SealStep, ...]
    final_spec: KirigamiSpec
    removed_cuts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "steps": [{"cut": s.cut, "endpoint": s.endpoint, "t": s.t,
                       "before": s.before, "after": s.after}
                      for s in self.steps],
            "removed_cuts": list(self.removed_cuts),
            "final_spec": self.final_spec.to_dict(),
        }


def _remove_cut(spec: KirigamiSpec, e: int) -> KirigamiSpec:
    """Drop cut e and any vertices left without an incident cut."""
    edges = [ed for k, ed in enumerate(spec.edges) if k != e]
    used = sorted({v for ed in edges for v in ed})
    remap = {v: k for k, v in enumerate(used)}
    vertices = tuple(spec.vertices[v] for v in used)
    return KirigamiSpec(spec.domain, vertices,
                        tuple((remap[i], remap[j]) for i, j in edges),
                        spec.p, spec.q)


def _move_endpoint(spec: KirigamiSpec, e: int, end: int,
                   t: float) -> KirigamiSpec:
    """Slide one endpoint of cut e a distance t toward the other.

    A shared endpoint is detached into a fresh degree-1 vertex; the
    original vertex stays behind with the other cuts.
    """
    i, j = spec.edges[e]
    vid, other = (i, j) if end == 0 else (j, i)
    a, b = spec.vertices[vid], spec.vertices[other]
    s = t / dist(a, b)
    moved = Point(a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s)
    vertices = list(spec.vertices)
    edges = list(spec.edges)
    if spec.degree(vid) == 1:
        vertices[vid] = moved
    else:
        vertices.append(moved)
        new = len(vertices) - 1
        edges[e] = (new, j) if end == 0 else (i, new)
    return KirigamiSpec(spec.domain, tuple(vertices), tuple(edges),
                        spec.p, spec.q)


def dist_with_shrunk_cut(spec: KirigamiSpec, e: int, end: int, t: float,
                         tol: float = EPS_LEN) -> float:
    """Distance after cut e loses a length t from the given endpoint."""
    length = spec.cut_length(e)
    if not -tol <= t <= length + tol:
        raise ValueError(f"shrink amount {t} outside [0, {length}]")
    if t <= 0.0:
        return geodesic_distance(spec)
    if t >= length - tol:
        return geodesic_distance(_remove_cut(spec, e))
    return geodesic_distance(_move_endpoint(spec, e, end, t))


def max_seal(spec: KirigamiSpec, e: int, end: int, *,
             base_dist: float | None = None,
             probe_frac: float = PROBE_FRAC,
             iters: int = BISECT_ITERS,
             keep_tol: float = KEEP_TOL,
             tol: float = EPS_LEN) -> float:
    """Largest shrink of cut e from one endpoint with dist(p,q) unchanged.

    The preserved set is an interval [0, t*]; full removal and a probe of
    probe_frac of the length are tried first, then t* is bisected.  The
    returned value errs below t*, never above.
    """
    length = spec.cut_length(e)
    d0 = geodesic_distance(spec) if base_dist is None else base_dist

    def keeps(t: float) -> bool:
        dt = dist_with_shrunk_cut(spec, e, end, t, tol)
        if math.isinf(d0):
            return math.isinf(dt)
        return dt >= d0 - keep_tol

    if keeps(length):
        return length
    lo = probe_frac * length
    if not keeps(lo):
        return 0.0
    hi = length
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if keeps(mid):
            lo = mid
        else:
            hi = mid
    return lo


def seal_all(spec: KirigamiSpec, *, probe_frac: float = PROBE_FRAC,
             keep_tol: float = KEEP_TOL, tol: float = EPS_LEN) -> SealTrace:
    """Seal every cut from both endpoints, in input order.

    The result depends on the order (different orders may leave different
    minimal configurations) but is deterministic, and the distance always
    matches the input spec.  Cuts sealed down to nothing are removed; a
    removal folds the whole remaining length into that step and skips the
    cut's second pass.
    """
    cur = spec
    d0 = geodesic_distance(cur)
    dcur = d0
    orig = list(range(len(spec.edges)))
    steps: list[SealStep] = []
    removed: list[int] = []
    for ocut in range(len(spec.edges)):
        for end in (0, 1):
            if ocut not in orig:
                break
            e = orig.index(ocut)
            length = cur.cut_length(e)
            t = max_seal(cur, e, end, base_dist=d0, probe_frac=probe_frac,
                         keep_tol=keep_tol, tol=tol)
            if t <= 0.0:
                steps.append(SealStep(ocut, end, 0.0, dcur, dcur))
                continue
            if t >= length - tol:
                cur = _remove_cut(cur, e)
                orig.pop(e)
                removed.append(ocut)
                dafter = geodesic_distance(cur)
                steps.append(SealStep(ocut, end, length, dcur, dafter))
            else:
                cur = _move_endpoint(cur, e, end, t)
                dafter = geodesic_distance(cur)
                steps.append(SealStep(ocut, end, t, dcur, dafter))
            dcur = dafter
    return SealTrace(tuple(steps), cur, tuple(removed))


def verify_minimal(spec: KirigamiSpec, *, probe_frac: float = PROBE_FRAC,
                   tol: float = EPS_LEN) -> ValidationReport:
    """Check the minimal-configuration contract on a spec.

    (a) shrinking any cut endpoint by probe_frac of its length strictly
    lowers the distance, (b) the cut graph is a forest, and (c) every
    leaf vertex lies on at least one geodesic.
    """
    rep = ValidationReport()
    d0 = geodesic_distance(spec)
    for e in range(len(spec.edges)):
        length = spec.cut_length(e)
        for end in (0, 1):
            dt = dist_with_shrunk_cut(spec, e, end, probe_frac * length, tol)
            # The decrease is quadratic in the angle the geodesic wraps
            # around the tip, so a legitimate minimal configuration can
            # shed as little as ~1e-10 here.  The margin only has to
            # separate a real decrease from roundoff.
            if not dt < d0 - 1e-12:
                rep.errors.append(
                    f"cut {e} endpoint {end}: probe shrink leaves the "
                    f"distance at {dt:.12g} (was {d0:.12g})")
    trees = components(spec)
    for k, tree in enumerate(trees):
        if tree.cyclic:
            rep.errors.append(f"cut component {k} contains a cycle")
    if any(tree.leaves for tree in trees):
        used = {v for g in all_geodesics(spec).geodesics
                for v in g.node_vertices if v != TERMINAL}
        for tree in trees:
            for leaf in tree.leaves:
                if leaf not in used:
                    rep.errors.append(f"leaf vertex {leaf} is on no geodesic")
    return rep
