"""Staged driver: geodesics, sealing, ordering, folding, verification.

``run`` executes the stages in order on one input and collects
everything a caller might want to inspect, serialize or draw.  The JSON
document built from a result is canonical: the same input always
produces the same bytes.  Stage timings are therefore kept out of the
document and surface only in the human-readable summary.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConstructionError, ExteriorTreeError
from .folding import FoldReport, FoldedSheet, fold_sheet, verify_immersion
from .folding.state import FoldedState
from .geodesics import GeodesicPolygonal, GeodesicSet, all_geodesics
from .geometry import EPS, EPS_LEN, Point, cross, lerp, sub
from .model import KirigamiSpec, clean_spec, validate
from .ordering import GeodesicChain, RegionDecomposition, build_chain, decompose
from .sealing import SealTrace, seal_all

STAGES = ("geodesics", "seal", "order", "fold", "verify")


@dataclass
class PipelineResult:
    """Everything the stages produced, plus where and why they stopped.

    ``sealed_spec`` and ``post_seal`` stay None when sealing was skipped;
    later stages then work on the cleaned input spec directly.  An
    exterior-tree obstruction does not raise out of ``run``: it sets
    ``stopped_at`` and ``diagnostic`` so the partial result can still be
    serialized and drawn.
    """

    spec: KirigamiSpec
    warnings: tuple[str, ...] = ()
    until: str = "verify"
    skip_seal: bool = False
    eps: float = EPS
    tol: float = EPS_LEN
    pre_seal: Optional[GeodesicSet] = None
    seal_trace: Optional[SealTrace] = None
    sealed_spec: Optional[KirigamiSpec] = None
    post_seal: Optional[GeodesicSet] = None
    chain: Optional[GeodesicChain] = None
    decomposition: Optional[RegionDecomposition] = None
    sheet: Optional[FoldedSheet] = None
    verification: Optional[FoldReport] = None
    timings: dict[str, float] = field(default_factory=dict)
    stopped_at: Optional[str] = None
    diagnostic: Optional[dict] = None

    @property
    def effective_spec(self) -> KirigamiSpec:
        return self.sealed_spec if self.sealed_spec is not None else self.spec

    @property
    def exit_code(self) -> int:
        if self.diagnostic is not None:
            return 2
        if self.verification is not None and not self.verification.ok:
            return 1
        return 0


def run(spec: KirigamiSpec, *, until: str = "verify",
        skip_seal: bool = False, eps: float = EPS,
        tol: float = EPS_LEN) -> PipelineResult:
    """Run the pipeline on ``spec`` up to and including stage ``until``.

    The input is cleaned and validated first; validation failures raise.
    An exterior-tree obstruction in the ordering stage is recorded on the
    result instead of raising, so callers can still emit the partial
    document (see ``PipelineResult.exit_code``).
    """
    if until not in STAGES:
        raise ValueError(f"unknown stage {until!r}; expected one of {STAGES}")
    cleaned, warnings = clean_spec(spec)
    validate(cleaned, eps=eps, tol=tol).raise_if_bad()
    res = PipelineResult(cleaned, tuple(warnings), until=until,
                         skip_seal=skip_seal, eps=eps, tol=tol)

    t0 = time.perf_counter()
    res.pre_seal = all_geodesics(cleaned, eps=eps, tol=tol)
    res.timings["geodesics"] = time.perf_counter() - t0
    if until == "geodesics":
        return res

    t0 = time.perf_counter()
    if not skip_seal:
        res.seal_trace = seal_all(cleaned, tol=tol)
        res.sealed_spec = res.seal_trace.final_spec
        res.post_seal = all_geodesics(res.sealed_spec, eps=eps, tol=tol)
        if abs(res.post_seal.distance - res.pre_seal.distance) > tol:
            raise ConstructionError(
                "sealing changed the geodesic distance from "
                f"{res.pre_seal.distance!r} to {res.post_seal.distance!r}")
    res.timings["seal"] = time.perf_counter() - t0
    if until == "seal":
        return res

    t0 = time.perf_counter()
    active = res.effective_spec
    gs = res.post_seal if res.post_seal is not None else res.pre_seal
    res.chain = build_chain(gs, tol=tol)
    try:
        res.decomposition = decompose(res.chain, active, tol=tol)
    except ExteriorTreeError as err:
        res.timings["order"] = time.perf_counter() - t0
        res.stopped_at = "order"
        res.diagnostic = {
            "error": "exterior-tree",
            "message": str(err),
            "trees": [sorted(int(v) for v in t) for t in err.trees],
        }
        return res
    res.timings["order"] = time.perf_counter() - t0
    if until == "order":
        return res

    t0 = time.perf_counter()
    res.sheet = fold_sheet(active, res.chain, res.decomposition)
    res.timings["fold"] = time.perf_counter() - t0
    if until == "fold":
        return res

    t0 = time.perf_counter()
    res.verification = verify_immersion(res.sheet, res.chain, active)
    res.timings["verify"] = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# Canonical JSON document


def _pt(p: Point) -> list[float]:
    return [float(p.x), float(p.y)]


def _path_doc(g: GeodesicPolygonal) -> dict:
    return {
        "points": [_pt(p) for p in g.points],
        "length": float(g.length),
        "covered_cuts": [int(e) for e in g.covered_cuts],
    }


def _set_doc(gs: GeodesicSet) -> dict:
    return {
        "distance": float(gs.distance),
        "tie_flagged": bool(gs.tie_flagged),
        "paths": [_path_doc(g) for g in gs.geodesics],
    }


def _centroid(poly) -> Point:
    n = len(poly)
    return Point(sum(p.x for p in poly) / n, sum(p.y for p in poly) / n)


def _crease_kind(state: FoldedState, a: Point, b: Point) -> str:
    """Mountain or valley, judged at a probe point on the crease chord.

    The two faces flanking a crease always carry motions of opposite
    orientation.  Which of the two counts as mountain is a convention;
    here the crease is a mountain when the face on the left of a->b is
    the orientation-reversed one.  The probe slides along the chord in
    case the midpoint sits on another crease.
    """
    ab = sub(b, a)
    for t in (0.5, 0.35, 0.65, 0.2, 0.8):
        pt = lerp(a, b, t)
        left = right = None
        for i in state.locate(pt, tol=1e-9):
            s = cross(ab, sub(_centroid(state.polys[i]), a))
            if s > 1e-12 and left is None:
                left = i
            elif s < -1e-12 and right is None:
                right = i
        if left is not None and right is not None:
            return "mountain" if state.motions[left].det() < 0.0 else "valley"
    return "flat"


def _sheet_doc(sheet: FoldedSheet) -> dict:
    pieces = []
    for piece in sheet.pieces:
        st = piece.state
        faces = []
        for i in st.faces():
            m = st.motions[i]
            faces.append({
                "loop": [_pt(p) for p in st.polys[i]],
                "motion": {"a": float(m.a), "b": float(m.b),
                           "c": float(m.c), "d": float(m.d),
                           "tx": float(m.tx), "ty": float(m.ty)},
            })
        creases = [{"a": _pt(a), "b": _pt(b),
                    "kind": _crease_kind(st, a, b)}
                   for a, b in st.creases]
        doc = {"name": piece.name, "faces": faces, "creases": creases,
               "folds": int(st.fold_count)}
        if piece.report is not None:
            r = piece.report
            doc["plate"] = {
                "alpha_w": float(r.alpha_w), "alpha_v": float(r.alpha_v),
                "target": float(r.target), "o_low": float(r.o_low),
                "o_high": float(r.o_high), "iterations": int(r.iterations),
                "case_upper": r.case_upper, "case_lower": r.case_lower,
                "residual": float(r.residual), "branch": r.branch,
            }
        pieces.append(doc)
    return {"distance": float(sheet.distance),
            "fold_count": int(sheet.fold_count()),
            "pieces": pieces}


def _order_doc(res: PipelineResult) -> dict:
    chain, dec = res.chain, res.decomposition
    gs = res.post_seal if res.post_seal is not None else res.pre_seal
    doc: dict = {
        "sequence": [gs.geodesics.index(g) for g in chain.geodesics],
        "loop_areas": [[float(a) for a in areas]
                       for areas in chain.loop_areas],
    }
    if dec is None:
        return doc
    doc["interval"] = float(dec.interval.length)
    doc["chain_trees"] = [int(c) for c in dec.chain_trees]
    doc["exterior_shells"] = len(dec.exterior_shells)
    doc["regions"] = [{
        "index": int(r.index),
        "area": float(r.area),
        "prefix_end": _pt(r.prefix_end),
        "suffix_start": _pt(r.suffix_start),
        "panels": [{
            "area": float(pp.panel.area),
            "trees": len(pp.trees),
            "plates": len(pp.plates),
            "pockets": sum(len(fam) for fam in pp.pockets),
        } for pp in r.panels],
    } for r in dec.regions]
    return doc


def to_document(res: PipelineResult) -> dict:
    """Plain-data view of a result, ready for canonical JSON dumping.

    Only stages that actually ran appear under ``stages``; the
    ``completed`` list marks them, so a partial document is recognizable
    without guessing from absent keys.
    """
    stages: dict = {}
    completed: list[str] = []

    stages["geodesics"] = _set_doc(res.pre_seal)
    completed.append("geodesics")

    if res.until != "geodesics":
        if res.skip_seal:
            stages["seal"] = {"skipped": True}
        else:
            stages["seal"] = {
                "skipped": False,
                "trace": res.seal_trace.to_dict(),
                "after": _set_doc(res.post_seal),
            }
        completed.append("seal")

    if res.chain is not None:
        stages["order"] = _order_doc(res)
        if res.stopped_at != "order":
            completed.append("order")
    if res.sheet is not None:
        stages["fold"] = _sheet_doc(res.sheet)
        completed.append("fold")
    if res.verification is not None:
        v = res.verification
        stages["verify"] = {
            "ok": bool(v.ok),
            "errors": list(v.errors),
            "metrics": {k: float(x) for k, x in sorted(v.metrics.items())},
        }
        completed.append("verify")

    doc = {
        "input": res.spec.to_dict(),
        "options": {"until": res.until, "skip_seal": res.skip_seal,
                    "eps": float(res.eps), "tol": float(res.tol)},
        "warnings": list(res.warnings),
        "completed": completed,
        "stages": stages,
    }
    if res.diagnostic is not None:
        doc["stopped_at"] = res.stopped_at
        doc["diagnostic"] = res.diagnostic
    return doc


def to_json(res: PipelineResult) -> str:
    """Canonical JSON: sorted keys, no whitespace, shortest float reprs."""
    return json.dumps(to_document(res), sort_keys=True,
                      separators=(",", ":"), allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# SVG rendering


def _svg_num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def to_svg(res: PipelineResult, *, pixels_per_unit: float = 120.0,
           margin: float = 0.4) -> str:
    """Draw the run: domain outline, cuts in red, geodesics in blue,
    creases dashed.  ``margin`` is in domain units."""
    spec = res.effective_spec
    xs = [p.x for p in spec.domain]
    ys = [p.y for p in spec.domain]
    minx, maxy = min(xs) - margin, max(ys) + margin
    scale = pixels_per_unit

    def sx(p: Point) -> str:
        return _svg_num((p.x - minx) * scale)

    def sy(p: Point) -> str:
        return _svg_num((maxy - p.y) * scale)

    def line(cls: str, a: Point, b: Point, style: str) -> str:
        return (f'<line class="{cls}" x1="{sx(a)}" y1="{sy(a)}" '
                f'x2="{sx(b)}" y2="{sy(b)}" {style}/>')

    w = (max(xs) - min(xs) + 2 * margin) * scale
    h = (max(ys) - min(ys) + 2 * margin) * scale
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" '
           f'width="{_svg_num(w)}" height="{_svg_num(h)}" '
           f'viewBox="0 0 {_svg_num(w)} {_svg_num(h)}">']

    ring = " L ".join(f"{sx(p)},{sy(p)}" for p in spec.domain)
    out.append(f'<path class="domain" d="M {ring} Z" fill="none" '
               f'stroke="black" stroke-width="2"/>')

    if res.sheet is not None:
        for a, b in res.sheet.creases():
            out.append(line("crease", a, b, 'stroke="#666" stroke-width="1" '
                            'stroke-dasharray="6 4"'))

    gs = res.post_seal if res.post_seal is not None else res.pre_seal
    paths = res.chain.geodesics if res.chain is not None else gs.geodesics
    for g in paths:
        d = " L ".join(f"{sx(p)},{sy(p)}" for p in g.points)
        out.append(f'<path class="geodesic" d="M {d}" fill="none" '
                   f'stroke="blue" stroke-width="1.5"/>')

    for i, j in spec.edges:
        out.append(line("cut", spec.vertices[i], spec.vertices[j],
                        'stroke="red" stroke-width="2"'))

    for p in (spec.p, spec.q):
        out.append(f'<circle class="endpoint" cx="{sx(p)}" cy="{sy(p)}" '
                   f'r="4" fill="black"/>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
