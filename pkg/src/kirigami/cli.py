"""Command line front end for the staged pipeline."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import pipeline
from .errors import KirigamiError
from .geometry import EPS
from .model import load_spec

_STAGE_HELP = {
    "geodesics": "enumerate all shortest paths and report the distance",
    "seal": "also seal the cuts and re-enumerate",
    "order": "also sort the geodesics and decompose the domain",
    "fold": "also build the flat folding",
    "verify": "run everything and check the folding",
    "run": "run the whole pipeline (same as verify)",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kirigami",
        description="Geodesics, cut sealing and flat folding for a convex "
                    "sheet with straight cuts.")
    sub = ap.add_subparsers(dest="stage", required=True)
    for name, text in _STAGE_HELP.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--spec", required=True, metavar="FILE",
                        help="input JSON (domain, vertices, edges, p, q)")
        sp.add_argument("--eps", type=float, default=EPS,
                        help="geometric side-test tolerance")
        sp.add_argument("--json", dest="json_out", metavar="OUT",
                        help="write the canonical JSON document here")
        sp.add_argument("--svg", dest="svg_out", metavar="OUT",
                        help="write a drawing of the run here")
        sp.add_argument("--skip-seal", action="store_true",
                        help="fold the raw cuts without sealing first")
    return ap


def _summary(res: pipeline.PipelineResult) -> str:
    lines = []
    gs = res.post_seal if res.post_seal is not None else res.pre_seal
    lines.append(f"distance      {gs.distance!r}")
    lines.append(f"geodesics     {len(gs.geodesics)}"
                 + (" (tie near tolerance)" if gs.tie_flagged else ""))
    if res.seal_trace is not None:
        lines.append(f"seal steps    {len(res.seal_trace.steps)}"
                     f" (removed {len(res.seal_trace.removed_cuts)} cuts)")
    if res.decomposition is not None:
        dec = res.decomposition
        lines.append(f"regions       {len(dec.regions)}")
    if res.sheet is not None:
        lines.append(f"pieces        {len(res.sheet.pieces)}"
                     f" ({res.sheet.fold_count()} folds)")
    if res.verification is not None:
        v = res.verification
        lines.append("verification  " + ("ok" if v.ok else
                                         "FAILED: " + "; ".join(v.errors)))
    for name in pipeline.STAGES:
        if name in res.timings:
            lines.append(f"  {name:<10} {res.timings[name] * 1e3:8.1f} ms")
    return "\n".join(lines)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    until = "verify" if args.stage == "run" else args.stage
    try:
        spec = load_spec(args.spec)
        res = pipeline.run(spec, until=until, skip_seal=args.skip_seal,
                           eps=args.eps)
    except KirigamiError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(pipeline.to_json(res))
    if args.svg_out:
        with open(args.svg_out, "w", encoding="utf-8") as fh:
            fh.write(pipeline.to_svg(res))

    print(_summary(res))
    if res.diagnostic is not None:
        print(f"stopped at {res.stopped_at}: {res.diagnostic['message']}",
              file=sys.stderr)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
