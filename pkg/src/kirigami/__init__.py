"""Geodesic distance, slit sealing and flat folding for convex sheets with cuts."""

from .folding import fold_sheet, verify_immersion
from .geodesics import all_geodesics
from .geometry import Point
from .model import KirigamiSpec, clean_spec, load_spec, validate
from .ordering import build_chain, decompose
from .pipeline import run
from .sealing import seal_all

__all__ = [
    "KirigamiSpec",
    "Point",
    "all_geodesics",
    "build_chain",
    "clean_spec",
    "decompose",
    "fold_sheet",
    "load_spec",
    "run",
    "seal_all",
    "validate",
    "verify_immersion",
]
