"""Flat-folding construction: fold states, piece builders, assembly."""

from .state import FoldedState, Motion
from .regions import (FoldReport, FoldedSheet, fold_sheet, verify_immersion)

__all__ = ["FoldedState", "Motion", "FoldReport", "FoldedSheet",
           "fold_sheet", "verify_immersion"]
