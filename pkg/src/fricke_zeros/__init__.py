"""Zeros of Poincare series for the Fricke groups of level 2 and 3 on the lower arc."""

from .modular_core import (
    EllipticOrders,
    FrickeLevel,
    GroupElement,
    MonomialWeight,
    complete_to_matrix,
    elliptic_orders,
    fricke_level,
    fricke_point,
    mobius,
    valence_total,
)
from .poincare import ArcSample, EvalParams, eval_F, eval_F_grid, eval_F_tail, eval_g, eval_G, eval_h_terms
from .zeros import ZeroReport, refine, scan, verify_theorem

__all__ = [
    "ArcSample",
    "EllipticOrders",
    "EvalParams",
    "FrickeLevel",
    "GroupElement",
    "MonomialWeight",
    "ZeroReport",
    "complete_to_matrix",
    "elliptic_orders",
    "eval_F",
    "eval_F_grid",
    "eval_F_tail",
    "eval_G",
    "eval_g",
    "eval_h_terms",
    "fricke_level",
    "fricke_point",
    "mobius",
    "refine",
    "scan",
    "valence_total",
    "verify_theorem",
]
