"""Kontsevich star products with harmonic angles: exact polyvector algebra,
graph weights by Monte Carlo, and cyclicity/closedness checks."""

from .poly import Polynomial
from .polyvector import PolyVector, VolumeForm
from .diffops import PolyDiffOperator
from .graphs import AdmissibleGraph, enumerate_graphs, star_graphs, top_edge_count
from .angles import (
    AngleContext,
    alpha_angle,
    alpha_angle_gradient,
    geodesic_angle,
    geodesic_angle_gradient,
    key_lemma_residual,
)
from .weights import (
    WeightEntry,
    WeightTable,
    compute_weight,
    default_threads,
    halfplane_weight,
    mixed_edge_integral,
)
from .star import (
    StarProduct,
    assemble_star,
    assemble_trilinear,
    check_alpha_independence,
    check_associative,
    check_closed,
    check_cyclic,
    graph_to_operator,
    star_apply,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleGraph",
    "AngleContext",
    "Polynomial",
    "PolyDiffOperator",
    "PolyVector",
    "StarProduct",
    "VolumeForm",
    "WeightEntry",
    "WeightTable",
    "alpha_angle",
    "alpha_angle_gradient",
    "assemble_star",
    "assemble_trilinear",
    "check_alpha_independence",
    "check_associative",
    "check_closed",
    "check_cyclic",
    "compute_weight",
    "default_threads",
    "enumerate_graphs",
    "geodesic_angle",
    "geodesic_angle_gradient",
    "graph_to_operator",
    "halfplane_weight",
    "key_lemma_residual",
    "mixed_edge_integral",
    "star_apply",
    "star_graphs",
    "top_edge_count",
    "__version__",
]
