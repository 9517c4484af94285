"""Exact solver for the discrete ordered median problem.

Pick p of n candidate sites to minimize a position-weighted sum of the
sorted client allocation costs.  The package bundles three MILP
formulations, an LP-based branch-and-bound engine with root cutting and
lazy rows, the O(n^3) order-constraint separation oracle, and a
brute-force enumeration ground truth.
"""

from .instance import Instance, RankStructure, compute_ranks, generate_instance, \
    load_instance, save_instance
from .objective import OpenSet, OrderedSolution, brute_force, evaluate, ordered_value
from .models import MilpModel, Row, SocCut, VarMap, build_base, build_relax_model, \
    build_soc_model, build_woc_model, enumerate_soc_cuts, materialize_cut, to_lp_string
from .separation import Point, SeparationResult, check_ordered_feasibility, lhs_direct, \
    point_from_flat, point_from_solution, separate_soc, separate_soc_naive

__all__ = [
    "Instance", "RankStructure", "compute_ranks", "generate_instance",
    "load_instance", "save_instance",
    "OpenSet", "OrderedSolution", "brute_force", "evaluate", "ordered_value",
    "MilpModel", "Row", "SocCut", "VarMap", "build_base", "build_relax_model",
    "build_soc_model", "build_woc_model", "enumerate_soc_cuts", "materialize_cut",
    "to_lp_string",
    "Point", "SeparationResult", "check_ordered_feasibility", "lhs_direct",
    "point_from_flat", "point_from_solution", "separate_soc", "separate_soc_naive",
]

__version__ = "0.1.0"
