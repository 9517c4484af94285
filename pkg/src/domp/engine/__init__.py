"""LP relaxation engine and branch-and-bound with cut hooks."""

from .simplex import LpOptions, LpSolution, StandardForm, solve_lp, \
    STATUS_INFEASIBLE, STATUS_ITERLIMIT, STATUS_OPTIMAL, STATUS_UNBOUNDED
from .bnb import BnbConfig, Hooks, SolveReport, branch_and_bound, \
    STATUS_NODELIMIT, STATUS_TIMELIMIT
from .strategies import callback_strategy, pool_strategy

__all__ = [
    "LpOptions", "LpSolution", "StandardForm", "solve_lp",
    "BnbConfig", "Hooks", "SolveReport", "branch_and_bound",
    "callback_strategy", "pool_strategy",
    "STATUS_OPTIMAL", "STATUS_INFEASIBLE", "STATUS_UNBOUNDED",
    "STATUS_ITERLIMIT", "STATUS_TIMELIMIT", "STATUS_NODELIMIT",
]
