"""LP-based branch-and-bound with root cutting and lazy rows.

Best-bound node selection; branching on the most fractional variable with
opening variables preferred over assignment variables and ties to the
lowest id.  Hooks drive the two cut channels:

* ``on_root_fractional``  called on fractional root solutions, alternating
  with LP re-solves until it returns nothing or the round limit is hit;
  never called below the root,
* ``on_integer_candidate`` called on every integral LP solution anywhere in
  the tree; returned rows are appended globally and the node is re-solved,
  an empty return accepts the candidate as the new incumbent.

Appended rows must be valid for every feasible integral point, so stored
node bounds stay valid when rows arrive later.
"""

from __future__ import annotations

import dataclasses
import heapq
import time
from typing import Callable

import numpy as np

from ..errors import NumericalFailure
from ..models import MilpModel, Row
from .simplex import LpOptions, StandardForm, STATUS_INFEASIBLE, STATUS_OPTIMAL

STATUS_TIMELIMIT = "timelimit"
STATUS_NODELIMIT = "nodelimit"


@dataclasses.dataclass
class BnbConfig:
    """Engine knobs; limits are wall-clock seconds, node pops, and cut caps."""

    time_limit: float = 3600.0
    node_limit: int = 10_000_000
    int_tol: float = 1e-6
    mip_gap: float = 1e-6
    root_rounds: int = 50
    cuts_per_round: int = 500
    strategy: str = "callback"      # "pool" or "callback"
    b: float = 1.0                  # integral-candidate violation threshold
    lp: LpOptions = dataclasses.field(default_factory=LpOptions)
    track_bounds: bool = False

    def __post_init__(self):
        if self.time_limit <= 0 or self.node_limit <= 0:
            raise ValueError("limits must be positive")
        if self.root_rounds < 0 or self.cuts_per_round <= 0:
            raise ValueError("cut limits must be nonnegative/positive")
        if not 1.0 <= self.b < 2.0:
            raise ValueError(f"b must be in [1, 2), got {self.b}")


@dataclasses.dataclass
class Hooks:
    """Cut callbacks; either may be None for a plain branch-and-bound."""

    on_root_fractional: Callable | None = None
    on_integer_candidate: Callable | None = None
    pool_size: int | None = None


@dataclasses.dataclass
class SolveReport:
    """Outcome of one solve; bounds follow gap = 100 (UB - LB) / |UB|."""

    status: str
    value: float                    # incumbent objective (upper bound)
    best_bound: float               # proven lower bound
    gap_root_pct: float
    gap_pct: float
    nodes: int
    cuts_added: int
    orig_cons: int
    wall_time: float
    root_bound: float = float("-inf")   # LP bound when root processing ended
    incumbent: object | None = None         # OrderedSolution, filled by methods
    incumbent_x: np.ndarray | None = None   # flat integral point found by the tree
    cut_rows: list = dataclasses.field(default_factory=list)
    bounds_trace: list = dataclasses.field(default_factory=list)


def _gap_pct(ub: float, lb: float) -> float:
    if not np.isfinite(ub):
        return float("inf")
    return 100.0 * max(0.0, ub - lb) / max(abs(ub), 1e-10)


class _Timeout(Exception):
    pass


def branch_and_bound(model: MilpModel, hooks: Hooks | None = None,
                     warm_start=None, config: BnbConfig | None = None) -> SolveReport:
    """Solve ``model`` to proven optimality within the configured limits.

    ``warm_start`` installs an initial incumbent (any object with a
    ``value`` attribute, normally an OrderedSolution).
    """
    config = config or BnbConfig()
    hooks = hooks or Hooks()
    t0 = time.perf_counter()
    deadline = t0 + config.time_limit
    rows: list[Row] = list(model.rows)
    sf = StandardForm(model.num_vars, rows)
    cut_rows: list[Row] = []

    ub = float(warm_start.value) if warm_start is not None else float("inf")
    incumbent_x: np.ndarray | None = None
    nodes = 0
    trace: list[tuple[float, float]] = []

    def check_time():
        if time.perf_counter() > deadline:
            raise _Timeout()

    def add_rows(new_rows):
        nonlocal sf
        rows.extend(new_rows)
        cut_rows.extend(new_rows)
        sf = StandardForm(model.num_vars, rows)

    def lp(lb, ubv):
        sol = sf.solve(model.objective, lb, ubv, config.lp)
        if sol.status not in (STATUS_OPTIMAL, STATUS_INFEASIBLE):
            raise NumericalFailure(f"node LP ended with status {sol.status}")
        return sol

    def prune_eps() -> float:
        return 1e-9 * max(1.0, abs(ub)) if np.isfinite(ub) else 0.0

    n3 = model.num_vars - model.n   # y block starts here

    def pick_branch_var(flat: np.ndarray) -> int:
        frac = np.abs(flat - np.rint(flat))
        yfrac = frac[n3:]
        if yfrac.max() > config.int_tol:
            return n3 + int(np.argmax(yfrac))
        return int(np.argmax(frac[:n3]))

    heap: list = []
    next_id = 0

    def push_children(lbv, ubv, var, bound):
        nonlocal next_id
        for fix in (0.0, 1.0):
            clb, cub = lbv.copy(), ubv.copy()
            clb[var] = fix
            cub[var] = fix
            heapq.heappush(heap, (bound, next_id, clb, cub))
            next_id += 1

    def process(lbv, ubv, is_root: bool):
        """Solve one node to closure or branching; returns its final LP bound."""
        nonlocal ub, incumbent_x, nodes
        check_time()
        sol = lp(lbv, ubv)
        nodes += 1
        rounds = 0
        while True:
            check_time()
            if sol.status == STATUS_INFEASIBLE:
                return None
            val = sol.objective
            if val >= ub - prune_eps():
                return val
            flat = sol.x
            frac = np.abs(flat - np.rint(flat))
            if float(frac.max()) <= config.int_tol:
                xi = np.rint(flat)
                new = hooks.on_integer_candidate(xi) if hooks.on_integer_candidate else []
                if new:
                    add_rows(new)
                    sol = lp(lbv, ubv)
                    continue
                cand = float(np.dot(model.objective, xi))
                if cand < ub:
                    ub = cand
                    incumbent_x = xi
                return val
            if is_root and hooks.on_root_fractional and rounds < config.root_rounds:
                new = hooks.on_root_fractional(flat)
                if new:
                    add_rows(new)
                    rounds += 1
                    sol = lp(lbv, ubv)
                    continue
            push_children(lbv, ubv, pick_branch_var(flat), val)
            return val

    status = STATUS_OPTIMAL
    root_lb = float("-inf")
    lb_now = float("-inf")
    try:
        root_val = process(model.lower.copy(), model.upper.copy(), True)
        if root_val is None:
            wall = time.perf_counter() - t0
            return SolveReport(status=STATUS_INFEASIBLE, value=float("inf"),
                               best_bound=float("inf"), gap_root_pct=0.0,
                               gap_pct=0.0, nodes=nodes, cuts_added=len(cut_rows),
                               orig_cons=len(model.rows), wall_time=wall,
                               cut_rows=cut_rows, bounds_trace=trace)
        root_lb = root_val
        while True:
            lb_now = heap[0][0] if heap else ub
            if config.track_bounds:
                trace.append((lb_now, ub))
            if np.isfinite(ub) and ub - lb_now <= config.mip_gap * max(abs(ub), 1e-10):
                status = STATUS_OPTIMAL
                break
            if not heap:
                status = STATUS_OPTIMAL
                break
            if nodes >= config.node_limit:
                status = STATUS_NODELIMIT
                break
            check_time()
            bound, _, lbv, ubv = heapq.heappop(heap)
            if bound >= ub - prune_eps():
                continue
            lb_now = bound
            process(lbv, ubv, False)
    except _Timeout:
        status = STATUS_TIMELIMIT

    if heap:
        lb_final = min(lb_now, heap[0][0]) if np.isfinite(lb_now) else heap[0][0]
    else:
        lb_final = ub if status == STATUS_OPTIMAL else lb_now
    if np.isfinite(ub):
        lb_final = min(lb_final, ub)
    if not np.isfinite(lb_final):
        lb_final = root_lb
    wall = time.perf_counter() - t0
    if not np.isfinite(ub) and status == STATUS_OPTIMAL and not heap:
        status = STATUS_INFEASIBLE
    return SolveReport(
        status=status,
        value=ub,
        best_bound=lb_final,
        gap_root_pct=_gap_pct(ub, root_lb),
        gap_pct=_gap_pct(ub, lb_final),
        nodes=nodes,
        cuts_added=len(cut_rows),
        orig_cons=len(model.rows),
        wall_time=wall,
        root_bound=root_lb,
        incumbent=warm_start if incumbent_x is None else None,
        incumbent_x=incumbent_x,
        cut_rows=cut_rows,
        bounds_trace=trace,
    )
