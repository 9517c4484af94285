"""End-to-end solution procedures and the warm-start heuristic.

Four ways to the same optimum:

* ``solve_full("soc")``    the complete set-packing order formulation,
* ``solve_full("woc")``    the aggregated order formulation,
* ``solve_branch_and_cut`` the aggregated formulation with set-packing
  order rows separated at the root only (cut-and-branch),
* ``solve_row_generation`` the order-free relaxation with order rows added
  lazily: fractional separation at the root, exact separation of every
  integral candidate at threshold ``b``.

Every report is finalized through :func:`objective.evaluate`, so reported
values compare exactly against the brute-force oracle.
"""

from __future__ import annotations

import copy
import dataclasses

import numpy as np

from .engine import BnbConfig, Hooks, SolveReport, branch_and_bound, \
    callback_strategy, pool_strategy
from .errors import InternalError, SizeGuard, ThresholdOutOfRange
from .instance import Instance, compute_ranks
from .models import build_relax_model, build_soc_model, build_woc_model, \
    enumerate_soc_cuts
from .objective import OpenSet, OrderedSolution, evaluate, ordered_value
from .separation import check_ordered_feasibility, point_from_flat

FULL_SIZE_GUARD = 40


def _config(config: BnbConfig | None, strategy: str | None = None,
            b: float | None = None) -> BnbConfig:
    cfg = copy.deepcopy(config) if config is not None else BnbConfig()
    if strategy is not None:
        cfg.strategy = strategy
    if b is not None:
        if not 1.0 <= b < 2.0:
            raise ThresholdOutOfRange(f"b must be in [1, 2), got {b}")
        cfg.b = b
    cfg.__post_init__()
    return cfg


def _strategy_hooks(instance: Instance, ranks, cfg: BnbConfig) -> Hooks:
    if cfg.strategy == "pool":
        return pool_strategy(enumerate_soc_cuts(ranks), ranks, cfg)
    if cfg.strategy == "callback":
        return callback_strategy(ranks, cfg)
    raise ValueError(f"unknown strategy {cfg.strategy!r}")


def _finalize(report: SolveReport, instance: Instance) -> SolveReport:
    """Canonicalize the incumbent through ``evaluate`` and refresh the gaps."""
    sol = None
    if report.incumbent_x is not None:
        y = report.incumbent_x[instance.n ** 3:]
        sol = evaluate(instance, OpenSet(tuple(int(j) for j in np.nonzero(y > 0.5)[0])))
    elif isinstance(report.incumbent, OrderedSolution):
        sol = report.incumbent
    if sol is not None:
        report.incumbent = sol
        report.value = sol.value
        report.best_bound = min(report.best_bound, sol.value)
        scale = max(abs(report.value), 1e-10)
        report.gap_pct = 100.0 * max(0.0, report.value - report.best_bound) / scale
        report.gap_root_pct = 100.0 * max(0.0, report.value - report.root_bound) / scale
    return report


def warm_start_heuristic(instance: Instance, iterations: int = 50,
                         alpha: float = 0.3, seed: int = 0) -> OrderedSolution:
    """Greedy randomized construction plus first-improving swap search.

    Construction opens sites one at a time, drawing uniformly from the
    candidates whose marginal objective lies within ``alpha`` of the best
    (``alpha = 0`` collapses to the deterministic greedy).  ``iterations``
    counts randomized restarts; 0 returns the bare construction without
    local search.  Always feasible, deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    n, p = instance.n, instance.p
    lam = instance.lam

    def partial_value(sites: list[int]) -> float:
        costs = instance.c[:, sites].min(axis=1)
        costs.sort()
        return ordered_value(lam, costs)

    def construct() -> list[int]:
        sites: list[int] = []
        while len(sites) < p:
            cands = [j for j in range(n) if j not in sites]
            scores = np.array([partial_value(sites + [j]) for j in cands])
            if alpha <= 0.0:
                pick = cands[int(np.argmin(scores))]
            else:
                lo, hi = float(scores.min()), float(scores.max())
                rcl = [cands[t] for t in range(len(cands))
                       if scores[t] <= lo + alpha * (hi - lo)]
                pick = rcl[int(rng.integers(len(rcl)))]
            sites.append(pick)
        return sorted(sites)

    def local_search(sites: list[int]) -> list[int]:
        best = partial_value(sites)
        improved = True
        while improved:
            improved = False
            for out in list(sites):
                for inn in range(n):
                    if inn in sites:
                        continue
                    trial = sorted(s for s in sites if s != out) + [inn]
                    trial.sort()
                    val = partial_value(trial)
                    if val < best:
                        sites, best = trial, val
                        improved = True
                        break
                if improved:
                    break
        return sites

    if iterations <= 0:
        return evaluate(instance, construct())
    best_sol = None
    for _ in range(iterations):
        sites = local_search(construct())
        sol = evaluate(instance, sites)
        if best_sol is None or sol.value < best_sol.value:
            best_sol = sol
    return best_sol


def solve_full(instance: Instance, formulation: str = "soc",
               config: BnbConfig | None = None, size_guard: int = FULL_SIZE_GUARD,
               warm_start: bool = True) -> SolveReport:
    """Plain branch-and-bound on a complete order formulation.

    The full set-packing family has order n^3 rows, so the build is refused
    beyond ``size_guard`` clients (override deliberately for bigger runs).
    """
    if instance.n > size_guard:
        raise SizeGuard(
            f"full {formulation} formulation at n={instance.n} exceeds the "
            f"guard ({size_guard}); pass size_guard explicitly to override")
    cfg = _config(config)
    ranks = compute_ranks(instance)
    if formulation == "soc":
        model = build_soc_model(instance, ranks)
    elif formulation == "woc":
        model = build_woc_model(instance, ranks)
    else:
        raise ValueError(f"formulation must be 'soc' or 'woc', got {formulation!r}")
    ws = warm_start_heuristic(instance) if warm_start else None
    report = branch_and_bound(model, hooks=None, warm_start=ws, config=cfg)
    return _finalize(report, instance)


def solve_branch_and_cut(instance: Instance, strategy: str = "callback",
                         config: BnbConfig | None = None,
                         warm_start: bool = True) -> SolveReport:
    """Cut-and-branch: aggregated base, set-packing order rows at the root.

    Integral candidates are already order-feasible under the aggregated
    rows; that reliance is executed as an assertion, not a rejection path.
    """
    cfg = _config(config, strategy=strategy)
    ranks = compute_ranks(instance)
    model = build_woc_model(instance, ranks)
    sep = _strategy_hooks(instance, ranks, cfg)

    def assert_ordered(flat):
        point = point_from_flat(flat, instance.n)
        if not check_ordered_feasibility(point, ranks):
            raise InternalError(
                "integral candidate violates the order rows despite the "
                "aggregated formulation; this is a solver bug")
        return []

    hooks = Hooks(on_root_fractional=sep.on_root_fractional,
                  on_integer_candidate=assert_ordered,
                  pool_size=sep.pool_size)
    ws = warm_start_heuristic(instance) if warm_start else None
    report = branch_and_bound(model, hooks=hooks, warm_start=ws, config=cfg)
    return _finalize(report, instance)


def solve_row_generation(instance: Instance, strategy: str = "callback",
                         b: float | None = None, config: BnbConfig | None = None,
                         warm_start: bool = True) -> SolveReport:
    """Row generation on the order-free relaxation.

    Fractional root points are separated at threshold 1 (plus tolerance);
    integral candidates anywhere in the tree are separated exactly at
    threshold ``b`` in [1, 2) and rejected while violated, which certifies
    the final incumbent against the whole order family.
    """
    cfg = _config(config, strategy=strategy, b=b)
    ranks = compute_ranks(instance)
    model = build_relax_model(instance, ranks)
    hooks = _strategy_hooks(instance, ranks, cfg)
    ws = warm_start_heuristic(instance) if warm_start else None
    report = branch_and_bound(model, hooks=hooks, warm_start=ws, config=cfg)
    return _finalize(report, instance)
