"""Separation of the strong order constraints.

``separate_soc`` is the O(n^3) telescoping scan; ``separate_soc_naive``
re-evaluates every left-hand side from scratch and exists to cross-check
the scan.  Both report the violated (rank threshold, position) pairs in
ascending (position, threshold) order together with their lhs values.

For integral candidate points the values are snapped to exact 0/1 before
scanning, every lhs is then an integer, and the threshold comparison is
exact: any cutoff in [1, 2) accepts a point iff it satisfies the whole
family, which is what makes lazy separation of integer candidates sound.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import backends
from .errors import IndexOutOfRange, NotIntegral, ThresholdOutOfRange
from .instance import RankStructure
from .models import SocCut, VarMap
from .objective import OrderedSolution

FRACTIONAL_EPS = 1e-6   # violation tolerance on fractional points
INT_TOL = 1e-6          # integrality recognition tolerance


@dataclasses.dataclass(frozen=True)
class Point:
    """A primal point of any of the formulations, shaped by (i, j, k)."""

    x: np.ndarray          # (n, n, n) float64, x[i, j, k]
    y: np.ndarray          # (n,) float64
    is_integral: bool

    @property
    def n(self) -> int:
        return self.y.shape[0]


def point_from_flat(flat: np.ndarray, n: int, int_tol: float = INT_TOL) -> Point:
    """Reshape a flat engine vector into a Point; flags integrality."""
    x = np.asarray(flat[:n ** 3], dtype=np.float64).reshape(n, n, n).copy()
    y = np.asarray(flat[n ** 3:n ** 3 + n], dtype=np.float64).copy()
    integral = bool(np.all(np.abs(flat - np.rint(flat)) <= int_tol))
    return Point(x=x, y=y, is_integral=integral)


def point_from_solution(sol: OrderedSolution, n: int) -> Point:
    """Exact 0/1 point induced by an ordered solution."""
    x = np.zeros((n, n, n))
    for k, (i, j) in enumerate(sol.positions):
        x[i, j, k] = 1.0
    y = np.zeros(n)
    for j in sol.open_set:
        y[j] = 1.0
    return Point(x=x, y=y, is_integral=True)


@dataclasses.dataclass
class SeparationResult:
    """Violated cuts with their lhs values and scan work counters."""

    cuts: list[SocCut]
    lhs_values: list[float]
    checks: int                      # (l, k) pairs examined: (n-1) * n^2
    updates: int                     # incremental lhs updates performed
    debug_lhs: np.ndarray | None = None   # (n-1, n^2) grid when collected


def _ranked_values(point: Point, ranks: RankStructure) -> np.ndarray:
    """Gather x into rank order: out[l - 1, k - 1] = x[pair(l), k]."""
    pa = ranks.pair_at
    xr = np.ascontiguousarray(point.x[pa[:, 0], pa[:, 1], :], dtype=np.float64)
    if point.is_integral:
        xr = np.rint(xr)
    return xr


def _check_threshold(b: float) -> None:
    if not 1.0 <= b < 2.0:
        raise ThresholdOutOfRange(f"threshold must be in [1, 2), got {b}")


def lhs_direct(point: Point, ell: int, k: int, ranks: RankStructure) -> float:
    """Reference evaluation of one left-hand side by its double sum."""
    n = ranks.n
    nsq = n * n
    if not 1 <= ell <= nsq:
        raise IndexOutOfRange(f"ell must be in 1..{nsq}, got {ell}")
    if not 2 <= k <= n:
        raise IndexOutOfRange(f"k must be in 2..{n}, got {k}")
    pa = ranks.pair_at
    x = np.rint(point.x) if point.is_integral else point.x
    low = float(x[pa[:ell, 0], pa[:ell, 1], k - 1].sum())
    high = float(x[pa[ell - 1:, 0], pa[ell - 1:, 1], k - 2].sum())
    return low + high


def separate_soc(point: Point, ranks: RankStructure, threshold: float = 1.0,
                 collect_lhs: bool = False) -> SeparationResult:
    """Find every violated order row with the telescoping scan.

    Fractional points are tested against ``threshold + 1e-6``; integral
    points are snapped to 0/1 and tested against ``threshold`` exactly.
    """
    _check_threshold(threshold)
    xr = _ranked_values(point, ranks)
    eps = 0.0 if point.is_integral else FRACTIONAL_EPS
    ells, ks, lhss, checks, grid = backends.active.soc_scan(
        xr, float(threshold), eps, collect_lhs)
    cuts = [SocCut(ell=int(e), k=int(k)) for e, k in zip(ells, ks)]
    return SeparationResult(cuts=cuts, lhs_values=[float(v) for v in lhss],
                            checks=checks, updates=max(0, checks - 1),
                            debug_lhs=grid if collect_lhs else None)


def separate_soc_naive(point: Point, ranks: RankStructure,
                       threshold: float = 1.0) -> SeparationResult:
    """Enumerative baseline: evaluate every lhs from scratch.

    Same contract as :func:`separate_soc`; O(n^2) work per row instead of
    O(1), kept for cross-checking.
    """
    _check_threshold(threshold)
    n = ranks.n
    eps = 0.0 if point.is_integral else FRACTIONAL_EPS
    cuts: list[SocCut] = []
    lhss: list[float] = []
    checks = 0
    for k in range(2, n + 1):
        for ell in range(1, n * n + 1):
            lhs = lhs_direct(point, ell, k, ranks)
            checks += 1
            if lhs > threshold + eps:
                cuts.append(SocCut(ell=ell, k=k))
                lhss.append(lhs)
    return SeparationResult(cuts=cuts, lhs_values=lhss, checks=checks, updates=0)


def position_ranks(point: Point, ranks: RankStructure) -> np.ndarray:
    """Rank of the active pair in each sorted slot of an integral point."""
    if not point.is_integral:
        raise NotIntegral("position ranks need an integral point")
    n = ranks.n
    x = np.rint(point.x)
    out = np.empty(n, dtype=np.int64)
    for k in range(n):
        ii, jj = np.nonzero(x[:, :, k])
        if ii.size != 1:
            raise NotIntegral(f"slot {k + 1} holds {ii.size} pairs, expected 1")
        out[k] = ranks.rank[ii[0], jj[0]]
    return out


def check_ordered_feasibility(solution, ranks: RankStructure) -> bool:
    """True iff the slot ranks are nondecreasing, i.e. no order row is violated.

    Accepts an integral :class:`Point` or an :class:`OrderedSolution`.
    Equivalent, for integral base-feasible points, to an empty separation.
    """
    if isinstance(solution, OrderedSolution):
        pr = np.array([ranks.rank[i, j] for i, j in solution.positions])
    else:
        pr = position_ranks(solution, ranks)
    return bool(np.all(np.diff(pr) >= 0))
