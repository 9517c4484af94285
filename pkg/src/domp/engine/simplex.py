"""Bounded-variable primal simplex over the [0, 1] box.

Equality standard form with one slack per row and an artificial tail for
rows whose slack basis starts infeasible.  Two phases share the same pivot
kernel (``backends.*.lp_phase``); the driver owns refactorization (dense
basis inverse rebuilt every block of pivots and on phase exit), the
degeneracy-triggered switch to Bland's rule, and a from-scratch Bland retry
on pivot breakdown.  Deterministic for a fixed model: largest-coefficient
pricing with first-index ties throughout.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .. import backends
from ..errors import NumericalFailure
from ..models import MilpModel, Row, SENSE_EQ, SENSE_GE, SENSE_LE

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_ITERLIMIT = "iterlimit"

_PH_OPTIMAL = 0
_PH_BUDGET = 1
_PH_BREAKDOWN = 2
_PH_UNBOUNDED = 3


@dataclasses.dataclass
class LpOptions:
    max_iters: int = 200_000
    refresh: int = 256              # pivots between refactorizations
    tol_cost: float = 1e-9          # reduced-cost optimality tolerance
    tol_piv: float = 1e-9           # smallest usable pivot magnitude
    tol_zero: float = 1e-12         # step size below which a pivot counts as degenerate
    feas_tol: float = 1e-7          # row residual tolerance at optimality
    bland_factor: int = 10          # degenerate pivots per model variable before Bland


@dataclasses.dataclass
class LpSolution:
    """Outcome of one LP solve; ``x`` holds the structural variables only."""

    status: str
    objective: float
    x: np.ndarray
    iterations: int


class _Breakdown(Exception):
    pass


class StandardForm:
    """Cached equality-form matrices for a fixed row set.

    Column layout: ``nv`` structurals, then ``m`` slacks, then ``m``
    artificials (single +/-1 entries whose sign is fixed per solve from the
    initial residual).  Rebuilt whenever rows are appended; bounds changes
    between branch-and-bound nodes reuse the cache.
    """

    def __init__(self, num_vars: int, rows: list[Row]):
        self.nv = num_vars
        self.m = m = len(rows)
        self.ncols = num_vars + 2 * m
        ridx = [row.indices for row in rows]
        rval = [row.values for row in rows]
        rown = [np.full(row.indices.size, r, dtype=np.int64)
                for r, row in enumerate(rows)]
        cols = np.concatenate(ridx) if ridx else np.zeros(0, dtype=np.int64)
        vals = np.concatenate(rval) if rval else np.zeros(0)
        rws = np.concatenate(rown) if rown else np.zeros(0, dtype=np.int64)
        # slack then artificial tails: one entry per row, on the diagonal
        tail_rows = np.arange(m, dtype=np.int64)
        cols = np.concatenate([cols, num_vars + tail_rows, num_vars + m + tail_rows])
        vals = np.concatenate([vals, np.ones(m), np.ones(m)])
        rws = np.concatenate([rws, tail_rows, tail_rows])
        order = np.argsort(cols, kind="stable")
        self.colids = np.ascontiguousarray(cols[order])
        self.rowidx = np.ascontiguousarray(rws[order])
        self._data0 = np.ascontiguousarray(vals[order])
        counts = np.bincount(self.colids, minlength=self.ncols)
        self.indptr = np.zeros(self.ncols + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self._art_pos = np.empty(m, dtype=np.int64)
        for r in range(m):
            self._art_pos[r] = self.indptr[num_vars + m + r]
        self.rhs = np.array([row.rhs for row in rows], dtype=np.float64)
        self.senses = np.array([row.sense for row in rows], dtype=np.int64)
        # slack bounds by sense: <= in [0, inf), = fixed at 0, >= in (-inf, 0]
        self.slack_lb = np.where(self.senses == SENSE_GE, -np.inf, 0.0)
        self.slack_ub = np.where(self.senses == SENSE_LE, np.inf, 0.0)

    def _matvec(self, data: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.bincount(self.rowidx, weights=data * x[self.colids],
                           minlength=self.m)

    def _refactor(self, data, basis, x):
        bpos = np.full(self.ncols, -1, dtype=np.int64)
        bpos[basis] = np.arange(self.m, dtype=np.int64)
        mask = bpos[self.colids] >= 0
        bmat = np.zeros((self.m, self.m))
        bmat[self.rowidx[mask], bpos[self.colids[mask]]] = data[mask]
        try:
            binv = np.linalg.inv(bmat)
        except np.linalg.LinAlgError as exc:
            raise _Breakdown("singular basis") from exc
        xn = x.copy()
        xn[basis] = 0.0
        x[basis] = binv @ (self.rhs - self._matvec(data, xn))
        return binv

    def _drive(self, data, cvec, lb, ub, basis, vstat, x, binv, state, opts):
        """Run one phase to proven optimality, refactoring periodically."""
        kern = backends.active.lp_phase
        confirmed = 0
        while True:
            budget = min(opts.refresh, opts.max_iters - state["iters"])
            if budget <= 0:
                return STATUS_ITERLIMIT, binv
            code, it, dg = kern(self.indptr, self.rowidx, data, self.colids,
                                cvec, lb, ub, basis, vstat, x, binv,
                                state["bland"], budget,
                                opts.tol_cost, opts.tol_piv, opts.tol_zero)
            state["iters"] += it
            state["degen"] += dg
            if not state["bland"] and state["degen"] > opts.bland_factor * self.nv:
                state["bland"] = True
            if code == _PH_OPTIMAL:
                binv = self._refactor(data, basis, x)
                if it == 0 and confirmed > 0:
                    return STATUS_OPTIMAL, binv
                confirmed += 1
                if confirmed >= 8:
                    return STATUS_OPTIMAL, binv
                continue
            confirmed = 0
            if code == _PH_BUDGET:
                binv = self._refactor(data, basis, x)
                continue
            if code == _PH_UNBOUNDED:
                return STATUS_UNBOUNDED, binv
            raise _Breakdown("pivot breakdown")

    def _solve_once(self, c, lb_struct, ub_struct, opts, bland0):
        nv, m = self.nv, self.m
        ncols = self.ncols
        data = self._data0.copy()
        lb = np.concatenate([lb_struct, self.slack_lb, np.zeros(m)])
        ub = np.concatenate([ub_struct, self.slack_ub, np.zeros(m)])
        x = np.zeros(ncols)
        x[:nv] = lb_struct
        vstat = np.zeros(ncols, dtype=np.int8)
        vstat[nv:nv + m][self.senses == SENSE_GE] = 1   # those slacks sit at ub = 0
        resid = self.rhs - self._matvec(data, x)
        basis = np.empty(m, dtype=np.int64)
        art_used = np.zeros(m, dtype=bool)
        binv = np.eye(m)
        for r in range(m):
            v = resid[r]
            if self.slack_lb[r] - 1e-11 <= v <= self.slack_ub[r] + 1e-11:
                sid = nv + r
                basis[r] = sid
                x[sid] = min(max(v, self.slack_lb[r]), self.slack_ub[r])
                vstat[sid] = 2
            else:
                aid = nv + m + r
                if v < 0.0:
                    data[self._art_pos[r]] = -1.0
                    binv[r, r] = -1.0   # initial basis is diag(+-1), not I
                basis[r] = aid
                x[aid] = abs(v)
                ub[aid] = np.inf
                vstat[aid] = 2
                art_used[r] = True
        state = {"iters": 0, "degen": 0, "bland": bland0}
        rhs_scale = 1.0 + (np.max(np.abs(self.rhs)) if m else 0.0)
        if art_used.any():
            c1 = np.zeros(ncols)
            c1[nv + m:][art_used] = 1.0
            status, binv = self._drive(data, c1, lb, ub, basis, vstat, x,
                                       binv, state, opts)
            if status != STATUS_OPTIMAL:
                return LpSolution(status, float("nan"), x[:nv].copy(), state["iters"])
            if float(x[nv + m:][art_used].sum()) > opts.feas_tol * rhs_scale:
                return LpSolution(STATUS_INFEASIBLE, float("nan"),
                                  x[:nv].copy(), state["iters"])
            ub[nv + m:] = 0.0   # pin artificials for phase 2
        c2 = np.zeros(ncols)
        c2[:nv] = c
        status, binv = self._drive(data, c2, lb, ub, basis, vstat, x,
                                   binv, state, opts)
        if status != STATUS_OPTIMAL:
            return LpSolution(status, float("nan"), x[:nv].copy(), state["iters"])
        resid = np.abs(self._matvec(data, x) - self.rhs)
        if resid.size and resid.max() > opts.feas_tol * rhs_scale:
            raise _Breakdown(f"residual {resid.max():.3e} above tolerance")
        if np.any(x < lb - 1e-9) or np.any(x > ub + 1e-9):
            raise _Breakdown("bound violation above tolerance")
        obj = float(np.dot(c, x[:nv]))
        return LpSolution(STATUS_OPTIMAL, obj, x[:nv].copy(), state["iters"])

    def solve(self, c, lb_struct, ub_struct, opts: LpOptions) -> LpSolution:
        """Two-phase solve; retries once from scratch under Bland's rule."""
        try:
            return self._solve_once(c, lb_struct, ub_struct, opts, False)
        except _Breakdown:
            pass
        try:
            return self._solve_once(c, lb_struct, ub_struct, opts, True)
        except _Breakdown as exc:
            raise NumericalFailure(f"simplex failed twice: {exc}") from exc


def solve_lp(model: MilpModel, lower=None, upper=None, extra_rows=(),
             options: LpOptions | None = None) -> LpSolution:
    """Solve the LP relaxation of ``model`` (plus any extra rows)."""
    rows = list(model.rows) + list(extra_rows)
    sf = StandardForm(model.num_vars, rows)
    lb = model.lower if lower is None else np.asarray(lower, dtype=np.float64)
    ub = model.upper if upper is None else np.asarray(upper, dtype=np.float64)
    return sf.solve(model.objective, lb, ub, options or LpOptions())
