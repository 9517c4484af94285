"""Numba builds of the hot kernels.

Loop-style implementations compiled with ``@njit(cache=True)``.  Each kernel
has a vectorized twin in ``numpy_backend``; the two must agree (see
``tests/test_backends.py``).  No fastmath: reassociation would change the
floating-point results that the reference oracles pin down.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

# lp_phase return codes
PHASE_OPTIMAL = 0
PHASE_BUDGET = 1
PHASE_BREAKDOWN = 2
PHASE_UNBOUNDED = 3


@njit(cache=True)
def soc_scan(xr, threshold, eps, collect):
    """Telescoping scan of all order-constraint left-hand sides.

    Parameters
    ----------
    xr : ndarray (n^2, n) of float64
        ``xr[l - 1, k - 1]`` is the value of the position-``k`` variable of
        the pair ranked ``l``.
    threshold : float
        Violation cutoff; a pair ``(l, k)`` is reported when
        ``lhs > threshold + eps``.
    eps : float
        Tolerance added on top of the threshold (0 for exact 0/1 points).
    collect : bool
        When true, also fill a dense (n-1, n^2) grid of every lhs value
        (row ``k - 2``, column ``l - 1``) for debugging.

    Returns
    -------
    ells, ks : int64 arrays of the violated (rank threshold, position) pairs
        in ascending (k, l) scan order.
    lhss : float64 array of the matching lhs values.
    checks : number of (l, k) pairs examined, always ``(n - 1) * n^2``.
    grid : the debug grid, shape (0, 0) unless ``collect``.

    The running lhs starts at ``sum(all position-1 values) + x^2 at rank 1``;
    each rank step adds the position-k value entering the lower sum and drops
    the position-(k-1) value leaving the upper sum, and each position step
    re-anchors at rank 1 by adding ``x^{k+1}`` of rank 1 and dropping
    ``x^{k-1}`` of rank n^2.
    """
    nsq, n = xr.shape
    cap = (n - 1) * nsq
    ells = np.empty(cap, dtype=np.int64)
    ks = np.empty(cap, dtype=np.int64)
    lhss = np.empty(cap, dtype=np.float64)
    if collect:
        grid = np.zeros((n - 1, nsq), dtype=np.float64)
    else:
        grid = np.zeros((0, 0), dtype=np.float64)
    nviol = 0
    checks = 0
    cut = threshold + eps
    if n < 2:
        return ells[:0].copy(), ks[:0].copy(), lhss[:0].copy(), 0, grid

    lhs = xr[0, 1]
    for l0 in range(nsq):
        lhs += xr[l0, 0]
    checks += 1
    if collect:
        grid[0, 0] = lhs
    if lhs > cut:
        ells[nviol] = 1
        ks[nviol] = 2
        lhss[nviol] = lhs
        nviol += 1
    for l0 in range(1, nsq):
        lhs += xr[l0, 1] - xr[l0 - 1, 0]
        checks += 1
        if collect:
            grid[0, l0] = lhs
        if lhs > cut:
            ells[nviol] = l0 + 1
            ks[nviol] = 2
            lhss[nviol] = lhs
            nviol += 1
    for kc in range(3, n + 1):
        lhs += xr[0, kc - 1] - xr[nsq - 1, kc - 3]
        checks += 1
        if collect:
            grid[kc - 2, 0] = lhs
        if lhs > cut:
            ells[nviol] = 1
            ks[nviol] = kc
            lhss[nviol] = lhs
            nviol += 1
        for l0 in range(1, nsq):
            lhs += xr[l0, kc - 1] - xr[l0 - 1, kc - 2]
            checks += 1
            if collect:
                grid[kc - 2, l0] = lhs
            if lhs > cut:
                ells[nviol] = l0 + 1
                ks[nviol] = kc
                lhss[nviol] = lhs
                nviol += 1
    return ells[:nviol].copy(), ks[:nviol].copy(), lhss[:nviol].copy(), checks, grid


@njit(cache=True)
def eval_subsets(cmat, lam, p):
    """Enumerate all p-subsets in lexicographic order; return the best.

    The objective per subset is accumulated in ascending slot order with a
    plain sequential sum, matching ``objective.ordered_value`` bit for bit.
    Strict improvement keeps the lexicographically smallest optimal subset.
    """
    n = cmat.shape[0]
    comb = np.arange(p, dtype=np.int64)
    best_j = comb.copy()
    costs = np.empty(n, dtype=np.float64)
    best = np.inf
    while True:
        for i in range(n):
            mval = cmat[i, comb[0]]
            for t in range(1, p):
                v = cmat[i, comb[t]]
                if v < mval:
                    mval = v
            costs[i] = mval
        costs.sort()
        val = 0.0
        for k in range(n):
            val += lam[k] * costs[k]
        if val < best:
            best = val
            best_j[:] = comb
        idx = p - 1
        while idx >= 0 and comb[idx] == idx + n - p:
            idx -= 1
        if idx < 0:
            break
        comb[idx] += 1
        for t in range(idx + 1, p):
            comb[t] = comb[t - 1] + 1
    return best, best_j


@njit(cache=True)
def lp_phase(indptr, rowidx, data, colids, cvec, lb, ub,
             basis, vstat, x, binv, use_bland, max_iters,
             tol_cost, tol_piv, tol_zero):
    """Run bounded-variable primal simplex iterations on one phase objective.

    The constraint matrix is CSC (``indptr``/``rowidx``/``data`` over all
    structural, slack and artificial columns; ``colids`` is the per-nonzero
    column id used only by the numpy twin).  ``basis`` (var id per row),
    ``vstat`` (0 nonbasic-at-lower, 1 nonbasic-at-upper, 2 basic), ``x`` and
    the dense basis inverse ``binv`` are updated in place.

    Entering rule: largest reduced-cost violation (first index on ties), or
    Bland's lowest eligible index when ``use_bland``.  Leaving rule: minimum
    ratio; ties prefer the largest pivot magnitude (Bland: lowest variable
    id).  A bound flip is taken whenever it is no longer than every basic
    ratio.

    Returns ``(code, iterations, degenerate_pivots)`` with code 0 = no
    entering candidate (phase optimal), 1 = iteration budget exhausted,
    2 = pivot breakdown, 3 = unbounded direction.
    """
    m = binv.shape[0]
    nn = cvec.shape[0]
    iters = 0
    degen = 0
    y = np.empty(m, dtype=np.float64)
    w = np.empty(m, dtype=np.float64)
    while iters < max_iters:
        # duals y = c_B @ binv
        for r in range(m):
            y[r] = 0.0
        for i in range(m):
            cb = cvec[basis[i]]
            if cb != 0.0:
                for r in range(m):
                    y[r] += cb * binv[i, r]
        # pricing fused with entering selection
        q = -1
        best = tol_cost
        for j in range(nn):
            vs = vstat[j]
            if vs == 2 or lb[j] == ub[j]:
                continue
            s = 0.0
            for t in range(indptr[j], indptr[j + 1]):
                s += data[t] * y[rowidx[t]]
            dj = cvec[j] - s
            viol = -dj if vs == 0 else dj
            if viol > best:
                best = viol
                q = j
                if use_bland:
                    break
        if q < 0:
            return PHASE_OPTIMAL, iters, degen
        # ftran w = binv @ a_q
        for i in range(m):
            w[i] = 0.0
        for t in range(indptr[q], indptr[q + 1]):
            v = data[t]
            r0 = rowidx[t]
            for i in range(m):
                w[i] += v * binv[i, r0]
        tdir = 1.0 if vstat[q] == 0 else -1.0
        # two-pass ratio test: pass 1 over bounds expanded by a feasibility
        # tolerance, pass 2 picks the largest pivot among admissible rows
        expand = 5e-10
        smin = np.inf
        for i in range(m):
            di = tdir * w[i]
            bi = basis[i]
            if di > tol_piv:
                s = (x[bi] - lb[bi] + expand) / di
            elif di < -tol_piv:
                s = (x[bi] - ub[bi] - expand) / di
            else:
                continue
            if s < 0.0:
                s = 0.0
            if s < smin:
                smin = s
        r = -1
        bestw = 0.0
        rstep = 0.0
        for i in range(m):
            di = tdir * w[i]
            bi = basis[i]
            if di > tol_piv:
                s = (x[bi] - lb[bi]) / di
            elif di < -tol_piv:
                s = (x[bi] - ub[bi]) / di
            else:
                continue
            if s < 0.0:
                s = 0.0
            if s <= smin:
                if use_bland:
                    if r < 0 or basis[i] < basis[r]:
                        r = i
                        rstep = s
                else:
                    aw = abs(di)
                    if aw > bestw:
                        bestw = aw
                        r = i
                        rstep = s
        step_q = ub[q] - lb[q]
        if step_q <= smin:
            # entering variable flips to its other bound
            if not np.isfinite(step_q):
                return PHASE_UNBOUNDED, iters, degen
            delta = step_q
            for i in range(m):
                if w[i] != 0.0:
                    x[basis[i]] -= delta * tdir * w[i]
            if vstat[q] == 0:
                x[q] = ub[q]
                vstat[q] = 1
            else:
                x[q] = lb[q]
                vstat[q] = 0
            if delta <= tol_zero:
                degen += 1
            iters += 1
            continue
        if r < 0:
            return PHASE_UNBOUNDED, iters, degen
        piv = w[r]
        if abs(piv) <= tol_piv:
            return PHASE_BREAKDOWN, iters, degen
        delta = rstep
        lv = basis[r]
        dr = tdir * w[r]
        for i in range(m):
            if w[i] != 0.0:
                x[basis[i]] -= delta * tdir * w[i]
        x[q] = lb[q] + delta if vstat[q] == 0 else ub[q] - delta
        if dr > 0.0:
            x[lv] = lb[lv]
            vstat[lv] = 0
        else:
            x[lv] = ub[lv]
            vstat[lv] = 1
        inv_p = 1.0 / piv
        for j2 in range(m):
            binv[r, j2] *= inv_p
        for i in range(m):
            if i != r:
                f = w[i]
                if f != 0.0:
                    for j2 in range(m):
                        binv[i, j2] -= f * binv[r, j2]
        basis[r] = q
        vstat[q] = 2
        if delta <= tol_zero:
            degen += 1
        iters += 1
    return PHASE_BUDGET, iters, degen
