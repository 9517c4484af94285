"""Pure-numpy builds of the hot kernels.

Vectorized equivalents of ``numba_backend``; selected with
``DOMP_BACKEND=numpy``.  Same signatures, same tie-breaking rules, results
agree with the numba build to within floating-point reassociation (the
subset enumeration agrees bit for bit).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

NAME = "numpy"

PHASE_OPTIMAL = 0
PHASE_BUDGET = 1
PHASE_BREAKDOWN = 2
PHASE_UNBOUNDED = 3


def soc_scan(xr, threshold, eps, collect):
    """Cumulative-sum form of the order-constraint scan.

    For position k and rank threshold l the lhs is
    ``sum(x^k over ranks <= l) + sum(x^{k-1} over ranks >= l)``; both sums
    come from one prefix-sum pass over the rank-ordered values.
    """
    nsq, n = xr.shape
    cs = np.cumsum(xr, axis=0)          # cs[l-1, k-1] = sum of x^k over ranks <= l
    tot = cs[-1, :]
    shifted = np.vstack((np.zeros((1, n)), cs[:-1, :]))   # sum over ranks <= l-1
    # grid[k-2, l-1] = lhs of pair (l, k), k = 2..n
    grid = cs[:, 1:].T + (tot[:-1][:, None] - shifted[:, :-1].T)
    mask = grid > threshold + eps
    krows, lcols = np.nonzero(mask)     # row-major: ascending (k, l)
    ells = (lcols + 1).astype(np.int64)
    ks = (krows + 2).astype(np.int64)
    lhss = grid[krows, lcols]
    checks = (n - 1) * nsq
    out_grid = grid if collect else np.zeros((0, 0), dtype=np.float64)
    return ells, ks, lhss, checks, out_grid


def eval_subsets(cmat, lam, p):
    """Lexicographic subset enumeration with a vectorized inner evaluation."""
    n = cmat.shape[0]
    best = np.inf
    best_j = np.arange(p, dtype=np.int64)
    for comb in combinations(range(n), p):
        costs = cmat[:, comb].min(axis=1)
        costs.sort()
        val = 0.0
        for k in range(n):
            val += lam[k] * costs[k]
        if val < best:
            best = val
            best_j = np.array(comb, dtype=np.int64)
    return best, best_j


def lp_phase(indptr, rowidx, data, colids, cvec, lb, ub,
             basis, vstat, x, binv, use_bland, max_iters,
             tol_cost, tol_piv, tol_zero):
    """Vectorized twin of ``numba_backend.lp_phase``; same pivot rules."""
    m = binv.shape[0]
    nn = cvec.shape[0]
    iters = 0
    degen = 0
    free = lb < ub
    while iters < max_iters:
        y = cvec[basis] @ binv
        d = cvec - np.bincount(colids, weights=data * y[rowidx], minlength=nn)
        at_lo = (vstat == 0) & free
        at_hi = (vstat == 1) & free
        if use_bland:
            elig = (at_lo & (d < -tol_cost)) | (at_hi & (d > tol_cost))
            if not elig.any():
                return PHASE_OPTIMAL, iters, degen
            q = int(np.argmax(elig))
        else:
            viol = np.where(at_lo, -d, np.where(at_hi, d, -np.inf))
            q = int(np.argmax(viol))
            if viol[q] <= tol_cost:
                return PHASE_OPTIMAL, iters, degen
        w = np.zeros(m)
        for t in range(indptr[q], indptr[q + 1]):
            w += data[t] * binv[:, rowidx[t]]
        tdir = 1.0 if vstat[q] == 0 else -1.0
        dvec = tdir * w
        xb = x[basis]
        lbb = lb[basis]
        ubb = ub[basis]
        # two-pass ratio test (see numba twin): expanded bounds first, then
        # the largest admissible pivot
        expand = 5e-10
        pos = dvec > tol_piv
        neg = dvec < -tol_piv
        steps_exp = np.full(m, np.inf)
        steps_exp[pos] = (xb[pos] - lbb[pos] + expand) / dvec[pos]
        steps_exp[neg] = (xb[neg] - ubb[neg] - expand) / dvec[neg]
        np.maximum(steps_exp, 0.0, out=steps_exp)
        smin = steps_exp.min() if m else np.inf
        step_q = ub[q] - lb[q]
        if step_q <= smin:
            if not np.isfinite(step_q):
                return PHASE_UNBOUNDED, iters, degen
            delta = step_q
            x[basis] = xb - delta * dvec
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
        if not np.isfinite(smin):
            return PHASE_UNBOUNDED, iters, degen
        steps = np.full(m, np.inf)
        steps[pos] = (xb[pos] - lbb[pos]) / dvec[pos]
        steps[neg] = (xb[neg] - ubb[neg]) / dvec[neg]
        np.maximum(steps, 0.0, out=steps)
        cand = np.nonzero(steps <= smin)[0]
        if use_bland:
            r = int(cand[np.argmin(basis[cand])])
        else:
            r = int(cand[np.argmax(np.abs(dvec[cand]))])
        piv = w[r]
        if abs(piv) <= tol_piv:
            return PHASE_BREAKDOWN, iters, degen
        delta = float(steps[r])
        lv = int(basis[r])
        dr = dvec[r]
        x[basis] = xb - delta * dvec
        x[q] = lb[q] + delta if vstat[q] == 0 else ub[q] - delta
        if dr > 0.0:
            x[lv] = lb[lv]
            vstat[lv] = 0
        else:
            x[lv] = ub[lv]
            vstat[lv] = 1
        br = binv[r] / piv
        binv -= np.outer(w, br)
        binv[r] = br
        basis[r] = q
        vstat[q] = 2
        if delta <= tol_zero:
            degen += 1
        iters += 1
    return PHASE_BUDGET, iters, degen
