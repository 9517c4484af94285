"""Cut-management strategies: a materialized pool versus the scan oracle.

Both produce :class:`~domp.engine.bnb.Hooks` with the same violation
semantics (fractional points at threshold 1 plus tolerance, integral
candidates at the configured threshold, exactly), so the two strategies
reach the same optima; they differ in memory and in how violated rows are
found.  The pool stores every order row up front and checks them by direct
evaluation; the callback runs the telescoping scan and materializes only
what it returns.  Each hook skips rows it already emitted and caps one
round at ``config.cuts_per_round``, in ascending (position, threshold)
order.
"""

from __future__ import annotations

import numpy as np

from ..instance import RankStructure
from ..models import SocCut, materialize_cut
from ..separation import FRACTIONAL_EPS, point_from_flat, separate_soc
from .bnb import BnbConfig, Hooks


def pool_strategy(all_cuts: list[SocCut], ranks: RankStructure,
                  config: BnbConfig) -> Hooks:
    """Hooks backed by a fully materialized cut pool.

    ``all_cuts`` is normally ``models.enumerate_soc_cuts(ranks)``; rows are
    materialized here, so the footprint grows with n^2 per stored cut.
    """
    pool = [(cut, materialize_cut(cut, ranks)) for cut in all_cuts]
    if pool:
        idx_cat = np.concatenate([row.indices for _, row in pool])
        row_of = np.concatenate([np.full(row.indices.size, t, dtype=np.int64)
                                 for t, (_, row) in enumerate(pool)])
    else:
        idx_cat = np.zeros(0, dtype=np.int64)
        row_of = np.zeros(0, dtype=np.int64)
    added: set[tuple[int, int]] = set()

    def scan(flat: np.ndarray, integral: bool):
        if not pool:
            return []
        lhs = np.bincount(row_of, weights=flat[idx_cat], minlength=len(pool))
        cutoff = config.b if integral else 1.0 + FRACTIONAL_EPS
        out = []
        for t in np.nonzero(lhs > cutoff)[0]:
            cut, row = pool[t]
            key = (cut.ell, cut.k)
            if key in added:
                continue
            added.add(key)
            out.append(row)
            if len(out) >= config.cuts_per_round:
                break
        return out

    return Hooks(on_root_fractional=lambda flat: scan(flat, False),
                 on_integer_candidate=lambda flat: scan(flat, True),
                 pool_size=len(pool))


def callback_strategy(ranks: RankStructure, config: BnbConfig) -> Hooks:
    """Hooks that run the telescoping separation and materialize on demand."""
    added: set[tuple[int, int]] = set()

    def run(flat: np.ndarray, integral: bool):
        point = point_from_flat(flat, ranks.n)
        res = separate_soc(point, ranks,
                           threshold=config.b if integral else 1.0)
        out = []
        for cut in res.cuts:
            key = (cut.ell, cut.k)
            if key in added:
                continue
            added.add(key)
            out.append(materialize_cut(cut, ranks))
            if len(out) >= config.cuts_per_round:
                break
        return out

    return Hooks(on_root_fractional=lambda flat: run(flat, False),
                 on_integer_candidate=lambda flat: run(flat, True))
