"""MILP formulations of the ordered median problem.

Three builders share a common base (assignment + position + opening rows):

* ``build_soc_model``   base plus every set-packing order row (0/1 matrix),
* ``build_woc_model``   base plus one aggregated order row per adjacent
  position pair (integer coefficients up to n^2),
* ``build_relax_model`` the order-free base itself, which is structurally
  the p-median model.

Variables: ``x[i, j, k] = 1`` when client ``i`` is served by site ``j`` and
that cost occupies sorted slot ``k``; ``y[j] = 1`` when site ``j`` opens.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import IndexOutOfRange
from .instance import Instance, RankStructure

SENSE_LE = 0
SENSE_EQ = 1
SENSE_GE = 2

_SENSE_TXT = {SENSE_LE: "<=", SENSE_EQ: "=", SENSE_GE: ">="}


@dataclasses.dataclass(frozen=True)
class VarMap:
    """Bijection between (kind, i, j, k) variable tuples and flat ids.

    Flat layout: the x block first (i major, then j, then k), then the n
    y variables.
    """

    n: int

    @property
    def num_vars(self) -> int:
        return self.n ** 3 + self.n

    def x_id(self, i: int, j: int, k: int) -> int:
        return (i * self.n + j) * self.n + k

    def y_id(self, j: int) -> int:
        return self.n ** 3 + j

    def decode(self, flat: int):
        n3 = self.n ** 3
        if flat >= n3:
            return ("y", flat - n3)
        i, rest = divmod(flat, self.n * self.n)
        j, k = divmod(rest, self.n)
        return ("x", i, j, k)


@dataclasses.dataclass(frozen=True)
class Row:
    """One sparse constraint row: sum(values * vars[indices]) sense rhs."""

    indices: np.ndarray   # int64
    values: np.ndarray    # float64
    sense: int
    rhs: float

    def __post_init__(self):
        self.indices.setflags(write=False)
        self.values.setflags(write=False)


@dataclasses.dataclass(frozen=True)
class SocCut:
    """A strong order row identified by rank threshold ``ell`` and position ``k``.

    Materializes to: sum of x at position ``k`` over ranks <= ell, plus the
    sum at position ``k - 1`` over ranks >= ell, at most 1.  The pair ranked
    ``ell`` appears in both sums.
    """

    ell: int   # 1..n^2
    k: int     # 2..n


@dataclasses.dataclass(frozen=True)
class MilpModel:
    """Solver-agnostic model container; all variables binary in [0, 1]."""

    formulation: str
    n: int
    p: int
    num_vars: int
    objective: np.ndarray
    rows: tuple[Row, ...]
    lower: np.ndarray
    upper: np.ndarray
    base_rows: int          # rows shared by every formulation
    order_rows: int         # order-enforcing rows on top of the base

    def __post_init__(self):
        self.objective.setflags(write=False)
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)

    @property
    def num_rows(self) -> int:
        return len(self.rows)


def _base_rows(instance: Instance, vm: VarMap) -> list[Row]:
    n = instance.n
    rows = []
    # each client served once, in one slot
    for i in range(n):
        idx = np.array([vm.x_id(i, j, k) for j in range(n) for k in range(n)],
                       dtype=np.int64)
        rows.append(Row(idx, np.ones(idx.size), SENSE_EQ, 1.0))
    # each sorted slot holds exactly one cost
    for k in range(n):
        idx = np.array([vm.x_id(i, j, k) for i in range(n) for j in range(n)],
                       dtype=np.int64)
        rows.append(Row(idx, np.ones(idx.size), SENSE_EQ, 1.0))
    # linking: a client uses site j only if j is open, and in at most one slot
    for i in range(n):
        for j in range(n):
            idx = np.array([vm.x_id(i, j, k) for k in range(n)] + [vm.y_id(j)],
                           dtype=np.int64)
            val = np.ones(idx.size)
            val[-1] = -1.0
            rows.append(Row(idx, val, SENSE_LE, 0.0))
    # exactly p open sites
    idx = np.array([vm.y_id(j) for j in range(n)], dtype=np.int64)
    rows.append(Row(idx, np.ones(n), SENSE_EQ, float(instance.p)))
    return rows


def _model(instance: Instance, rows, order_rows: int, tag: str) -> MilpModel:
    n = instance.n
    vm = VarMap(n)
    nv = vm.num_vars
    obj = np.zeros(nv)
    for i in range(n):
        for j in range(n):
            base = vm.x_id(i, j, 0)
            obj[base:base + n] = instance.lam * instance.c[i, j]
    return MilpModel(formulation=tag, n=n, p=instance.p, num_vars=nv,
                     objective=obj, rows=tuple(rows),
                     lower=np.zeros(nv), upper=np.ones(nv),
                     base_rows=len(rows) - order_rows, order_rows=order_rows)


def build_base(instance: Instance, ranks: RankStructure) -> MilpModel:
    """Shared assignment/position/opening rows; no order enforcement."""
    vm = VarMap(instance.n)
    return _model(instance, _base_rows(instance, vm), 0, "base")


def build_relax_model(instance: Instance, ranks: RankStructure) -> MilpModel:
    """The order-free relaxation; structurally the p-median model."""
    vm = VarMap(instance.n)
    return _model(instance, _base_rows(instance, vm), 0, "relax")


def materialize_cut(cut: SocCut, ranks: RankStructure) -> Row:
    """Sparse row of one strong order constraint (rhs 1, 0/1 coefficients)."""
    n = ranks.n
    nsq = n * n
    if not 1 <= cut.ell <= nsq:
        raise IndexOutOfRange(f"ell must be in 1..{nsq}, got {cut.ell}")
    if not 2 <= cut.k <= n:
        raise IndexOutOfRange(f"k must be in 2..{n}, got {cut.k}")
    vm = VarMap(n)
    pa = ranks.pair_at
    k0 = cut.k - 1
    low = [(vm.x_id(int(pa[r, 0]), int(pa[r, 1]), k0)) for r in range(cut.ell)]
    high = [(vm.x_id(int(pa[r, 0]), int(pa[r, 1]), k0 - 1))
            for r in range(cut.ell - 1, nsq)]
    idx = np.array(low + high, dtype=np.int64)
    return Row(idx, np.ones(idx.size), SENSE_LE, 1.0)


def enumerate_soc_cuts(ranks: RankStructure) -> list[SocCut]:
    """All (n-1)*n^2 strong order cuts in ascending (k, ell) order."""
    n = ranks.n
    return [SocCut(ell=ell, k=k) for k in range(2, n + 1)
            for ell in range(1, n * n + 1)]


def build_soc_model(instance: Instance, ranks: RankStructure) -> MilpModel:
    """Base plus the complete strong-order family, deduplicated.

    Adjacent thresholds always shift one variable between the two sums, so
    the dedup scan is a safety net rather than a correctness requirement.
    """
    rows = _base_rows(instance, VarMap(instance.n))
    kept = 0
    prev: Row | None = None
    for cut in enumerate_soc_cuts(ranks):
        row = materialize_cut(cut, ranks)
        if prev is not None and prev.indices.size == row.indices.size \
                and np.array_equal(prev.indices, row.indices):
            continue
        rows.append(row)
        prev = row
        kept += 1
    return _model(instance, rows, kept, "soc")


def build_woc_model(instance: Instance, ranks: RankStructure) -> MilpModel:
    """Base plus one aggregated order row per adjacent position pair.

    Row ``k`` sums the strong order rows over every rank threshold: the
    position-``k`` variable of the pair ranked ``r`` gets coefficient
    ``n^2 - r + 1``, the position-``k-1`` variable gets ``r``, rhs ``n^2``.
    """
    n = instance.n
    nsq = n * n
    vm = VarMap(n)
    rows = _base_rows(instance, vm)
    pa = ranks.pair_at
    for k in range(2, n + 1):
        k0 = k - 1
        idx = np.empty(2 * nsq, dtype=np.int64)
        val = np.empty(2 * nsq)
        for r in range(nsq):
            i, j = int(pa[r, 0]), int(pa[r, 1])
            idx[r] = vm.x_id(i, j, k0)
            val[r] = float(nsq - r)          # n^2 - rank + 1 with rank = r + 1
            idx[nsq + r] = vm.x_id(i, j, k0 - 1)
            val[nsq + r] = float(r + 1)      # rank
        rows.append(Row(idx, val, SENSE_LE, float(nsq)))
    return _model(instance, rows, n - 1, "woc")


def row_activity(row: Row, values: np.ndarray) -> float:
    """Left-hand side of ``row`` at a full variable vector."""
    return float(np.dot(row.values, values[row.indices]))


def _var_name(vm: VarMap, flat: int) -> str:
    parts = vm.decode(flat)
    if parts[0] == "y":
        return f"y_{parts[1] + 1}"
    _, i, j, k = parts
    return f"x_{i + 1}_{j + 1}_{k + 1}"


def to_lp_string(model: MilpModel) -> str:
    """Render the model in LP text format for external cross-checking."""
    vm = VarMap(model.n)
    out = ["Minimize", " obj:"]
    terms = []
    for flat in np.nonzero(model.objective)[0]:
        terms.append(f" + {model.objective[flat]!r} {_var_name(vm, int(flat))}")
    out.append("".join(terms) if terms else " 0")
    out.append("Subject To")
    for r, row in enumerate(model.rows):
        lhs = " ".join(
            f"+ {row.values[t]!r} {_var_name(vm, int(row.indices[t]))}"
            for t in range(row.indices.size))
        out.append(f" c{r + 1}: {lhs} {_SENSE_TXT[row.sense]} {row.rhs!r}")
    out.append("Bounds")
    for flat in range(model.num_vars):
        out.append(f" 0 <= {_var_name(vm, flat)} <= 1")
    out.append("Binaries")
    out.append(" " + " ".join(_var_name(vm, flat) for flat in range(model.num_vars)))
    out.append("End")
    return "\n".join(out) + "\n"
