"""Problem data: instances, deterministic cost ranking, text I/O, random generation.

An instance couples an ``n x n`` allocation cost matrix with a vector of
position weights.  The weight in slot ``k`` multiplies the ``k``-th smallest
assigned cost, so classic problems are special cases: all-ones weights give
the p-median, a single trailing one gives the p-center.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .errors import InvalidParams, ParseError, ValidationError


@dataclasses.dataclass(frozen=True)
class Instance:
    """One problem datum.

    Attributes
    ----------
    n : int
        Number of clients, which equals the number of candidate sites.
    p : int
        Number of facilities to open, ``1 <= p <= n``.
    c : ndarray (n, n) of float64
        ``c[i, j]`` is the cost of serving client ``i`` from site ``j``.
    lam : ndarray (n,) of float64
        Nonnegative position weights; slot ``k`` weighs the ``k``-th
        smallest assigned cost.
    name : str
        Identifier used in file names and reports.
    """

    n: int
    p: int
    c: np.ndarray
    lam: np.ndarray
    name: str = "unnamed"

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.c, dtype=np.float64))
        lam = np.ascontiguousarray(np.asarray(self.lam, dtype=np.float64))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "lam", lam)
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.p <= self.n:
            raise ValidationError(f"p must be in [1, n={self.n}], got {self.p}")
        if c.shape != (self.n, self.n):
            raise ValidationError(f"cost matrix must be {self.n}x{self.n}, got {c.shape}")
        if lam.shape != (self.n,):
            raise ValidationError(f"lambda must have {self.n} entries, got {lam.shape}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValidationError("costs must be finite and nonnegative")
        if not np.all(np.isfinite(lam)) or np.any(lam < 0):
            raise ValidationError("weights must be finite and nonnegative")
        c.setflags(write=False)
        lam.setflags(write=False)


@dataclasses.dataclass(frozen=True)
class RankStructure:
    """Bijection between (client, site) pairs and ranks ``1..n^2``.

    ``rank[i, j]`` is the 1-based position of ``c[i, j]`` in the global
    nondecreasing cost ordering; ``pair_at[l - 1]`` is its inverse.  Cost
    ties are broken by lowest ``(i, j)`` lexicographically so that the
    ranking, and every cut derived from it, is reproducible.
    """

    n: int
    rank: np.ndarray      # (n, n) int64, values in 1..n^2
    pair_at: np.ndarray   # (n^2, 2) int64 rows (i, j), 0-based

    def __post_init__(self):
        self.rank.setflags(write=False)
        self.pair_at.setflags(write=False)


def compute_ranks(instance: Instance) -> RankStructure:
    """Rank all n^2 allocation costs in nondecreasing order.

    Deterministic: equal costs are ordered by (i, j).
    """
    n = instance.n
    ii, jj = np.divmod(np.arange(n * n, dtype=np.int64), n)
    order = np.lexsort((jj, ii, instance.c.ravel()))
    pair_at = np.column_stack((ii[order], jj[order]))
    rank = np.empty((n, n), dtype=np.int64)
    rank[pair_at[:, 0], pair_at[:, 1]] = np.arange(1, n * n + 1, dtype=np.int64)
    return RankStructure(n=n, rank=rank, pair_at=np.ascontiguousarray(pair_at))


def _fmt(v: float) -> str:
    """Shortest exact decimal form; integral values print without a fraction."""
    f = float(v)
    return str(int(f)) if f.is_integer() else repr(f)


def save_instance(instance: Instance, path) -> None:
    """Write the canonical text form::

        line 1:        n p
        line 2:        lambda_1 ... lambda_n
        lines 3..n+2:  row i of the cost matrix

    Values are single-space separated and round-trip exactly.
    """
    lines = [f"{instance.n} {instance.p}"]
    lines.append(" ".join(_fmt(v) for v in instance.lam))
    for i in range(instance.n):
        lines.append(" ".join(_fmt(v) for v in instance.c[i]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_instance(path) -> Instance:
    """Parse an instance file (whitespace-tolerant) and validate it."""
    path = Path(path)
    tokens_per_line = [ln.split() for ln in path.read_text().splitlines()]
    tokens_per_line = [t for t in tokens_per_line if t]
    if not tokens_per_line:
        raise ParseError(f"{path}: empty file")
    head = tokens_per_line[0]
    if len(head) != 2:
        raise ParseError(f"{path}: first line must be 'n p', got {' '.join(head)!r}")
    try:
        n, p = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ParseError(f"{path}: non-integer n/p on first line") from exc
    if len(tokens_per_line) != n + 2:
        raise ParseError(f"{path}: expected {n + 2} lines, got {len(tokens_per_line)}")
    try:
        lam = np.array([float(t) for t in tokens_per_line[1]], dtype=np.float64)
        rows = [np.array([float(t) for t in tokens_per_line[2 + i]], dtype=np.float64)
                for i in range(n)]
    except ValueError as exc:
        raise ParseError(f"{path}: non-numeric value") from exc
    if lam.size != n:
        raise ParseError(f"{path}: lambda line has {lam.size} values, expected {n}")
    for i, row in enumerate(rows):
        if row.size != n:
            raise ParseError(f"{path}: cost row {i + 1} has {row.size} values, expected {n}")
    return Instance(n=n, p=p, c=np.vstack(rows), lam=lam, name=path.stem)


def generate_instance(n: int, p: int, seed: int,
                      self_service_zero: bool = False,
                      name: str | None = None) -> Instance:
    """Draw a random instance; deterministic for a fixed seed.

    Weights are uniform on [n/4, n]; costs are uniform integers in [1, 1000].
    With ``self_service_zero`` the diagonal is zeroed after drawing, so the
    off-diagonal stream is unaffected by the flag.
    """
    if n < 1 or not 1 <= p <= n:
        raise InvalidParams(f"need 1 <= p <= n, got n={n}, p={p}")
    rng = np.random.default_rng(seed)
    lam = rng.uniform(n / 4.0, float(n), size=n)
    c = rng.integers(1, 1001, size=(n, n)).astype(np.float64)
    if self_service_zero:
        np.fill_diagonal(c, 0.0)
    if name is None:
        name = f"rand_n{n}_p{p}_s{seed}"
    return Instance(n=n, p=p, c=c, lam=lam, name=name)
