"""Ordered median objective evaluation and the brute-force optimality oracle."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import backends
from .errors import InvalidOpenSet, TooLarge
from .instance import Instance


@dataclasses.dataclass(frozen=True)
class OpenSet:
    """A set of open sites, stored sorted ascending, 0-based."""

    sites: tuple[int, ...]

    def __post_init__(self):
        sites = tuple(sorted(int(j) for j in self.sites))
        if len(set(sites)) != len(sites):
            raise InvalidOpenSet(f"duplicate sites in {self.sites}")
        object.__setattr__(self, "sites", sites)

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)


@dataclasses.dataclass(frozen=True)
class OrderedSolution:
    """A feasible solution with its sorted cost layout.

    ``assign[i]`` is the site serving client ``i``; ``positions[k - 1]`` is
    the (client, site) pair whose cost sits in sorted slot ``k``.  Costs are
    nondecreasing along ``positions`` and ``value`` is the weighted sum of
    the sorted costs.
    """

    open_set: OpenSet
    assign: tuple[int, ...]
    positions: tuple[tuple[int, int], ...]
    value: float


def ordered_value(lam, sorted_costs) -> float:
    """Weighted sum over sorted slots, accumulated in ascending slot order.

    Every reported objective in the package goes through this exact
    sequential sum so that values from the solver, the evaluator and the
    brute-force oracle compare bit for bit.
    """
    v = 0.0
    for k in range(len(sorted_costs)):
        v += lam[k] * sorted_costs[k]
    return v


def _as_open_set(instance: Instance, open_set) -> OpenSet:
    if not isinstance(open_set, OpenSet):
        open_set = OpenSet(tuple(open_set))
    if len(open_set) != instance.p:
        raise InvalidOpenSet(
            f"need exactly p={instance.p} open sites, got {len(open_set)}")
    if open_set.sites and not (0 <= open_set.sites[0] and open_set.sites[-1] < instance.n):
        raise InvalidOpenSet(f"sites out of range 0..{instance.n - 1}: {open_set.sites}")
    return open_set


def evaluate(instance: Instance, open_set) -> OrderedSolution:
    """Assign every client to its cheapest open site and sort the costs.

    Ties break low: a client picks the open site with the smallest index
    among equally cheap ones, and equal costs are slotted by client index.
    The objective value does not depend on either tie-break.
    """
    open_set = _as_open_set(instance, open_set)
    sites = np.fromiter(open_set.sites, dtype=np.int64)
    sub = instance.c[:, sites]                      # (n, p)
    choice = np.argmin(sub, axis=1)                 # first minimum = lowest site
    assign = sites[choice]
    costs = sub[np.arange(instance.n), choice]
    order = np.argsort(costs, kind="stable")        # ties keep client order
    positions = tuple((int(i), int(assign[i])) for i in order)
    value = ordered_value(instance.lam, costs[order])
    return OrderedSolution(open_set=open_set,
                           assign=tuple(int(j) for j in assign),
                           positions=positions,
                           value=value)


def brute_force(instance: Instance, subset_limit: int = 10_000_000):
    """Minimize over every p-subset of sites by direct enumeration.

    Returns ``(value, best)`` where ``best`` is the lexicographically
    smallest optimal OpenSet.  Raises :class:`TooLarge` when the number of
    subsets exceeds ``subset_limit``; the default keeps this a desk-scale
    ground-truth tool.
    """
    count = math.comb(instance.n, instance.p)
    if count > subset_limit:
        raise TooLarge(
            f"C({instance.n},{instance.p}) = {count} exceeds the limit {subset_limit}")
    _, best_j = backends.active.eval_subsets(instance.c, instance.lam, instance.p)
    best = OpenSet(tuple(int(j) for j in best_j))
    return evaluate(instance, best).value, best
