"""Shared fixtures and independent reference oracles.

The enumerators here are deliberately written from the problem statement
alone (no package internals beyond the instance container), so solver
results are checked against genuinely independent computations.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

import domp


def pmedian_enumerate(instance):
    """Min total closest-site cost over all p-subsets, by direct enumeration."""
    best = np.inf
    for J in combinations(range(instance.n), instance.p):
        total = float(instance.c[:, J].min(axis=1).sum())
        if total < best:
            best = total
    return best


def pcenter_enumerate(instance):
    """Min worst closest-site cost over all p-subsets, by direct enumeration."""
    best = np.inf
    for J in combinations(range(instance.n), instance.p):
        worst = float(instance.c[:, J].min(axis=1).max())
        if worst < best:
            best = worst
    return best


def random_fractional_point(rng, n):
    """A point with every variable drawn uniformly from [0, 1]."""
    x = rng.uniform(0.0, 1.0, size=(n, n, n))
    y = rng.uniform(0.0, 1.0, size=n)
    return domp.Point(x=x, y=y, is_integral=False)


def random_integral_point(rng, n, p):
    """A random integral point feasible for the shared base rows.

    Open a random p-subset, assign each client to a random open site, and
    spread the clients over the sorted slots with a random permutation.
    """
    x = np.zeros((n, n, n))
    y = np.zeros(n)
    sites = rng.choice(n, size=p, replace=False)
    y[sites] = 1.0
    slots = rng.permutation(n)
    for i in range(n):
        x[i, sites[rng.integers(p)], slots[i]] = 1.0
    return domp.Point(x=x, y=y, is_integral=True)


@pytest.fixture(scope="session")
def small_instance():
    return domp.Instance(n=3, p=1, c=[[0, 4, 7], [4, 0, 3], [7, 3, 0]],
                         lam=[1, 1, 1], name="triangle")


@pytest.fixture(scope="session")
def tie_instance():
    return domp.Instance(n=2, p=1, c=[[0, 5], [6, 0]], lam=[1, 1], name="tie2")
