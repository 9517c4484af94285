import numpy as np
import pytest

import domp
from domp.errors import InvalidOpenSet, TooLarge
from conftest import pmedian_enumerate, pcenter_enumerate


def test_evaluate_example(small_instance):
    sol = domp.evaluate(small_instance, [1])
    # min of each row against column 2: (4, 0, 3) -> sorted (0, 3, 4)
    assert sol.value == 7.0
    assert sol.assign == (1, 1, 1)
    assert [small_instance.c[i, j] for i, j in sol.positions] == [0.0, 3.0, 4.0]


def test_evaluate_center_weighting(small_instance):
    inst = domp.Instance(n=3, p=1, c=small_instance.c, lam=[0, 0, 1])
    assert domp.evaluate(inst, [1]).value == 4.0


def test_evaluate_zero_weights(small_instance):
    inst = domp.Instance(n=3, p=1, c=small_instance.c, lam=[0, 0, 0])
    for j in range(3):
        assert domp.evaluate(inst, [j]).value == 0.0


def test_evaluate_validates_open_set(small_instance):
    with pytest.raises(InvalidOpenSet):
        domp.evaluate(small_instance, [0, 1])      # p = 1
    with pytest.raises(InvalidOpenSet):
        domp.evaluate(small_instance, [3])
    with pytest.raises(InvalidOpenSet):
        domp.OpenSet((1, 1))


def test_brute_force_example(small_instance):
    # enumerating J in {0}, {1}, {2} gives values 11, 7, 10
    value, best = domp.brute_force(small_instance)
    assert value == 7.0
    assert best.sites == (1,)


def test_brute_force_all_open():
    inst = domp.generate_instance(6, 6, seed=4)
    value, best = domp.brute_force(inst)
    costs = np.sort(inst.c.min(axis=1))
    assert value == domp.ordered_value(inst.lam, costs)
    assert best.sites == tuple(range(6))


def test_brute_force_single():
    inst = domp.Instance(n=1, p=1, c=[[5.0]], lam=[2.0])
    value, best = domp.brute_force(inst)
    assert value == 10.0 and best.sites == (0,)


def test_brute_force_guard():
    inst = domp.generate_instance(20, 10, seed=0)
    with pytest.raises(TooLarge):
        domp.brute_force(inst, subset_limit=1000)


def test_scaling_invariance():
    inst = domp.generate_instance(7, 3, seed=9)
    v1, j1 = domp.brute_force(inst)
    scaled = domp.Instance(n=7, p=3, c=2.5 * inst.c, lam=inst.lam)
    v2, j2 = domp.brute_force(scaled)
    assert j1.sites == j2.sites
    assert v2 == pytest.approx(2.5 * v1, rel=1e-12)


def test_pmedian_and_pcenter_special_cases():
    for seed in range(6):
        n = 5 + seed % 3
        p = 2 + seed % 2
        base = domp.generate_instance(n, p, seed=seed)
        med = domp.Instance(n=n, p=p, c=base.c, lam=np.ones(n))
        vmed, _ = domp.brute_force(med)
        assert vmed == pytest.approx(pmedian_enumerate(med), abs=1e-9)
        lam = np.zeros(n)
        lam[-1] = 1.0
        cen = domp.Instance(n=n, p=p, c=base.c, lam=lam)
        vcen, _ = domp.brute_force(cen)
        assert vcen == pytest.approx(pcenter_enumerate(cen), abs=1e-12)


def test_value_invariant_under_equal_cost_slot_swaps():
    c = np.array([[1.0, 4.0, 4.0],
                  [4.0, 1.0, 4.0],
                  [4.0, 4.0, 1.0]])
    inst = domp.Instance(n=3, p=2, c=c, lam=[3.0, 2.0, 1.0])
    sol = domp.evaluate(inst, [0, 1])
    costs = [inst.c[i, j] for i, j in sol.positions]
    # swap any pair of equal-cost slots and recompute
    for a in range(3):
        for b in range(a + 1, 3):
            if costs[a] == costs[b]:
                perm = list(sol.positions)
                perm[a], perm[b] = perm[b], perm[a]
                swapped = domp.ordered_value(
                    inst.lam, [inst.c[i, j] for i, j in perm])
                assert swapped == sol.value


def test_ordered_value_matches_manual_loop():
    rng = np.random.default_rng(0)
    lam = rng.uniform(0, 3, 6)
    costs = np.sort(rng.uniform(0, 10, 6))
    acc = 0.0
    for k in range(6):
        acc += lam[k] * costs[k]
    assert domp.ordered_value(lam, costs) == acc
