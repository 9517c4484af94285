import itertools

import numpy as np
import pytest

import domp
from domp.errors import IndexOutOfRange, NotIntegral, ThresholdOutOfRange
from conftest import random_fractional_point, random_integral_point


def violating_point_n2(tie_instance):
    x = np.zeros((2, 2, 2))
    x[0, 1, 0] = 1.0     # rank 3 in slot 1
    x[0, 0, 1] = 1.0     # rank 1 in slot 2
    return domp.Point(x=x, y=np.array([1.0, 1.0]), is_integral=True)


def test_lhs_direct_zero_point():
    inst = domp.generate_instance(3, 1, seed=0)
    ranks = domp.compute_ranks(inst)
    pt = domp.Point(x=np.zeros((3, 3, 3)), y=np.zeros(3), is_integral=True)
    for k in range(2, 4):
        for ell in range(1, 10):
            assert domp.lhs_direct(pt, ell, k, ranks) == 0.0


def test_lhs_direct_hand_sum(tie_instance):
    ranks = domp.compute_ranks(tie_instance)
    pt = violating_point_n2(tie_instance)
    assert domp.lhs_direct(pt, 1, 2, ranks) == 2.0


def test_lhs_direct_range_errors(tie_instance):
    ranks = domp.compute_ranks(tie_instance)
    pt = violating_point_n2(tie_instance)
    for ell, k in ((0, 2), (5, 2), (1, 1), (1, 3)):
        with pytest.raises(IndexOutOfRange):
            domp.lhs_direct(pt, ell, k, ranks)


def test_ordered_solutions_satisfy_every_row(small_instance):
    ranks = domp.compute_ranks(small_instance)
    for j in range(3):
        sol = domp.evaluate(small_instance, [j])
        pt = domp.point_from_solution(sol, 3)
        for k in range(2, 4):
            for ell in range(1, 10):
                assert domp.lhs_direct(pt, ell, k, ranks) <= 1.0
        assert not domp.separate_soc(pt, ranks).cuts
        assert domp.check_ordered_feasibility(pt, ranks)
        assert domp.check_ordered_feasibility(sol, ranks)


def test_violating_point_example(tie_instance):
    ranks = domp.compute_ranks(tie_instance)
    pt = violating_point_n2(tie_instance)
    res = domp.separate_soc(pt, ranks, threshold=1.0)
    found = {(c.ell, c.k) for c in res.cuts}
    assert (1, 2) in found
    assert res.lhs_values[[(c.ell, c.k) for c in res.cuts].index((1, 2))] == 2.0
    assert not domp.check_ordered_feasibility(pt, ranks)


def test_scan_matches_naive_on_random_points():
    rng = np.random.default_rng(42)
    for n in (4, 6, 8):
        inst = domp.generate_instance(n, 2, seed=n)
        ranks = domp.compute_ranks(inst)
        for trial in range(30):
            pt = random_fractional_point(rng, n)
            fast = domp.separate_soc(pt, ranks, threshold=1.0)
            slow = domp.separate_soc_naive(pt, ranks, threshold=1.0)
            assert [(c.ell, c.k) for c in fast.cuts] == \
                   [(c.ell, c.k) for c in slow.cuts]
            assert np.allclose(fast.lhs_values, slow.lhs_values, atol=1e-9)
            assert fast.checks == slow.checks == (n - 1) * n * n
        for trial in range(10):
            pt = random_integral_point(rng, n, 2 + trial % 2)
            fast = domp.separate_soc(pt, ranks, threshold=1.0)
            slow = domp.separate_soc_naive(pt, ranks, threshold=1.0)
            assert [(c.ell, c.k) for c in fast.cuts] == \
                   [(c.ell, c.k) for c in slow.cuts]
            assert fast.lhs_values == slow.lhs_values


def test_telescoping_grid_matches_direct_evaluation():
    rng = np.random.default_rng(7)
    n = 8
    inst = domp.generate_instance(n, 3, seed=1)
    ranks = domp.compute_ranks(inst)
    for trial in range(5):
        pt = random_fractional_point(rng, n)
        res = domp.separate_soc(pt, ranks, threshold=1.0, collect_lhs=True)
        assert res.debug_lhs.shape == (n - 1, n * n)
        for k in range(2, n + 1):
            for ell in range(1, n * n + 1, 7):
                direct = domp.lhs_direct(pt, ell, k, ranks)
                assert abs(res.debug_lhs[k - 2, ell - 1] - direct) < 1e-9


def test_threshold_monotonicity_on_fractional_points():
    rng = np.random.default_rng(3)
    n = 6
    inst = domp.generate_instance(n, 2, seed=9)
    ranks = domp.compute_ranks(inst)
    for trial in range(20):
        pt = random_fractional_point(rng, n)
        sets = {}
        for b in (1.0, 1.1, 1.3, 1.9):
            sets[b] = {(c.ell, c.k) for c in domp.separate_soc(pt, ranks, b).cuts}
        assert sets[1.9] <= sets[1.3] <= sets[1.1] <= sets[1.0]


def test_integral_points_have_integer_lhs_and_threshold_free_cuts():
    rng = np.random.default_rng(11)
    n = 6
    inst = domp.generate_instance(n, 3, seed=5)
    ranks = domp.compute_ranks(inst)
    for trial in range(50):
        pt = random_integral_point(rng, n, 3)
        base = None
        for b in (1.0, 1.1, 1.3, 1.9):
            res = domp.separate_soc(pt, ranks, b)
            assert all(float(v).is_integer() for v in res.lhs_values)
            cuts = {(c.ell, c.k) for c in res.cuts}
            if base is None:
                base = cuts
            # for exact 0/1 points every threshold in [1, 2) flags lhs >= 2
            assert cuts == base
        if not base:
            assert not domp.separate_soc(pt, ranks, 1.0).cuts


def test_threshold_validation(tie_instance):
    ranks = domp.compute_ranks(tie_instance)
    pt = violating_point_n2(tie_instance)
    for bad in (0.99, 2.0, 2.5):
        with pytest.raises(ThresholdOutOfRange):
            domp.separate_soc(pt, ranks, bad)
        with pytest.raises(ThresholdOutOfRange):
            domp.separate_soc_naive(pt, ranks, bad)


def test_check_ordered_feasibility_requires_integrality():
    inst = domp.generate_instance(3, 1, seed=0)
    ranks = domp.compute_ranks(inst)
    pt = domp.Point(x=np.full((3, 3, 3), 0.1), y=np.full(3, 0.5),
                    is_integral=False)
    with pytest.raises(NotIntegral):
        domp.check_ordered_feasibility(pt, ranks)


def test_monotone_rank_sequences():
    inst = domp.generate_instance(3, 3, seed=2, self_service_zero=True)
    lam = np.sort(inst.lam)
    inst = domp.Instance(n=3, p=3, c=inst.c, lam=lam)
    ranks = domp.compute_ranks(inst)
    sol = domp.evaluate(inst, [0, 1, 2])
    assert domp.check_ordered_feasibility(sol, ranks)
    pt = domp.point_from_solution(sol, 3)
    pr = [int(ranks.rank[i, j]) for i, j in sol.positions]
    assert pr == sorted(pr)
    assert not domp.separate_soc(pt, ranks).cuts


def test_scan_work_counters():
    inst = domp.generate_instance(5, 2, seed=13)
    ranks = domp.compute_ranks(inst)
    pt = domp.Point(x=np.zeros((5, 5, 5)), y=np.zeros(5), is_integral=True)
    res = domp.separate_soc(pt, ranks)
    assert res.checks == 4 * 25
    assert res.updates == res.checks - 1
    assert domp.separate_soc_naive(pt, ranks).checks == 4 * 25
