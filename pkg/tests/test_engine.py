import numpy as np
import pytest
from scipy.optimize import linprog

import domp
from domp.engine import BnbConfig, Hooks, LpOptions, branch_and_bound, \
    callback_strategy, pool_strategy, solve_lp
from domp.errors import NumericalFailure
from domp.models import Row, SENSE_EQ, SENSE_GE, SENSE_LE, VarMap, row_activity
from conftest import random_fractional_point


def scipy_value(model, extra_rows=()):
    """Independent LP value via scipy/HiGHS on the same data."""
    rows = list(model.rows) + list(extra_rows)
    nv = model.num_vars
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row in rows:
        dense = np.zeros(nv)
        dense[row.indices] = row.values
        if row.sense == SENSE_EQ:
            a_eq.append(dense)
            b_eq.append(row.rhs)
        elif row.sense == SENSE_LE:
            a_ub.append(dense)
            b_ub.append(row.rhs)
        else:
            a_ub.append(-dense)
            b_ub.append(-row.rhs)
    res = linprog(model.objective,
                  A_ub=np.array(a_ub) if a_ub else None,
                  b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=np.array(a_eq) if a_eq else None,
                  b_eq=np.array(b_eq) if b_eq else None,
                  bounds=[(lo, hi) for lo, hi in zip(model.lower, model.upper)],
                  method="highs")
    return res


def test_lp_matches_scipy_on_models():
    for seed in range(4):
        n = 4 + seed % 2
        inst = domp.generate_instance(n, 2, seed=seed)
        ranks = domp.compute_ranks(inst)
        for build in (domp.build_relax_model, domp.build_woc_model,
                      domp.build_soc_model):
            model = build(inst, ranks)
            ours = solve_lp(model)
            ref = scipy_value(model)
            assert ours.status == "optimal" and ref.status == 0
            assert ours.objective == pytest.approx(ref.fun, abs=1e-7)


def test_lp_matches_scipy_on_random_rows():
    rng = np.random.default_rng(123)
    for trial in range(15):
        nv = 12
        c = rng.normal(size=nv)
        rows = []
        for r in range(8):
            mask = rng.random(nv) < 0.4
            if not mask.any():
                continue
            idx = np.nonzero(mask)[0].astype(np.int64)
            val = np.round(rng.normal(size=idx.size) * 3, 2)
            sense = (SENSE_LE, SENSE_GE, SENSE_EQ)[rng.integers(3)]
            rhs = float(np.round(rng.uniform(-1, 2), 2))
            if sense == SENSE_EQ:
                rhs = float(np.round(rng.uniform(0, 1), 2))
            rows.append(Row(idx, val, sense, rhs))
        model = domp.MilpModel(formulation="test", n=2, p=1, num_vars=nv,
                               objective=c, rows=tuple(rows),
                               lower=np.zeros(nv), upper=np.ones(nv),
                               base_rows=len(rows), order_rows=0)
        ours = solve_lp(model)
        ref = scipy_value(model)
        if ref.status == 2:
            assert ours.status == "infeasible"
        else:
            assert ref.status == 0
            assert ours.status == "optimal"
            assert ours.objective == pytest.approx(ref.fun, abs=1e-7)


def test_lp_relaxation_bound(small_instance):
    ranks = domp.compute_ranks(small_instance)
    base = domp.build_base(small_instance, ranks)
    sol = solve_lp(base)
    assert sol.status == "optimal"
    assert sol.objective <= 7.0 + 1e-9


def test_lp_infeasible_on_contradiction(small_instance):
    ranks = domp.compute_ranks(small_instance)
    base = domp.build_base(small_instance, ranks)
    vm = VarMap(3)
    contradiction = Row(np.array([vm.y_id(j) for j in range(3)], dtype=np.int64),
                        np.ones(3), SENSE_LE, 0.0)   # sum(y) <= p - 1 = 0
    sol = solve_lp(base, extra_rows=[contradiction])
    assert sol.status == "infeasible"


def test_lp_integral_when_all_sites_open():
    """With p = n the relaxation optimum equals the best integer layout:
    each client at its cheapest cost, slots paired by the rearrangement rule
    (largest weight with smallest cost)."""
    for seed in range(4):
        n = 4 + seed
        inst = domp.generate_instance(n, n, seed=seed)
        ranks = domp.compute_ranks(inst)
        model = domp.build_relax_model(inst, ranks)
        sol = solve_lp(model)
        mins = np.sort(inst.c.min(axis=1))
        lam_desc = np.sort(inst.lam)[::-1]
        best_perm = float(np.dot(lam_desc, mins))
        assert sol.objective == pytest.approx(best_perm, abs=1e-7)


def test_lp_determinism(small_instance):
    ranks = domp.compute_ranks(small_instance)
    model = domp.build_soc_model(small_instance, ranks)
    a = solve_lp(model)
    b = solve_lp(model)
    assert a.objective == b.objective
    assert a.iterations == b.iterations
    assert np.array_equal(a.x, b.x)


def test_bnb_no_hooks_equals_brute_force():
    for seed in (0, 1, 2):
        n = 6 if seed < 2 else 8
        inst = domp.generate_instance(n, 2 + seed, seed=seed)
        ranks = domp.compute_ranks(inst)
        expected, _ = domp.brute_force(inst)
        rep = branch_and_bound(domp.build_soc_model(inst, ranks),
                               config=BnbConfig(mip_gap=0.0))
        assert rep.status == "optimal"
        assert rep.value == pytest.approx(expected, abs=1e-9)
        assert rep.best_bound == pytest.approx(expected, rel=1e-9)


def test_warm_start_installs_upper_bound():
    inst = domp.generate_instance(6, 2, seed=21)
    ranks = domp.compute_ranks(inst)
    expected, best = domp.brute_force(inst)
    warm = domp.evaluate(inst, best)
    rep = branch_and_bound(domp.build_woc_model(inst, ranks), warm_start=warm,
                           config=BnbConfig(mip_gap=0.0))
    assert rep.value == pytest.approx(expected, abs=1e-12)
    assert rep.nodes >= 1
    assert rep.status == "optimal"


def test_node_limit_one_root_gap_equals_final_gap():
    inst = domp.generate_instance(8, 3, seed=33)
    ranks = domp.compute_ranks(inst)
    warm = domp.evaluate(inst, domp.brute_force(inst)[1])
    rep = branch_and_bound(domp.build_woc_model(inst, ranks), warm_start=warm,
                           config=BnbConfig(node_limit=1, mip_gap=0.0))
    assert rep.nodes == 1
    assert rep.gap_root_pct == pytest.approx(rep.gap_pct, abs=1e-12)


def test_pool_size_matches_cut_family():
    inst = domp.generate_instance(6, 2, seed=2)
    ranks = domp.compute_ranks(inst)
    cfg = BnbConfig()
    hooks = pool_strategy(domp.enumerate_soc_cuts(ranks), ranks, cfg)
    assert hooks.pool_size == 180          # (n - 1) * n^2 at n = 6


def test_empty_pool_hooks_are_noops():
    inst = domp.generate_instance(4, 2, seed=2)
    ranks = domp.compute_ranks(inst)
    hooks = pool_strategy([], ranks, BnbConfig())
    flat = np.zeros(VarMap(4).num_vars)
    assert hooks.on_root_fractional(flat) == []
    assert hooks.on_integer_candidate(flat) == []


def test_pool_scan_equals_scan_oracle():
    rng = np.random.default_rng(17)
    inst = domp.generate_instance(5, 2, seed=6)
    ranks = domp.compute_ranks(inst)
    vm = VarMap(5)
    for trial in range(20):
        cfg = BnbConfig(cuts_per_round=10 ** 6)
        hooks = pool_strategy(domp.enumerate_soc_cuts(ranks), ranks, cfg)
        pt = random_fractional_point(rng, 5)
        flat = np.concatenate([pt.x.ravel(), pt.y])
        rows = hooks.on_root_fractional(flat)
        res = domp.separate_soc(pt, ranks, threshold=1.0)
        assert len(rows) == len(res.cuts)
        got = {tuple(sorted(r.indices.tolist())) for r in rows}
        want = {tuple(sorted(domp.materialize_cut(c, ranks).indices.tolist()))
                for c in res.cuts}
        assert got == want


def test_strategies_reach_equal_optima():
    for seed in (3, 4):
        inst = domp.generate_instance(7, 3, seed=seed)
        ranks = domp.compute_ranks(inst)
        expected, _ = domp.brute_force(inst)
        model = domp.build_relax_model(inst, ranks)
        values = {}
        for name, factory in (("pool", lambda c: pool_strategy(
                domp.enumerate_soc_cuts(ranks), ranks, c)),
                ("callback", lambda c: callback_strategy(ranks, c))):
            cfg = BnbConfig(mip_gap=0.0)
            rep = branch_and_bound(model, hooks=factory(cfg), config=cfg)
            values[name] = rep.value
            assert rep.value == pytest.approx(expected, abs=1e-9)
        assert values["pool"] == pytest.approx(values["callback"], abs=1e-9)


def test_integral_candidate_cuts_identical_across_b():
    """At an exact 0/1 candidate the flagged rows coincide for every b in
    [1, 2), so larger b yields a (trivially equal) subset."""
    rng = np.random.default_rng(29)
    inst = domp.generate_instance(6, 2, seed=14)
    ranks = domp.compute_ranks(inst)
    from conftest import random_integral_point
    pt = random_integral_point(rng, 6, 2)
    flat = np.concatenate([pt.x.ravel(), pt.y])
    sets = {}
    for b in (1.0, 1.3):
        cfg = BnbConfig(b=b, cuts_per_round=10 ** 6)
        hooks = callback_strategy(ranks, cfg)
        rows = hooks.on_integer_candidate(flat)
        sets[b] = {tuple(sorted(r.indices.tolist())) for r in rows}
    assert sets[1.3] <= sets[1.0]
    assert sets[1.3] == sets[1.0]


def test_appended_cuts_are_satisfied_by_the_optimum():
    inst = domp.generate_instance(7, 2, seed=8)
    ranks = domp.compute_ranks(inst)
    _, best = domp.brute_force(inst)
    opt_point = domp.point_from_solution(domp.evaluate(inst, best), 7)
    flat = np.concatenate([opt_point.x.ravel(), opt_point.y])
    cfg = BnbConfig(mip_gap=0.0)
    rep = branch_and_bound(domp.build_relax_model(inst, ranks),
                           hooks=callback_strategy(ranks, cfg), config=cfg)
    assert rep.cuts_added == len(rep.cut_rows) > 0
    for row in rep.cut_rows:
        assert row_activity(row, flat) <= row.rhs + 1e-12


def test_bounds_trace_is_monotone():
    inst = domp.generate_instance(7, 3, seed=19)
    ranks = domp.compute_ranks(inst)
    warm = domp.evaluate(inst, domp.brute_force(inst)[1])
    rep = branch_and_bound(domp.build_woc_model(inst, ranks), warm_start=warm,
                           config=BnbConfig(mip_gap=0.0, track_bounds=True))
    lbs = [lb for lb, _ in rep.bounds_trace]
    ubs = [ub for _, ub in rep.bounds_trace]
    assert all(a <= b + 1e-9 for a, b in zip(lbs, lbs[1:]))
    assert all(a >= b - 1e-12 for a, b in zip(ubs, ubs[1:]))


def test_report_counters_deterministic():
    inst = domp.generate_instance(7, 2, seed=23)
    ranks = domp.compute_ranks(inst)
    model = domp.build_woc_model(inst, ranks)

    def run():
        cfg = BnbConfig(mip_gap=0.0)
        hooks = callback_strategy(ranks, cfg)
        return branch_and_bound(model, hooks=Hooks(
            on_root_fractional=hooks.on_root_fractional), config=cfg)
    a, b = run(), run()
    assert (a.value, a.nodes, a.cuts_added, a.best_bound) == \
           (b.value, b.nodes, b.cuts_added, b.best_bound)


def test_config_validation():
    with pytest.raises(ValueError):
        BnbConfig(b=2.0)
    with pytest.raises(ValueError):
        BnbConfig(b=0.5)
    with pytest.raises(ValueError):
        BnbConfig(time_limit=0)
    with pytest.raises(ValueError):
        BnbConfig(node_limit=0)
