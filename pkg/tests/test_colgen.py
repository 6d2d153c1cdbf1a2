import random

import numpy as np
import pytest
from hypothesis import given, settings

from pbatch.colgen import (CgConfig, branch_and_bound, certified, gap, greedy_incumbent, init_cols, spt_path,
                           local_search, price_and_branch, run_cg)
from pbatch.errors import NonPositiveUb
from pbatch.master import build_master, solve_lp
from pbatch.model import (Arc, Schedule, check_schedule, evaluate_schedule, make_arc, paths_to_schedule,
                          validate_instance)
from pbatch.oracle import exact_optimum

from conftest import brute_min_rc, feasible_batches, random_instance, rng_from, seeds
from test_master import all_arcs


def test_init_cols_i3(i3):
    arcs = init_cols(i3)
    assert len(arcs) == 11
    assert {a.jobs for a in arcs} == {(1,), (2,), (3,), (2, 3)}
    assert sorted((a.i, a.k) for a in arcs if a.jobs == (2, 3)) == [(1, 3), (2, 4)]


def test_init_cols_single_job():
    inst = validate_instance([(7, 3)], 10)
    assert init_cols(inst) == [make_arc(inst, 1, 2, [1])]


def test_init_cols_full_size_jobs():
    inst = validate_instance([(p, 10) for p in (4, 8, 1, 6)], 10)
    arcs = init_cols(inst)
    assert len(arcs) == 16
    assert all(len(a.jobs) == 1 for a in arcs)


def test_init_cols_skips_misfits_and_continues():
    # SPT: job 1 (s=4), job 2 (s=7), job 3 (s=3); job 2 does not fit after job 1, job 3 does
    inst = validate_instance([(1, 4), (2, 7), (3, 3)], 10)
    assert (1, 3) in {a.jobs for a in init_cols(inst)}


def test_init_cols_master_feasible():
    rng = random.Random(8)
    for _ in range(30):
        inst = random_instance(rng, rng.randint(1, 15))
        solve_lp(build_master(inst, init_cols(inst)))


def test_gap():
    assert gap(100, 100) == 0.0
    assert gap(100, 95) == 5.0
    assert gap(14, 14.0) == 0.0
    with pytest.raises(NonPositiveUb):
        gap(0, 0)


def test_certification_tolerance():
    assert certified(14, 14.0)
    assert certified(1_000_000, 999_999.5)
    assert not certified(14, 13.9)


def test_config_validation():
    assert CgConfig().time_limit(validate_instance([(1, 1)], 1)) == 60
    assert CgConfig().time_limit(validate_instance([(1, 1)], 1, machines=2)) == 180
    for bad in (dict(ub_time_limit=0), dict(max_cg_iterations=0), dict(branch_node_limit=-1), dict(pricing="x")):
        with pytest.raises(ValueError):
            CgConfig(**bad)


def test_i3_single_machine(i3):
    run = run_cg(i3)
    full = solve_lp(build_master(i3, all_arcs(i3))).objective
    assert run.converged
    assert 0 < run.lb <= 14
    assert run.lb == pytest.approx(full, abs=1e-6)
    res = price_and_branch(i3)
    assert res.cg_ub == 14
    assert res.schedule == Schedule.from_lists([[[2, 3], [1]]])
    assert res.certified_optimal == (abs(res.cg_lb - 14) <= 1e-6)


def test_i3_two_machines(i3):
    inst = i3.with_machines(2)
    res = price_and_branch(inst)
    assert res.cg_ub == 11 == exact_optimum(inst).optimum
    assert res.cg_lb <= 11 + 1e-6
    assert sorted(res.schedule.sequences) == [((1,),), ((2, 3),)]


def test_single_job():
    inst = validate_instance([(7, 2)], 10)
    run = run_cg(inst)
    assert run.lb == pytest.approx(7) and run.iterations == 1
    res = price_and_branch(inst)
    assert res.cg_ub == 7 and res.gap_percent == pytest.approx(0) and res.certified_optimal


def test_parallel_path_with_one_machine():
    rng = random.Random(12)
    for _ in range(20):
        inst = random_instance(rng, rng.randint(2, 10))
        a = price_and_branch(inst, CgConfig(pricing="single"))
        b = price_and_branch(inst, CgConfig(pricing="identical"))
        assert a.cg_lb == pytest.approx(b.cg_lb, abs=1e-6)
        assert a.cg_ub == b.cg_ub


def test_iteration_cap_claims_no_bound():
    rng = random.Random(1)
    inst = random_instance(rng, 14)
    run = run_cg(inst, CgConfig(max_cg_iterations=1))
    if not run.converged:
        assert run.lb is None
        res = price_and_branch(inst, CgConfig(max_cg_iterations=1))
        assert res.cg_lb is None and res.gap_percent is None and not res.certified_optimal
        assert res.cg_ub == evaluate_schedule(res.schedule, inst)


def test_greedy_and_local_search_feasible():
    rng = random.Random(6)
    for _ in range(20):
        inst = random_instance(rng, rng.randint(3, 20), machines=rng.randint(1, 3))
        run = run_cg(inst)
        g = greedy_incumbent(run.master, run.solution.primal)
        check_schedule(g, inst)
        ls = local_search(g, inst)
        check_schedule(ls, inst)
        assert evaluate_schedule(ls, inst) <= evaluate_schedule(g, inst)


def test_branch_and_bound_restores_bounds():
    rng = random.Random(10)
    inst = random_instance(rng, 12)
    run = run_cg(inst)
    before = [run.master.engine.bounds(j) for j in range(run.master.num_columns)]
    inc = greedy_incumbent(run.master, run.solution.primal)
    out = branch_and_bound(run.master, inc, time_limit=5, node_limit=200)
    after = [run.master.engine.bounds(j) for j in range(run.master.num_columns)]
    assert before == after
    assert out.value <= evaluate_schedule(inc, inst)
    assert out.value == evaluate_schedule(out.schedule, inst)


def test_node_limit_reported():
    rng = random.Random(3)
    inst = random_instance(rng, 25, smax=6)
    res = price_and_branch(inst, CgConfig(branch_node_limit=1))
    assert res.bnb_nodes <= 1
    if not res.certified_optimal:
        assert res.ub_limit_hit


def test_repeat_runs_identical():
    rng = random.Random(21)
    inst = random_instance(rng, 15)
    a, b = price_and_branch(inst), price_and_branch(inst)
    assert a.cg_lb == pytest.approx(b.cg_lb, abs=1e-9)
    assert a.schedule == b.schedule and a.cg_ub == b.cg_ub


@settings(max_examples=40, deadline=None)
@given(seeds())
def test_sandwich_and_dual_feasibility(seed):
    rng = rng_from(seed)
    m = rng.choice([1, 1, 2])
    inst = random_instance(rng, rng.randint(1, 7 if m > 1 else 8), machines=m)
    res = price_and_branch(inst)
    opt = exact_optimum(inst).optimum
    assert res.converged
    assert res.cg_lb <= opt + 1e-6
    assert res.cg_ub >= opt
    check_schedule(res.schedule, inst)
    assert res.cg_ub == evaluate_schedule(res.schedule, inst)
    assert res.gap_percent == pytest.approx(100 * (res.cg_ub - res.cg_lb) / res.cg_ub)
    duals = run_cg(inst).duals
    for i in range(1, inst.n + 1):
        for k in range(i + 1, inst.n + 2):
            for h in range(m):
                rc = brute_min_rc(inst, duals, i, k, h)
                assert rc is None or rc >= -1e-6


@given(seeds())
@settings(max_examples=30, deadline=None)
def test_spt_path_is_a_feasible_start_made_of_init_columns(seed):
    rng = rng_from(seed)
    inst = random_instance(rng, rng.randint(1, 9), rng.randint(3, 10), rng.randint(1, 3), 20, 3)
    pairs = spt_path(inst)
    known = set(init_cols(inst))
    assert all(arc in known for arc, _ in pairs if arc.jobs)
    paths = [[a for a, h in pairs if h == m] for m in range(inst.machines)]
    check_schedule(paths_to_schedule(paths, inst), inst)

    master = build_master(inst, init_cols(inst))
    master.crash(pairs)
    engine = master.engine
    engine._refactor()
    xb = engine.x[engine.head]
    assert np.all(xb >= engine.lb[engine.head] - 1e-9) and np.all(xb <= engine.ub[engine.head] + 1e-9)
    cold = build_master(inst, init_cols(inst))
    assert solve_lp(master).objective == pytest.approx(solve_lp(cold).objective, abs=1e-6)
