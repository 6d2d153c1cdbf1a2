import random

import pytest
from hypothesis import given, settings

from pbatch.errors import (BrokenChain, CapacityViolation, EmptyInstance, NonPositive, NotAPartition,
                           OversizedJob, PartitionMismatch)
from pbatch.model import (Arc, Schedule, evaluate_schedule, make_arc, path_cost, paths_to_schedule,
                          schedule_to_paths, smith_order, validate_instance)

from conftest import random_instance, random_schedule, rng_from, seeds


def unit_instance(n, machines=1):
    return validate_instance([(1, 1)] * n, 10, machines)


def test_validate_single_job():
    inst = validate_instance([(7, 1)], 10)
    assert inst.n == 1 and inst.job(1).p == 7


def test_validate_i3(i3):
    assert i3.n == 3
    assert [j.id for j in i3.jobs] == [1, 2, 3]


def test_validate_errors():
    with pytest.raises(OversizedJob) as err:
        validate_instance([(5, 11)], 10)
    assert err.value.job_id == 1
    with pytest.raises(EmptyInstance):
        validate_instance([], 10)
    with pytest.raises(NonPositive):
        validate_instance([(0, 3)], 10)
    with pytest.raises(NonPositive):
        validate_instance([(3, 0)], 10)


def test_orders_break_ties_by_id():
    inst = validate_instance([(4, 1), (9, 1), (4, 1), (9, 1)], 10)
    assert inst.lpt_order() == [2, 4, 1, 3]
    assert inst.spt_order() == [1, 3, 2, 4]


def test_evaluate_i3(i3):
    sched = Schedule.from_lists([[[2, 3], [1]]])
    assert sched.completion_times(i3) == {2: 3, 3: 3, 1: 8}
    assert evaluate_schedule(sched, i3) == 14


def test_evaluate_single_job():
    inst = validate_instance([(7, 1)], 10)
    assert evaluate_schedule(Schedule.from_lists([[[1]]]), inst) == 7


def test_path_i3(i3):
    paths = schedule_to_paths(Schedule.from_lists([[[2, 3], [1]]]), i3)
    assert paths == [[Arc(1, 3, (2, 3), 9), Arc(3, 4, (1,), 5)]]
    assert path_cost(paths, i3) == 14


def test_single_arc_path(i3):
    arc = make_arc(i3, 1, 3, [2, 3])
    inst = validate_instance([(5, 6), (3, 5)], 11)
    one = make_arc(inst, 1, 3, [1, 2])
    assert one.cost == 2 * 5
    assert path_cost([[one]], inst) == 10
    assert arc.cost == 3 * 3


def test_four_batches_on_one_machine():
    inst = unit_instance(10)
    sched = Schedule.from_lists([[[1, 2, 3], [4, 5, 6], [7, 8], [9, 10]]])
    (path,) = schedule_to_paths(sched, inst)
    assert [a.i for a in path] + [path[-1].k] == [1, 4, 7, 9, 11]
    assert [inst.n - a.i + 1 for a in path] == [10, 7, 4, 2]
    assert path_cost([path], inst) == evaluate_schedule(sched, inst) == 23


def test_two_machines_with_placeholders():
    inst = unit_instance(10, machines=2)
    sched = Schedule.from_lists([[[1, 2, 3], [4, 5, 6]], [[7, 8], [9, 10]]])
    paths = schedule_to_paths(sched, inst)
    assert paths[0][0] == Arc(1, 5, (), 0)
    assert paths[1][0] == Arc(1, 7, (), 0)
    coeffs = [[inst.n - a.i + 1 for a in path if a.jobs] for path in paths]
    assert coeffs == [[6, 3], [4, 2]]
    assert path_cost(paths, inst) == evaluate_schedule(sched, inst) == 15
    assert paths_to_schedule(paths, inst) == sched


def test_idle_machine_is_full_span_placeholder(i3):
    inst = i3.with_machines(2)
    sched = Schedule.from_lists([[[2, 3], [1]], []])
    paths = schedule_to_paths(sched, inst)
    assert paths[1] == [Arc(1, 4, (), 0)]
    assert paths_to_schedule(paths, inst) == sched


def test_round_trip_i3(i3):
    sched = Schedule.from_lists([[[2, 3], [1]]])
    assert paths_to_schedule(schedule_to_paths(sched, i3), i3) == sched


def test_schedule_errors(i3):
    with pytest.raises(NotAPartition):
        evaluate_schedule(Schedule.from_lists([[[1], [2]]]), i3)
    with pytest.raises(NotAPartition):
        evaluate_schedule(Schedule.from_lists([[[1], [2, 3], [3]]]), i3)
    with pytest.raises(CapacityViolation):
        evaluate_schedule(Schedule.from_lists([[[1, 2], [3]]]), i3)


def test_path_errors(i3):
    a = make_arc(i3, 1, 2, [1])
    c = make_arc(i3, 3, 4, [3])
    with pytest.raises(BrokenChain):
        paths_to_schedule([[a, c]], i3)
    with pytest.raises(BrokenChain):
        paths_to_schedule([[make_arc(i3, 2, 4, [2, 3])]], i3)
    with pytest.raises(PartitionMismatch):
        paths_to_schedule([[a, make_arc(i3, 2, 3, [1]), c]], i3)
    with pytest.raises(PartitionMismatch):
        paths_to_schedule([[make_arc(i3, 1, 4, [1, 2, 3])]] * 2, i3)


def test_smith_order_is_optimal_for_fixed_batches():
    rng = random.Random(3)
    import itertools
    for _ in range(200):
        inst = random_instance(rng, rng.randint(2, 7))
        batches = random_schedule(rng, inst).sequences[0]
        best = min(evaluate_schedule(Schedule((tuple(p),)), inst) for p in itertools.permutations(batches))
        assert evaluate_schedule(Schedule((tuple(smith_order(batches, inst)),)), inst) == best


@settings(max_examples=300, deadline=None)
@given(seeds())
def test_path_cost_equals_evaluation(seed):
    rng = rng_from(seed)
    inst = random_instance(rng, rng.randint(1, 12), machines=rng.randint(1, 3))
    sched = random_schedule(rng, inst)
    paths = schedule_to_paths(sched, inst)
    assert path_cost(paths, inst) == evaluate_schedule(sched, inst)
    assert paths_to_schedule(paths, inst) == sched
    for path, seq in zip(paths, sched.sequences):
        assert len(path) == len(seq) + (1 if path[0].is_empty else 0)
        for arc in path:
            assert arc.k == arc.i + len(arc.jobs) or arc.is_empty
            if arc.jobs:
                tail = sum(len(a.jobs) for a in path if a.i >= arc.i)
                assert inst.n - arc.i + 1 == tail
