"""Ground truth for small instances and a MILP export of the compact model.

``exact_optimum`` enumerates every partition of the jobs into
capacity-feasible batches (restricted-growth strings, pruned on capacity)
and sequences each batch set by Smith's rule.  For ``m`` machines the jobs
are first split into at most ``m`` unordered groups, each solved as a
single-machine problem; group optima are memoized by job subset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import TooLarge
from .lpformat import LinearProgram
from .model import Instance, Schedule, evaluate_schedule, smith_order

ENUMERATION_CAP = 16
SINGLE_MACHINE_CAP = 9
PARALLEL_CAP = 7


@dataclass(frozen=True)
class OracleResult:
    optimum: int
    schedule: Schedule
    partitions_explored: int


def enumerate_feasible_batches(inst: Instance, cap: int = ENUMERATION_CAP) -> list[tuple[int, ...]]:
    """Every nonempty job subset whose total size fits the capacity."""
    if inst.n > cap:
        raise TooLarge(f"n={inst.n} exceeds batch enumeration cap {cap}")
    ids = range(1, inst.n + 1)
    out = []
    for size in range(1, inst.n + 1):
        for combo in itertools.combinations(ids, size):
            if sum(inst.s(j) for j in combo) <= inst.capacity:
                out.append(combo)
    return out


def batch_partitions(inst: Instance, jobs):
    """Yield every partition of ``jobs`` into capacity-feasible batches."""
    jobs = list(jobs)
    blocks: list[list[int]] = []
    loads: list[int] = []

    def grow(pos):
        if pos == len(jobs):
            yield [tuple(b) for b in blocks]
            return
        j = jobs[pos]
        s = inst.s(j)
        for b in range(len(blocks)):
            if loads[b] + s <= inst.capacity:
                blocks[b].append(j)
                loads[b] += s
                yield from grow(pos + 1)
                blocks[b].pop()
                loads[b] -= s
        blocks.append([j])
        loads.append(s)
        yield from grow(pos + 1)
        blocks.pop()
        loads.pop()

    if not jobs:
        yield []
        return
    yield from grow(0)


def group_splits(jobs, groups: int):
    """Yield every split of ``jobs`` into at most ``groups`` unordered nonempty groups."""
    jobs = list(jobs)
    blocks: list[list[int]] = []

    def grow(pos):
        if pos == len(jobs):
            yield [tuple(b) for b in blocks]
            return
        for b in range(len(blocks)):
            blocks[b].append(jobs[pos])
            yield from grow(pos + 1)
            blocks[b].pop()
        if len(blocks) < groups:
            blocks.append([jobs[pos]])
            yield from grow(pos + 1)
            blocks.pop()

    yield from grow(0)


def _sequence_value(inst: Instance, seq) -> int:
    t = total = 0
    for batch in seq:
        t += max(inst.p(j) for j in batch)
        total += t * len(batch)
    return total


def _solve_groups(inst: Instance, ordering):
    counter = [0]

    @lru_cache(maxsize=None)
    def best(group: tuple[int, ...]):
        top = None
        for part in batch_partitions(inst, group):
            counter[0] += 1
            for seq in ordering(part):
                val = _sequence_value(inst, seq)
                if top is None or val < top[0]:
                    top = (val, tuple(seq))
        return top

    winner = None
    for split in group_splits(range(1, inst.n + 1), inst.machines):
        val = 0
        seqs = []
        for g in split:
            v, s = best(g)
            val += v
            seqs.append(s)
        if winner is None or val < winner[0]:
            winner = (val, seqs)
    val, seqs = winner
    seqs = seqs + [()] * (inst.machines - len(seqs))
    return val, Schedule.from_lists(seqs), counter[0]


def exact_optimum(inst: Instance, limit: int | None = None) -> OracleResult:
    cap = limit or (SINGLE_MACHINE_CAP if inst.machines == 1 else PARALLEL_CAP)
    if inst.n > cap:
        raise TooLarge(f"n={inst.n} too large for exact enumeration (cap {cap})")
    val, sched, explored = _solve_groups(inst, lambda part: [smith_order(part, inst)])
    assert evaluate_schedule(sched, inst) == val
    return OracleResult(val, sched, explored)


def all_orders_optimum(inst: Instance, limit: int = 6) -> OracleResult:
    """Like :func:`exact_optimum` but trying every batch order instead of Smith's rule."""
    if inst.n > limit:
        raise TooLarge(f"n={inst.n} too large for all-orders enumeration (cap {limit})")
    val, sched, explored = _solve_groups(inst, itertools.permutations)
    return OracleResult(val, sched, explored)


def milp_model(inst: Instance) -> LinearProgram:
    """Compact positional MILP: ``x_i_j = 1`` iff job ``i`` sits in the ``j``-th batch."""
    n = inst.n
    big_m = sum(job.p for job in inst.jobs)
    lp = LinearProgram(f"p-batch total completion time, n={n} C={inst.capacity} M={big_m}")
    lp.objective = [(1, f"c_{i}") for i in range(1, n + 1)]
    for i in range(1, n + 1):
        lp.add_constraint(f"assign_{i}", [(1, f"x_{i}_{j}") for j in range(1, n + 1)], "=", 1)
    for j in range(1, n + 1):
        lp.add_constraint(f"cap_{j}", [(inst.s(i), f"x_{i}_{j}") for i in range(1, n + 1)], "<=", inst.capacity)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            lp.add_constraint(f"ptime_{i}_{j}", [(1, f"P_{j}"), (-inst.p(i), f"x_{i}_{j}")], ">=", 0)
    lp.add_constraint("chain_1", [(1, "C_1"), (-1, "P_1")], ">=", 0)
    for j in range(2, n + 1):
        lp.add_constraint(f"chain_{j}", [(1, f"C_{j}"), (-1, f"C_{j - 1}"), (-1, f"P_{j}")], ">=", 0)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            lp.add_constraint(f"link_{i}_{j}", [(1, f"c_{i}"), (-1, f"C_{j}"), (-big_m, f"x_{i}_{j}")], ">=", -big_m)
    lp.binaries = [f"x_{i}_{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    return lp


def export_milp(inst: Instance, path=None) -> str:
    """Render the MILP as LP text; also write it to ``path`` when given."""
    text = milp_model(inst).render()
    if path is not None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    return text
