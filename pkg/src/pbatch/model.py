"""Instances, batches, schedules and the arc-flow encoding of batch sequences.

A batch sequence on one machine maps to a path ``1 -> n+1`` in a layered
multigraph whose nodes count scheduled jobs: an arc ``(i, k, B)`` carries
``k - i = |B|`` jobs, and ``n - i + 1`` jobs are scheduled from ``B`` to the
end of the sequence.  Every job of every later batch waits for ``B``, so the
arc's exact contribution to the total completion time is ``(n - i + 1) * p_B``.

With ``m`` machines every machine gets its own path, prefixed by an empty
placeholder arc ``(1, k, ())`` whenever the machine handles fewer than ``n``
jobs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    BrokenChain,
    CapacityViolation,
    EmptyInstance,
    NonPositive,
    NotAPartition,
    OversizedJob,
    PartitionMismatch,
)


@dataclass(frozen=True)
class Job:
    id: int
    p: int
    s: int


@dataclass(frozen=True)
class Instance:
    jobs: tuple[Job, ...]
    capacity: int
    machines: int = 1

    @property
    def n(self) -> int:
        return len(self.jobs)

    def job(self, job_id: int) -> Job:
        return self.jobs[job_id - 1]

    def p(self, job_id: int) -> int:
        return self.jobs[job_id - 1].p

    def s(self, job_id: int) -> int:
        return self.jobs[job_id - 1].s

    def lpt_order(self) -> list[int]:
        """Job ids by non-increasing processing time, ties by ascending id."""
        return sorted(range(1, self.n + 1), key=lambda j: (-self.p(j), j))

    def spt_order(self) -> list[int]:
        """Job ids by non-decreasing processing time, ties by ascending id."""
        return sorted(range(1, self.n + 1), key=lambda j: (self.p(j), j))

    def with_machines(self, machines: int) -> "Instance":
        return validate_instance([(j.p, j.s) for j in self.jobs], self.capacity, machines)


def validate_instance(raw: Iterable[tuple[int, int]], capacity: int, machines: int = 1) -> Instance:
    """Build an :class:`Instance` from ``(p, s)`` pairs, ids assigned 1..n in order."""
    pairs = [tuple(r) for r in raw]
    if not pairs:
        raise EmptyInstance("instance has no jobs")
    if int(machines) < 1:
        raise ValueError(f"machine count must be >= 1, got {machines}")
    if int(capacity) < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    jobs = []
    for idx, (p, s) in enumerate(pairs, start=1):
        if int(p) != p or p < 1:
            raise NonPositive(idx, "p")
        if int(s) != s or s < 1:
            raise NonPositive(idx, "s")
        if s > capacity:
            raise OversizedJob(idx, s, capacity)
        jobs.append(Job(idx, int(p), int(s)))
    return Instance(tuple(jobs), int(capacity), int(machines))


@dataclass(frozen=True)
class Batch:
    jobs: tuple[int, ...]
    size: int
    proc_time: int

    @classmethod
    def of(cls, inst: Instance, job_ids: Iterable[int]) -> "Batch":
        ids = tuple(sorted(job_ids))
        if not ids:
            return cls((), 0, 0)
        return cls(ids, sum(inst.s(j) for j in ids), max(inst.p(j) for j in ids))

    def __len__(self) -> int:
        return len(self.jobs)


@dataclass(frozen=True, order=True)
class Arc:
    """Arc ``(i, k, B)`` of the sequence graph.

    ``jobs`` is the sorted tuple of job ids; the empty tuple marks a
    placeholder arc, which only leaves node 1 and costs nothing.
    """

    i: int
    k: int
    jobs: tuple[int, ...]
    cost: int

    @property
    def is_empty(self) -> bool:
        return not self.jobs


def make_arc(inst: Instance, i: int, k: int, jobs: Iterable[int] = ()) -> Arc:
    ids = tuple(sorted(jobs))
    n = inst.n
    if not 1 <= i < k <= n + 1:
        raise ValueError(f"bad arc nodes ({i}, {k}) for n={n}")
    if not ids:
        if i != 1:
            raise ValueError("empty arcs must leave node 1")
        return Arc(i, k, (), 0)
    if len(ids) != k - i:
        raise ValueError(f"arc ({i}, {k}) needs {k - i} jobs, got {len(ids)}")
    return Arc(i, k, ids, (n - i + 1) * max(inst.p(j) for j in ids))


def empty_arcs(inst: Instance) -> list[Arc]:
    return [Arc(1, k, (), 0) for k in range(2, inst.n + 2)]


@dataclass(frozen=True)
class Schedule:
    """Batch sequences, one per machine; batches are sorted job-id tuples."""

    sequences: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def from_lists(cls, sequences: Sequence[Sequence[Iterable[int]]]) -> "Schedule":
        return cls(tuple(tuple(tuple(sorted(b)) for b in seq) for seq in sequences))

    @property
    def machines(self) -> int:
        return len(self.sequences)

    def completion_times(self, inst: Instance) -> dict[int, int]:
        done = {}
        for seq in self.sequences:
            t = 0
            for batch in seq:
                t += max(inst.p(j) for j in batch)
                for j in batch:
                    done[j] = t
        return done

    def to_lists(self) -> list[list[list[int]]]:
        return [[list(b) for b in seq] for seq in self.sequences]


def check_schedule(sched: Schedule, inst: Instance) -> None:
    """Raise unless ``sched`` partitions all jobs into capacity-feasible batches."""
    if sched.machines != inst.machines:
        raise NotAPartition(f"schedule has {sched.machines} sequences, instance has {inst.machines} machines")
    seen = []
    for seq in sched.sequences:
        for batch in seq:
            if not batch:
                raise NotAPartition("empty batch in schedule")
            if sum(inst.s(j) for j in batch if 1 <= j <= inst.n) > inst.capacity:
                raise CapacityViolation(f"batch {batch} exceeds capacity {inst.capacity}")
            seen.extend(batch)
    if sorted(seen) != list(range(1, inst.n + 1)):
        raise NotAPartition("batches do not partition the job set")


def evaluate_schedule(sched: Schedule, inst: Instance) -> int:
    """Total completion time, computed directly from batch completion times."""
    check_schedule(sched, inst)
    return sum(sched.completion_times(inst).values())


def schedule_to_paths(sched: Schedule, inst: Instance) -> list[list[Arc]]:
    check_schedule(sched, inst)
    n = inst.n
    paths = []
    for seq in sched.sequences:
        count = sum(len(b) for b in seq)
        node = n + 1 - count
        path = []
        if node > 1:
            path.append(Arc(1, node, (), 0))
        for batch in seq:
            arc = make_arc(inst, node, node + len(batch), batch)
            path.append(arc)
            node = arc.k
        paths.append(path)
    return paths


def _check_path(path: Sequence[Arc], n: int) -> None:
    if not path:
        raise BrokenChain("empty path")
    if path[0].i != 1:
        raise BrokenChain(f"path starts at node {path[0].i}, not 1")
    if path[-1].k != n + 1:
        raise BrokenChain(f"path ends at node {path[-1].k}, not {n + 1}")
    for a, b in zip(path, path[1:]):
        if a.k != b.i:
            raise BrokenChain(f"arc ending at {a.k} followed by arc starting at {b.i}")
        if b.is_empty:
            raise BrokenChain("empty arc inside a path")


def paths_to_schedule(paths: Sequence[Sequence[Arc]], inst: Instance) -> Schedule:
    n = inst.n
    if len(paths) != inst.machines:
        raise PartitionMismatch(f"{len(paths)} paths for {inst.machines} machines")
    covered = []
    for path in paths:
        _check_path(path, n)
        covered.extend(j for arc in path for j in arc.jobs)
    if sorted(covered) != list(range(1, n + 1)):
        raise PartitionMismatch("paths do not partition the job set")
    return Schedule(tuple(tuple(arc.jobs for arc in path if not arc.is_empty) for path in paths))


def path_cost(paths: Sequence[Sequence[Arc]], inst: Instance) -> int:
    """Sum of positional arc costs; equals :func:`evaluate_schedule` of the decoded schedule."""
    for path in paths:
        _check_path(path, inst.n)
    n = inst.n
    return sum((n - arc.i + 1) * max(inst.p(j) for j in arc.jobs) for path in paths for arc in path if arc.jobs)


def smith_order(batches: Iterable[Iterable[int]], inst: Instance) -> list[tuple[int, ...]]:
    """Sequence batches by non-decreasing ``p_B / |B|``, ties by smaller ``p_B``.

    Swapping adjacent batches ``A, B`` changes the total by
    ``|A| p_B - |B| p_A``, so this order is optimal for a fixed batch set.
    """
    batches = [tuple(sorted(b)) for b in batches]

    def key(b):
        pb = max(inst.p(j) for j in b)
        return (Fraction(pb, len(b)), pb, b)

    return sorted(batches, key=key)
