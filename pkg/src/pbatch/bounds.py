"""Preemptive parallel-machine lower bound (PR) for benchmarking CG-LB.

The batch machine of capacity ``C`` is relaxed to ``C`` unit-width parallel
machines with preemption (``m * C`` for ``m`` batch machines).  Whatever the
schedule, the ``k``-th job to finish

* finishes no earlier than the ``k``-th smallest processing time, and
* finishes no earlier than ``W_k / (m C)``, where ``W_k`` is the sum of the
  ``k`` smallest works ``s_j p_j``, since ``k`` completed jobs carry at least
  that much work and the relaxation processes at most ``m C`` per time unit.

Both sequences are sorted independently; sorting works in SPT order instead
would overstate ``W_k`` when a short job is also a wide one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance


@dataclass(frozen=True)
class PrBound:
    value: float
    machine_count: int


def pr_bound(inst: Instance) -> PrBound:
    width = inst.machines * inst.capacity
    times = sorted(job.p for job in inst.jobs)
    works = sorted(job.p * job.s for job in inst.jobs)
    total = 0.0
    work = 0
    for p, w in zip(times, works):
        work += w
        total += max(p, work / width)
    return PrBound(total, width)
