"""Price-and-branch: column generation for CG-LB, then branch and bound on the final master for CG-UB."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .errors import NonPositiveUb
from .master import LpSolution, RestrictedMaster, build_master, solve_lp
from .model import Arc, Instance, Schedule, check_schedule, evaluate_schedule, make_arc, paths_to_schedule, smith_order
from .pricing import EPS_NEG, DualValues, new_cols_identical, new_cols_single

logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
CERTIFY_TOL = 1e-6
HEURISTIC_EVERY = 25


@dataclass
class CgConfig:
    ub_time_limit: float | None = None
    eps_neg: float = EPS_NEG
    max_cg_iterations: int = 10000
    branch_node_limit: int = 1_000_000
    pricing: str = "auto"

    def __post_init__(self):
        if self.ub_time_limit is not None and self.ub_time_limit <= 0:
            raise ValueError("ub_time_limit must be positive")
        if self.max_cg_iterations <= 0 or self.branch_node_limit <= 0:
            raise ValueError("iteration and node limits must be positive")
        if self.pricing not in ("auto", "single", "identical"):
            raise ValueError(f"unknown pricing mode {self.pricing!r}")

    def time_limit(self, inst: Instance) -> float:
        if self.ub_time_limit is not None:
            return self.ub_time_limit
        return 60.0 if inst.machines == 1 else 180.0


@dataclass
class CgRun:
    lb: float | None
    converged: bool
    master: RestrictedMaster
    solution: LpSolution
    iterations: int
    columns_generated: int
    seconds: float

    @property
    def duals(self) -> DualValues | None:
        return self.solution.duals


@dataclass
class CgResult:
    cg_lb: float | None
    cg_ub: int | None
    gap_percent: float | None
    schedule: Schedule | None
    certified_optimal: bool
    converged: bool
    iterations: int
    columns_generated: int
    columns_final: int
    lb_seconds: float
    ub_seconds: float
    bnb_nodes: int = 0
    ub_limit_hit: bool = False
    ub_source: str | None = None
    notes: list[str] = field(default_factory=list)


def init_cols(inst: Instance) -> list[Arc]:
    """Initial arcs from batches of SPT-consecutive jobs.

    For each start job ``j`` (SPT order) the batch begins as ``{j}`` and
    absorbs every later job that still fits; each intermediate batch is
    placed at every feasible position.
    """
    n = inst.n
    order = inst.spt_order()
    arcs = set()
    for a, j in enumerate(order):
        batch = [j]
        size = inst.s(j)
        grown = [tuple(batch)]
        for h in order[a + 1:]:
            if size + inst.s(h) <= inst.capacity:
                batch.append(h)
                size += inst.s(h)
                grown.append(tuple(batch))
        for b in grown:
            for i in range(1, n - len(b) + 2):
                arcs.add(make_arc(inst, i, i + len(b), b))
    return sorted(arcs)


def spt_path(inst: Instance) -> list[tuple[Arc, int]]:
    """Next-fit batches of SPT-consecutive jobs on machine 0, other machines idle.

    Every arc is an init column, so this is a feasible starting basis.
    """
    batches: list[list[int]] = []
    size = inst.capacity + 1
    for j in inst.spt_order():
        if size + inst.s(j) > inst.capacity:
            batches.append([])
            size = 0
        batches[-1].append(j)
        size += inst.s(j)
    pairs, i = [], 1
    for b in batches:
        pairs.append((make_arc(inst, i, i + len(b), tuple(b)), 0))
        i += len(b)
    pairs.extend((Arc(1, inst.n + 1, (), 0), h) for h in range(1, inst.machines))
    return pairs


def _pricer(inst: Instance, config: CgConfig):
    mode = config.pricing
    if mode == "auto":
        mode = "single" if inst.machines == 1 else "identical"
    if mode == "single" and inst.machines > 1:
        raise ValueError("single-machine pricing needs m = 1")
    return new_cols_single if mode == "single" else new_cols_identical


def run_cg(inst: Instance, config: CgConfig | None = None, engine_factory=None) -> CgRun:
    """Column generation until pricing finds nothing (or the iteration cap).

    ``lb`` is only reported when pricing came back empty.
    """
    config = config or CgConfig()
    price = _pricer(inst, config)
    start = time.perf_counter()
    master = build_master(inst, init_cols(inst), engine_factory)
    master.crash(spt_path(inst))
    initial = master.num_columns
    converged = False
    iterations = 0
    while True:
        sol = solve_lp(master)
        iterations += 1
        arcs = price(inst, sol.duals, config.eps_neg)
        if not arcs:
            converged = True
            break
        if master.add_columns(arcs) == 0:
            logger.warning("pricing returned only known columns; stopping without a certified bound")
            break
        if iterations >= config.max_cg_iterations:
            logger.warning("column generation hit the iteration cap (%d)", iterations)
            sol = solve_lp(master)  # keep primal in step with the column set
            break
    elapsed = time.perf_counter() - start
    return CgRun(
        lb=sol.objective if converged else None,
        converged=converged,
        master=master,
        solution=sol,
        iterations=iterations,
        columns_generated=master.num_columns - initial,
        seconds=elapsed,
    )


def decode_columns(master: RestrictedMaster, chosen) -> Schedule:
    """Turn an integral set of master columns into a schedule."""
    inst = master.inst
    per_machine: list[dict[int, Arc]] = [dict() for _ in range(inst.machines)]
    for j in chosen:
        arc, h = master.columns[j]
        per_machine[h][arc.i] = arc
    paths = []
    for arcs in per_machine:
        path = []
        node = 1
        while node in arcs and node <= inst.n:
            path.append(arcs[node])
            node = arcs[node].k
        paths.append(path)
    return paths_to_schedule(paths, inst)


def greedy_incumbent(master: RestrictedMaster, primal: np.ndarray) -> Schedule:
    """Round an LP solution to a feasible schedule.

    Columns are taken by decreasing LP value while their jobs are still
    uncovered; leftover jobs become singleton batches on the least loaded
    machine, and every machine is sequenced by Smith's rule.
    """
    inst = master.inst
    covered: set[int] = set()
    batches: list[list[tuple[int, ...]]] = [[] for _ in range(inst.machines)]
    order = sorted(range(master.num_columns), key=lambda j: (-primal[j], j))
    for j in order:
        if primal[j] <= INTEGRALITY_TOL:
            break
        arc, h = master.columns[j]
        if arc.jobs and covered.isdisjoint(arc.jobs):
            batches[h].append(arc.jobs)
            covered.update(arc.jobs)
    load = [sum(max(inst.p(x) for x in b) for b in seq) for seq in batches]
    for j in inst.spt_order():
        if j not in covered:
            h = int(np.argmin(load))
            batches[h].append((j,))
            load[h] += inst.p(j)
    return Schedule.from_lists([smith_order(seq, inst) for seq in batches])


def _machine_value(inst: Instance, batches) -> int:
    t = total = 0
    for b in smith_order(batches, inst):
        t += max(inst.p(j) for j in b)
        total += t * len(b)
    return total


def local_search(sched: Schedule, inst: Instance, max_passes: int = 50) -> Schedule:
    """First-improvement descent over single-job moves and pairwise job swaps.

    Moves put a job into another batch (any machine) or into a new
    singleton batch; every machine is re-sequenced by Smith's rule.
    """
    batches = [[set(b) for b in seq] for seq in sched.sequences]
    cap = inst.capacity

    def size(b):
        return sum(inst.s(j) for j in b)

    def value(h):
        return _machine_value(inst, [b for b in batches[h] if b])

    vals = [value(h) for h in range(len(batches))]
    for _ in range(max_passes):
        improved = False
        slots = [(h, a) for h in range(len(batches)) for a in range(len(batches[h]))]
        for h1, a1 in slots:
            for j in sorted(batches[h1][a1]):
                src = batches[h1][a1]
                if j not in src:
                    continue
                targets = [(h, a) for h, a in slots if (h, a) != (h1, a1)]
                targets += [(h, None) for h in range(len(batches))]
                for h2, a2 in targets:
                    if a2 is None and len(src) == 1 and h2 == h1:
                        continue
                    dst = batches[h2][a2] if a2 is not None else None
                    if dst is not None and (not dst or size(dst) + inst.s(j) > cap):
                        continue
                    src.discard(j)
                    if dst is None:
                        batches[h2].append({j})
                    else:
                        dst.add(j)
                    new = {h1: value(h1), h2: value(h2)}
                    old = vals[h1] + (vals[h2] if h2 != h1 else 0)
                    if sum(new.values()) < old:
                        vals[h1], vals[h2] = new[h1], new[h2]
                        improved = True
                        break
                    if dst is None:
                        batches[h2].pop()
                    else:
                        dst.discard(j)
                    src.add(j)
        for h1, a1 in slots:
            for h2, a2 in slots:
                if (h2, a2) <= (h1, a1):
                    continue
                b1, b2 = batches[h1][a1], batches[h2][a2]
                if not b1 or not b2:
                    continue
                done = False
                for j1 in sorted(b1):
                    for j2 in sorted(b2):
                        ds = inst.s(j2) - inst.s(j1)
                        if size(b1) + ds > cap or size(b2) - ds > cap:
                            continue
                        b1.symmetric_difference_update({j1, j2})
                        b2.symmetric_difference_update({j1, j2})
                        new = {h1: value(h1), h2: value(h2)}
                        old = vals[h1] + (vals[h2] if h2 != h1 else 0)
                        if sum(new.values()) < old:
                            vals[h1], vals[h2] = new[h1], new[h2]
                            improved = done = True
                            break
                        b1.symmetric_difference_update({j1, j2})
                        b2.symmetric_difference_update({j1, j2})
                    if done:
                        break
        for h in range(len(batches)):
            batches[h] = [b for b in batches[h] if b]
        if not improved:
            break
    return Schedule.from_lists([smith_order([b for b in seq if b], inst) for seq in batches])


@dataclass
class BnbOutcome:
    value: int
    schedule: Schedule
    nodes: int
    limit_hit: bool
    improved: bool


def branch_and_bound(master: RestrictedMaster, incumbent: Schedule, time_limit: float,
                     node_limit: int) -> BnbOutcome:
    """Depth-first LP-based branch and bound over the master's current columns.

    Branches on the fractional column closest to 0.5 (lowest index on ties)
    and explores the fix-to-1 child first.  The node LP is rounded by
    :func:`greedy_incumbent` plus :func:`local_search` at the root and every
    ``HEURISTIC_EVERY`` nodes.  Columns whose root reduced cost
    alone lifts the bound past ``incumbent - 1`` are fixed to zero for the
    whole search.  Column bounds are restored on exit.
    """
    inst = master.inst
    best_val = evaluate_schedule(incumbent, inst)
    best = incumbent
    improved = False
    deadline = time.perf_counter() + time_limit
    stack: list[dict[int, int]] = [{}]
    current: dict[int, int] = {}
    banned: set[int] = set()
    root = None
    nodes = 0
    limit_hit = False

    def ban_by_reduced_cost():
        # any solution using column j costs at least root bound + rc_j
        excess = root[0] + root[1] - (best_val - 1) > CERTIFY_TOL
        for j in np.flatnonzero(excess):
            j = int(j)
            if j not in banned:
                banned.add(j)
                if j not in current:
                    master.set_bounds(j, 0.0, 0.0)

    try:
        while stack:
            if nodes >= node_limit or time.perf_counter() >= deadline:
                limit_hit = True
                break
            fixing = stack.pop()
            for j in current:
                if j not in fixing:
                    master.set_bounds(j, 0.0, 0.0 if j in banned else np.inf)
            for j, val in fixing.items():
                if current.get(j) != val:
                    master.set_bounds(j, float(val), float(val))
            current = fixing
            nodes += 1
            sol = master.solve()
            if sol.status != simplex.OPTIMAL:
                continue
            if root is None:
                root = (sol.objective, master.reduced_costs(sol.duals))
                ban_by_reduced_cost()
            if math.ceil(sol.objective - CERTIFY_TOL) >= best_val:
                continue
            x = sol.primal
            if nodes == 1 or nodes % HEURISTIC_EVERY == 0:
                sched = local_search(greedy_incumbent(master, x), inst)
                val = evaluate_schedule(sched, inst)
                if val < best_val:
                    best_val, best, improved = val, sched, True
                    ban_by_reduced_cost()
                    if math.ceil(sol.objective - CERTIFY_TOL) >= best_val:
                        continue
            frac = np.flatnonzero(np.abs(x - np.round(x)) > INTEGRALITY_TOL)
            if frac.size == 0:
                sched = decode_columns(master, np.flatnonzero(x > 0.5))
                val = evaluate_schedule(sched, inst)
                if val < best_val:
                    sched = local_search(sched, inst)
                    best_val, best, improved = evaluate_schedule(sched, inst), sched, True
                    ban_by_reduced_cost()
                continue
            j = int(frac[np.argmin(np.abs(x[frac] - 0.5))])
            stack.append({**fixing, j: 0})
            stack.append({**fixing, j: 1})
    finally:
        for j in set(current) | banned:
            master.set_bounds(j, 0.0, np.inf)
    return BnbOutcome(best_val, best, nodes, limit_hit, improved)


def gap(ub: float, lb: float) -> float:
    """Relative gap ``100 (ub - lb) / ub`` in percent."""
    if ub <= 0:
        raise NonPositiveUb(f"upper bound must be positive, got {ub}")
    return 100.0 * (ub - lb) / ub


def certified(ub: float, lb: float) -> bool:
    return ub - lb <= CERTIFY_TOL * max(1.0, ub)


def price_and_branch(inst: Instance, config: CgConfig | None = None, engine_factory=None) -> CgResult:
    config = config or CgConfig()
    run = run_cg(inst, config, engine_factory)
    notes = []
    if not run.converged:
        notes.append("column generation did not converge; no lower bound claimed")
    start = time.perf_counter()
    incumbent = local_search(greedy_incumbent(run.master, run.solution.primal), inst)
    outcome = branch_and_bound(run.master, incumbent, config.time_limit(inst), config.branch_node_limit)
    ub_seconds = time.perf_counter() - start
    if outcome.limit_hit:
        notes.append("branch and bound stopped at its time or node limit")

    check_schedule(outcome.schedule, inst)
    ub = evaluate_schedule(outcome.schedule, inst)
    if ub != outcome.value:
        raise AssertionError(f"search reported {outcome.value}, schedule evaluates to {ub}")
    lb = run.lb
    return CgResult(
        cg_lb=lb,
        cg_ub=ub,
        gap_percent=gap(ub, lb) if lb is not None else None,
        schedule=outcome.schedule,
        certified_optimal=lb is not None and certified(ub, lb),
        converged=run.converged,
        iterations=run.iterations,
        columns_generated=run.columns_generated,
        columns_final=run.master.num_columns,
        lb_seconds=run.seconds,
        ub_seconds=ub_seconds,
        bnb_nodes=outcome.nodes,
        ub_limit_hit=outcome.limit_hit,
        ub_source="branch-and-bound" if outcome.improved else "greedy",
        notes=notes,
    )
