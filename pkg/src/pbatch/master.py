"""Continuous restricted master over arc columns.

Rows are laid out as ``m`` blocks of ``n + 1`` flow-conservation rows (one
block per machine) followed by ``n`` partition rows.  A column ``(i, k, B)``
on machine ``h`` has ``+1`` at the flow row of ``i``, ``-1`` at the flow row
of ``k`` and ``+1`` at the partition row of every job in ``B``, so its
reduced cost is ``c - (u_i^h - u_k^h) - sum_{j in B} v_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np

from . import simplex
from .errors import ForeignJob, Infeasible, NumericalFailure
from .model import Arc, Instance, empty_arcs
from .pricing import DualValues


class LPEngine(Protocol):
    """What the master needs from an LP solver."""

    status: str | None
    objective: float | None

    def add_columns(self, rows, vals, costs, lb=0.0, ub=np.inf) -> range: ...

    def set_bounds(self, j: int, lb: float, ub: float) -> None: ...

    def solve(self, max_iter: int = ...) -> str: ...

    def primal(self) -> np.ndarray: ...

    def duals(self) -> np.ndarray: ...


class HighsEngine:
    """Adapter running scipy's HiGHS from scratch on every solve (no warm start)."""

    def __init__(self, b):
        self.b = np.asarray(b, dtype=float)
        self._rows, self._vals, self._c, self._lb, self._ub = [], [], [], [], []
        self.status = None
        self.objective = None
        self._x = np.zeros(0)
        self._y = np.zeros(self.b.shape[0])

    def add_columns(self, rows, vals, costs, lb=0.0, ub=np.inf):
        start = len(self._c)
        for r, v, c in zip(rows, vals, costs):
            self._rows.append(np.asarray(r))
            self._vals.append(np.asarray(v, dtype=float))
            self._c.append(float(c))
            self._lb.append(lb)
            self._ub.append(ub)
        return range(start, len(self._c))

    def set_bounds(self, j, lb, ub):
        self._lb[j], self._ub[j] = lb, ub

    def solve(self, max_iter=100000):
        import scipy.sparse as sp
        from scipy.optimize import linprog

        if not self._c:
            self.status = simplex.INFEASIBLE
            return self.status
        indptr = np.concatenate([[0], np.cumsum([len(r) for r in self._rows])])
        A = sp.csc_matrix((np.concatenate(self._vals), np.concatenate(self._rows), indptr),
                          shape=(self.b.shape[0], len(self._c)))
        res = linprog(self._c, A_eq=A, b_eq=self.b, bounds=list(zip(self._lb, self._ub)),
                      method="highs", options={"maxiter": max_iter})
        if res.status == 0:
            self.status = simplex.OPTIMAL
            self._x = res.x
            self._y = res.eqlin.marginals
            self.objective = float(res.fun)
        elif res.status == 2:
            self.status = simplex.INFEASIBLE
        elif res.status == 1:
            self.status = simplex.ITERATION_LIMIT
        else:
            self.status = simplex.UNBOUNDED if res.status == 3 else "error"
        return self.status

    def primal(self):
        return np.array(self._x, dtype=float)

    def duals(self):
        return np.array(self._y, dtype=float)


@dataclass(frozen=True)
class LpSolution:
    status: str
    objective: float | None
    primal: np.ndarray
    duals: DualValues | None


class RestrictedMaster:
    """Restricted master LP; for ``m > 1`` all empty arcs are present from the start."""

    def __init__(self, inst: Instance, engine_factory=None):
        self.inst = inst
        n, m = inst.n, inst.machines
        self.flow_rows = m * (n + 1)
        self.num_rows = self.flow_rows + n
        b = np.zeros(self.num_rows)
        for h in range(m):
            b[h * (n + 1)] = 1.0
            b[h * (n + 1) + n] = -1.0
        b[self.flow_rows:] = 1.0
        self.rhs = b
        factory = engine_factory or simplex.BoundedSimplex
        self.engine: LPEngine = factory(b)
        self.columns: list[tuple[Arc, int]] = []
        self._index: dict[tuple, int] = {}
        if m > 1:
            for h in range(m):
                self._add([(arc, h) for arc in empty_arcs(inst)])

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    def _footprint(self, arc: Arc, h: int):
        n = self.inst.n
        base = h * (n + 1)
        rows = [base + arc.i - 1, base + arc.k - 1] + [self.flow_rows + j - 1 for j in arc.jobs]
        vals = [1.0, -1.0] + [1.0] * len(arc.jobs)
        return rows, vals

    def _check(self, arc: Arc) -> None:
        n = self.inst.n
        for j in arc.jobs:
            if not 1 <= j <= n:
                raise ForeignJob(f"arc ({arc.i}, {arc.k}) references unknown job {j}")
        if not 1 <= arc.i < arc.k <= n + 1:
            raise ValueError(f"bad arc nodes ({arc.i}, {arc.k})")
        if arc.jobs and len(arc.jobs) != arc.k - arc.i:
            raise ValueError(f"arc ({arc.i}, {arc.k}) carries {len(arc.jobs)} jobs")
        if not arc.jobs and arc.i != 1:
            raise ValueError("empty arcs must leave node 1")

    def _add(self, pairs: list[tuple[Arc, int]]) -> int:
        fresh = []
        for arc, h in pairs:
            key = (arc.i, arc.k, arc.jobs, h)
            if key in self._index:
                continue
            self._index[key] = len(self.columns) + len(fresh)
            fresh.append((arc, h))
        if fresh:
            rows, vals = zip(*(self._footprint(a, h) for a, h in fresh))
            self.engine.add_columns(list(rows), list(vals), [a.cost for a, _ in fresh])
            self.columns.extend(fresh)
        return len(fresh)

    def add_columns(self, arcs: Iterable[Arc], machines: Iterable[int] | None = None) -> int:
        """Add arcs (on every machine unless ``machines`` is given); returns the number of new columns."""
        arcs = list(arcs)
        for arc in arcs:
            self._check(arc)
        hs = list(range(self.inst.machines)) if machines is None else list(machines)
        return self._add([(arc, h) for arc in arcs for h in hs])

    def column_index(self, arc: Arc, machine: int = 0) -> int | None:
        return self._index.get((arc.i, arc.k, arc.jobs, machine))

    def crash(self, pairs: Iterable[tuple[Arc, int]]) -> None:
        """Hint a starting basis to engines that take one."""
        crash = getattr(self.engine, "crash", None)
        if crash is not None:
            crash([self._index[(a.i, a.k, a.jobs, h)] for a, h in pairs])

    def set_bounds(self, j: int, lb: float, ub: float) -> None:
        self.engine.set_bounds(j, lb, ub)

    def solve(self, max_iter: int = 100000) -> LpSolution:
        if not self.columns:
            return LpSolution(simplex.INFEASIBLE, None, np.zeros(0), None)
        status = self.engine.solve(max_iter=max_iter)
        if status != simplex.OPTIMAL:
            return LpSolution(status, None, np.zeros(self.num_columns), None)
        n, m = self.inst.n, self.inst.machines
        y = self.engine.duals()
        u = y[: self.flow_rows].reshape(m, n + 1)
        v = y[self.flow_rows:]
        return LpSolution(status, self.engine.objective, self.engine.primal(), DualValues.of(u, v))

    def reduced_costs(self, duals: DualValues) -> np.ndarray:
        """``c - (u_i^h - u_k^h) - sum_B v`` for every column, in column order."""
        n = self.inst.n
        u, v = duals.u, duals.v
        out = np.empty(self.num_columns)
        for j, (arc, h) in enumerate(self.columns):
            out[j] = arc.cost - (u[h, arc.i - 1] - u[h, arc.k - 1]) - sum(v[x - 1] for x in arc.jobs)
        return out

    def to_lp_text(self) -> str:
        from .lpformat import LinearProgram

        lp = LinearProgram(f"restricted master n={self.inst.n} m={self.inst.machines}")
        names = [_column_name(a, h) for a, h in self.columns]
        lp.objective = [(a.cost, name) for (a, _), name in zip(self.columns, names) if a.cost]
        per_row: list[list[tuple[int, str]]] = [[] for _ in range(self.num_rows)]
        for (arc, h), name in zip(self.columns, names):
            rows, vals = self._footprint(arc, h)
            for r, val in zip(rows, vals):
                per_row[r].append((int(val), name))
        n = self.inst.n
        for r, terms in enumerate(per_row):
            if r < self.flow_rows:
                h, node = divmod(r, n + 1)
                label = f"flow_{node + 1}_{h + 1}"
            else:
                label = f"part_{r - self.flow_rows + 1}"
            lp.add_constraint(label, terms, "=", int(self.rhs[r]))
        lp.bounds = [(name, 0, None) for name in names]
        return lp.render()


def _column_name(arc: Arc, h: int) -> str:
    jobs = "_".join(map(str, arc.jobs)) if arc.jobs else "e"
    return f"x_{arc.i}_{arc.k}_{jobs}_m{h + 1}"


def build_master(inst: Instance, columns: Iterable[Arc] = (), engine_factory=None) -> RestrictedMaster:
    master = RestrictedMaster(inst, engine_factory)
    master.add_columns(columns)
    return master


def add_columns(master: RestrictedMaster, arcs: Iterable[Arc]) -> int:
    return master.add_columns(arcs)


def solve_lp(master: RestrictedMaster, max_iter: int = 100000) -> LpSolution:
    """Solve the current master; raises :class:`Infeasible` or :class:`NumericalFailure`."""
    sol = master.solve(max_iter=max_iter)
    if sol.status == simplex.INFEASIBLE:
        raise Infeasible("restricted master has no feasible solution")
    if sol.status != simplex.OPTIMAL:
        raise NumericalFailure(f"LP stopped with status {sol.status}")
    return sol
