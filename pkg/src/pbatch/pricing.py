"""Column pricing via a family of cardinality-constrained knapsacks.

Jobs are renumbered in LPT order (``p_1 >= ... >= p_n``, ties by id) and

    g_r(tau, l) = max { sum_{j >= r} v_j y_j : sum s_j y_j <= tau, sum y_j = l }

is filled by the recursion ``g_r = max(g_{r+1}(tau - s_r, l - 1) + v_r,
g_{r+1}(tau, l))``.  For a pair of nodes ``i < k`` the cheapest arc is one of
``(i, k, B_r(C, k - i))`` with ``r`` ranging over the positions where the
processing time strictly drops, because ``p_B`` of the knapsack optimum from
``r`` never exceeds ``p_r``.

The table is built layer by layer (one layer per ``r``, all ``tau`` and
``l``) on first query, with numpy doing the per-layer work.  Infeasible
states are tracked by an explicit boolean mask, never by a sentinel float.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange
from .model import Arc, Instance

EPS_NEG = 1e-6


@dataclass(frozen=True)
class DualValues:
    """Simplex multipliers of the restricted master.

    ``u`` has shape ``(m, n + 1)``; ``u[h, node - 1]`` belongs to the flow row
    of ``node`` on machine ``h``.  ``v`` has shape ``(n,)``; ``v[j - 1]``
    belongs to the partition row of job ``j``.
    """

    u: np.ndarray
    v: np.ndarray

    @classmethod
    def of(cls, u, v) -> "DualValues":
        u = np.atleast_2d(np.asarray(u, dtype=float))
        v = np.asarray(v, dtype=float)
        if u.shape[1] != v.shape[0] + 1:
            raise ValueError(f"u needs n+1={v.shape[0] + 1} entries per machine, got {u.shape[1]}")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("dual values must be finite")
        return cls(u, v)

    @property
    def machines(self) -> int:
        return self.u.shape[0]

    def node_gap(self, single: bool = False) -> np.ndarray:
        """``D[i, k] = max_h (u_i^h - u_k^h)`` with 1-based node indices.

        With ``single`` only machine 0 is used.
        """
        u = self.u[:1] if single else self.u
        size = u.shape[1]
        gap = np.zeros((size + 1, size + 1))
        gap[1:, 1:] = (u[:, :, None] - u[:, None, :]).max(axis=0)
        return gap


class KnapsackTable:
    """Lazily filled state space ``g_r(tau, l)`` for one set of job profits."""

    def __init__(self, inst: Instance, v):
        self.n = inst.n
        self.capacity = inst.capacity
        self.order = inst.lpt_order()
        self.p = np.array([inst.p(j) for j in self.order], dtype=np.int64)
        self.s = np.array([inst.s(j) for j in self.order], dtype=np.int64)
        v = np.asarray(v, dtype=float)
        self.v = np.array([v[j - 1] for j in self.order], dtype=float)
        self.entries = 0
        # layer r -> (value, feasible, take, pmax); arrays are (C + 1, n - r + 2)
        self._layers: dict[int, tuple[np.ndarray, ...]] = {}
        c1 = self.capacity + 1
        self._layers[self.n + 1] = (
            np.zeros((c1, 1)),
            np.ones((c1, 1), dtype=bool),
            np.zeros((c1, 1), dtype=bool),
            np.zeros((c1, 1), dtype=np.int64),
        )
        self._lowest = self.n + 1

    def layer(self, r: int) -> tuple[np.ndarray, ...]:
        while self._lowest > r:
            self._build(self._lowest - 1)
        return self._layers[r]

    def _build(self, r: int) -> None:
        prev_val, prev_feas, _, prev_pmax = self._layers[r + 1]
        c1 = self.capacity + 1
        width = self.n - r + 2
        s_r = int(self.s[r - 1])
        val = np.zeros((c1, width))
        feas = np.zeros((c1, width), dtype=bool)
        pmax = np.zeros((c1, width), dtype=np.int64)
        val[:, : width - 1] = prev_val
        feas[:, : width - 1] = prev_feas
        pmax[:, : width - 1] = prev_pmax

        take = np.zeros((c1, width), dtype=bool)
        if s_r < c1:
            cand_val = prev_val[: c1 - s_r, :] + self.v[r - 1]
            cand_feas = prev_feas[: c1 - s_r, :]
            skip_val = val[s_r:, 1:]
            skip_feas = feas[s_r:, 1:]
            # ties go to including job r
            chosen = cand_feas & (~skip_feas | (cand_val >= skip_val))
            take[s_r:, 1:] = chosen
            val[s_r:, 1:] = np.where(chosen, cand_val, skip_val)
            feas[s_r:, 1:] = skip_feas | cand_feas
            pmax[s_r:, 1:] = np.where(chosen, self.p[r - 1], pmax[s_r:, 1:])
        self._layers[r] = (val, feas, take, pmax)
        self._lowest = r
        self.entries += c1 * (width - 1)

    def _check(self, r: int, tau: int, ell: int) -> None:
        if not 1 <= r <= self.n:
            raise IndexOutOfRange(f"r={r} outside 1..{self.n}")
        if not 0 <= tau <= self.capacity:
            raise IndexOutOfRange(f"tau={tau} outside 0..{self.capacity}")
        if not 0 <= ell <= self.n:
            raise IndexOutOfRange(f"l={ell} outside 0..{self.n}")

    def value(self, r: int, tau: int, ell: int) -> float | None:
        """``g_r(tau, l)``, or ``None`` when no feasible selection exists."""
        self._check(r, tau, ell)
        if ell > self.n - r + 1:
            return None
        val, feas, _, _ = self.layer(r)
        return float(val[tau, ell]) if feas[tau, ell] else None

    def batch_positions(self, r: int, tau: int, ell: int) -> list[int] | None:
        """LPT positions of ``B_r(tau, l)`` recovered by backtracking."""
        if self.value(r, tau, ell) is None:
            return None
        out = []
        q = r
        while ell > 0:
            _, _, take, _ = self._layers[q]
            if take[tau, ell]:
                out.append(q)
                tau -= int(self.s[q - 1])
                ell -= 1
            q += 1
        return out

    def batch(self, r: int, tau: int, ell: int) -> tuple[int, ...] | None:
        pos = self.batch_positions(r, tau, ell)
        if pos is None:
            return None
        return tuple(sorted(self.order[q - 1] for q in pos))


def knapsack(table: KnapsackTable, r: int, tau: int, ell: int):
    """Return ``(g_r(tau, l), B_r(tau, l))``; ``(None, None)`` if infeasible."""
    value = table.value(r, tau, ell)
    if value is None:
        return None, None
    return value, table.batch(r, tau, ell)


def breakpoints(inst: Instance) -> list[int]:
    """LPT positions where the processing time strictly drops, plus position 1."""
    p = [inst.p(j) for j in inst.lpt_order()]
    return [1] + [j for j in range(2, inst.n + 1) if p[j - 1] < p[j - 2]]


def _top_rows(table: KnapsackTable, roots: list[int]):
    """Stack ``g_r(C, .)``, its feasibility and ``p_B`` for every root ``r``."""
    n, cap = table.n, table.capacity
    g = np.zeros((len(roots), n + 1))
    feas = np.zeros((len(roots), n + 1), dtype=bool)
    pb = np.zeros((len(roots), n + 1))
    for row, r in enumerate(roots):
        val, f, _, pm = table.layer(r)
        w = val.shape[1]
        g[row, :w] = val[cap]
        feas[row, :w] = f[cap]
        pb[row, :w] = pm[cap]
    return g, feas, pb


def _scan(inst: Instance, table: KnapsackTable, gap: np.ndarray):
    """Yield ``(ell, roots, rc)`` where ``rc[row, i - 1]`` prices ``(i, i + ell, B_r)``."""
    n = inst.n
    roots = breakpoints(inst)
    g, feas, pb = _top_rows(table, roots)
    for ell in range(1, n + 1):
        rows = np.flatnonzero(feas[:, ell])
        if rows.size == 0:
            continue
        i = np.arange(1, n - ell + 2)
        rc = (
            pb[rows, ell][:, None] * (n - i + 1)[None, :]
            - gap[i, i + ell][None, :]
            - g[rows, ell][:, None]
        )
        yield ell, [roots[x] for x in rows], rc


def _price(inst: Instance, table: KnapsackTable, gap: np.ndarray, eps: float) -> list[Arc]:
    n = inst.n
    found: dict[tuple, Arc] = {}
    for ell, roots, rc in _scan(inst, table, gap):
        for row, col in zip(*np.nonzero(rc < -eps)):
            jobs = table.batch(roots[row], inst.capacity, ell)
            i = int(col) + 1
            key = (i, i + ell, jobs)
            if key not in found:
                found[key] = Arc(i, i + ell, jobs, (n - i + 1) * max(inst.p(j) for j in jobs))
    return sorted(found.values())


def new_cols_single(inst: Instance, duals: DualValues, eps: float = EPS_NEG, table: KnapsackTable | None = None) -> list[Arc]:
    """Arcs with reduced cost below ``-eps`` for the single-machine master."""
    table = table or KnapsackTable(inst, duals.v)
    return _price(inst, table, duals.node_gap(single=True), eps)


def new_cols_identical(inst: Instance, duals: DualValues, eps: float = EPS_NEG, table: KnapsackTable | None = None) -> list[Arc]:
    """Arcs whose best machine reduced cost is below ``-eps`` (identical machines).

    One knapsack table serves every machine; only the largest node-dual
    difference over machines matters for the minimum.
    """
    table = table or KnapsackTable(inst, duals.v)
    return _price(inst, table, duals.node_gap(), eps)


def min_reduced_costs(inst: Instance, duals: DualValues, single: bool = False) -> dict[tuple[int, int], tuple[float, tuple[int, ...]]]:
    """Minimum reduced cost and an attaining batch for every pair ``i < k``.

    Pairs without any capacity-feasible batch of size ``k - i`` are omitted.
    Over several machines the minimum is taken over machines as well.
    """
    table = KnapsackTable(inst, duals.v)
    best: dict[tuple[int, int], tuple[float, tuple[int, ...]]] = {}
    for ell, roots, rc in _scan(inst, table, duals.node_gap(single=single)):
        arg = rc.argmin(axis=0)
        for col, row in enumerate(arg):
            i = col + 1
            best[(i, i + ell)] = (float(rc[row, col]), table.batch(roots[row], inst.capacity, ell))
    return best


def reduced_cost(inst: Instance, duals: DualValues, arc: Arc, machine: int = 0) -> float:
    """Reduced cost of ``arc`` on ``machine``, computed straight from its batch."""
    n = inst.n
    cost = (n - arc.i + 1) * max(inst.p(j) for j in arc.jobs) if arc.jobs else 0
    u = duals.u[machine]
    return cost - (u[arc.i - 1] - u[arc.k - 1]) - sum(duals.v[j - 1] for j in arc.jobs)
