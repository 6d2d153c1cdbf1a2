"""Bounded-variable revised primal simplex for ``min c x, A x = b, lb <= x <= ub``.

Every row owns an artificial column ``e_i`` with bounds ``[0, 0]``, so the
identity is always available as a starting basis.  Any basis that violates
bounds is repaired by a composite phase 1 that minimizes the sum of bound
violations of the basic variables; this is what makes warm starts work
after columns are appended or bounds are tightened.

The basis inverse is kept explicitly, updated by one elimination step per
pivot and recomputed from scratch periodically.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp
from scipy.linalg import qr
from scipy.linalg.blas import dger

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration-limit"
UNBOUNDED = "unbounded"

_AT_LB, _AT_UB, _BASIC = 0, 1, 2


def _rank1(mat, col, row):
    """In-place ``mat -= outer(col, row)``."""
    if mat.flags.f_contiguous:
        dger(-1.0, col, row, a=mat, overwrite_a=1)
    else:
        dger(-1.0, row, col, a=mat.T, overwrite_a=1)


class BoundedSimplex:
    """Primal simplex engine with warm starts.

    Structural columns are numbered from 0 in insertion order.  Internally
    artificial ``i`` is variable ``i`` and structural ``j`` is variable
    ``rows + j``.
    """

    def __init__(self, b, feas_tol=1e-7, opt_tol=1e-9, pivot_tol=1e-7, refactor_every=100,
                 harris=True, perturb_after=20, perturb_scale=1e-6, seed=0,
                 candidates=128, candidate_rounds=64):
        self.b = np.asarray(b, dtype=float)
        self.rows = self.b.shape[0]
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.pivot_tol = pivot_tol
        self.refactor_every = refactor_every
        self.harris = harris
        self.candidates = candidates
        self.candidate_rounds = candidate_rounds
        self.perturb_after = perturb_after
        self.perturb_scale = perturb_scale
        self.seed = seed
        self._saved_bounds = None

        r = self.rows
        self._col_rows = [np.array([i]) for i in range(r)]
        self._col_vals = [np.array([1.0]) for _ in range(r)]
        self.c = np.zeros(r)
        self.lb = np.zeros(r)
        self.ub = np.zeros(r)
        self.state = np.full(r, _BASIC, dtype=np.int8)
        self.x = self.b.copy()
        self.head = np.arange(r)
        self.binv = np.eye(r)
        self._A = None
        self._AT = None
        self.y = np.zeros(r)
        self.status = None
        self.objective = None
        self.iterations = 0

    @property
    def num_columns(self) -> int:
        return self.c.shape[0] - self.rows

    def add_columns(self, rows, vals, costs, lb=0.0, ub=np.inf) -> range:
        """Append structural columns at their lower bound; the basis is kept."""
        start = self.num_columns
        k = len(costs)
        self._col_rows.extend(np.asarray(r, dtype=np.int64) for r in rows)
        self._col_vals.extend(np.asarray(v, dtype=float) for v in vals)
        self.c = np.concatenate([self.c, np.asarray(costs, dtype=float)])
        self.lb = np.concatenate([self.lb, np.full(k, lb, dtype=float)])
        self.ub = np.concatenate([self.ub, np.full(k, ub, dtype=float)])
        self.state = np.concatenate([self.state, np.full(k, _AT_LB, dtype=np.int8)])
        self.x = np.concatenate([self.x, np.full(k, lb, dtype=float)])
        self._A = None
        return range(start, start + k)

    def set_bounds(self, j: int, lb: float, ub: float) -> None:
        v = self.rows + j
        self.lb[v] = lb
        self.ub[v] = ub
        if self.state[v] == _AT_UB and np.isinf(ub):
            self.state[v] = _AT_LB
        if self.state[v] == _AT_LB:
            self.x[v] = lb
        elif self.state[v] == _AT_UB:
            self.x[v] = ub

    def bounds(self, j: int) -> tuple[float, float]:
        v = self.rows + j
        return float(self.lb[v]), float(self.ub[v])

    @property
    def A(self):
        if self._A is None:
            lengths = [len(r) for r in self._col_rows]
            indptr = np.concatenate([[0], np.cumsum(lengths)])
            self._A = sp.csc_matrix(
                (np.concatenate(self._col_vals), np.concatenate(self._col_rows), indptr),
                shape=(self.rows, len(self._col_rows)),
            )
            self._AT = self._A.T.tocsr()
        return self._A

    @property
    def AT(self):
        self.A
        return self._AT

    def _column(self, v: int) -> np.ndarray:
        col = np.zeros(self.rows)
        col[self._col_rows[v]] = self._col_vals[v]
        return col

    def crash(self, columns) -> None:
        """Swap structural columns into the basis, each replacing the artificial
        of the first row in its footprint that still has one.

        Meant for columns forming a known feasible point; a singular result
        is repaired at the next solve.
        """
        r = self.rows
        for j in columns:
            v = r + j
            if self.state[v] == _BASIC:
                continue
            for row in self._col_rows[v]:
                if self.state[row] == _BASIC:
                    pos = int(np.flatnonzero(self.head == row)[0])
                    self.state[row] = _AT_LB
                    self.x[row] = self.lb[row]
                    self.head[pos] = v
                    self.state[v] = _BASIC
                    break

    def _refactor(self) -> None:
        basis = self.AT[self.head].toarray().T
        try:
            self.binv = np.linalg.inv(basis)
            if not np.isfinite(self.binv).all():
                raise np.linalg.LinAlgError("non-finite inverse")
        except np.linalg.LinAlgError:
            logger.info("singular basis, swapping dependent columns for artificials")
            self._repair(basis)
        self._recompute_basics()

    def _repair(self, basis) -> None:
        """Keep a maximal independent set of basic columns and fill up with artificials."""
        r = self.rows
        _, rfac, perm = qr(basis, pivoting=True, mode="economic")
        diag = np.abs(np.diag(rfac))
        rank = int((diag > 1e-9 * max(diag[0], 1.0)).sum())
        keep = np.sort(perm[:rank])
        kept = basis[:, keep]
        # rows left uncovered by the kept columns: pivot on the orthogonal complement
        qfull, _ = np.linalg.qr(kept, mode="complete") if rank else (np.eye(r), None)
        comp = qfull[:, rank:]
        _, _, rows = qr(comp.T, pivoting=True, mode="economic")
        fill = rows[: r - rank]
        dropped = np.setdiff1d(np.arange(r), keep)
        for v in self.head[dropped]:
            self.state[v] = _AT_UB if self.x[v] >= self.ub[v] and np.isfinite(self.ub[v]) else _AT_LB
            self.x[v] = self.ub[v] if self.state[v] == _AT_UB else self.lb[v]
        for v in fill:
            if self.state[v] == _BASIC:
                raise RuntimeError("artificial already basic in a singular basis")
        self.head = np.concatenate([self.head[keep], fill])
        self.state[fill] = _BASIC
        self.binv = np.linalg.inv(self.A[:, self.head].toarray())

    def _reset_basis(self) -> None:
        r = self.rows
        basic = self.state == _BASIC
        self.state[basic] = _AT_LB
        self.x[basic] = self.lb[basic]
        self.head = np.arange(r)
        self.state[:r] = _BASIC
        self.binv = np.eye(r)
        self._recompute_basics()

    def _recompute_basics(self) -> None:
        nonbasic = self.state != _BASIC
        xn = np.where(nonbasic, self.x, 0.0)
        self.x[self.head] = self.binv @ (self.b - self.A @ xn)

    def _signs(self) -> np.ndarray:
        # +1: may increase from lb, -1: may decrease from ub, 0: basic or fixed
        sign = np.where(self.state == _AT_LB, 1.0, np.where(self.state == _AT_UB, -1.0, 0.0))
        sign[self.ub <= self.lb] = 0.0
        return sign

    def solve(self, max_iter: int = 100000) -> str:
        self._refactor()
        self._saved_bounds = None
        try:
            return self._iterate(max_iter)
        finally:
            if self._saved_bounds is not None:
                self._restore_bounds()

    def _perturb(self, rng, done: np.ndarray) -> None:
        """Widen the finite bounds of not-yet-perturbed basic variables by small random amounts."""
        if self._saved_bounds is None:
            self._saved_bounds = (self.lb.copy(), self.ub.copy())
        idx = self.head[~done[self.head]]
        done[idx] = True
        lo, hi = self.lb[idx], self.ub[idx]
        shift = self.perturb_scale * rng.uniform(1.0, 2.0, size=(2, idx.size))
        self.lb[idx] = np.where(np.isfinite(lo), lo - shift[0] * (1.0 + np.abs(lo)), lo)
        self.ub[idx] = np.where(np.isfinite(hi), hi + shift[1] * (1.0 + np.abs(hi)), hi)

    def _restore_bounds(self) -> None:
        self.lb, self.ub = self._saved_bounds
        self._saved_bounds = None
        at_lb = self.state == _AT_LB
        at_ub = self.state == _AT_UB
        self.x[at_lb] = self.lb[at_lb]
        self.x[at_ub] = self.ub[at_ub]
        self._recompute_basics()

    def _iterate(self, max_iter: int) -> str:
        r = self.rows
        AT = self.AT
        sign = self._signs()
        degenerate = 0
        bland = False
        may_perturb = self.perturb_after > 0
        perturbed = np.zeros(self.c.shape[0], dtype=bool)
        rng = np.random.default_rng(self.seed)
        cand = cand_cols = None
        minor = 0
        was_phase1 = None
        since_refactor = 0
        for _ in range(max_iter):
            xb = self.x[self.head]
            lo = self.lb[self.head]
            hi = self.ub[self.head]
            below = xb < lo - self.feas_tol
            above = xb > hi + self.feas_tol
            phase1 = bool(below.any() or above.any())
            cb = above.astype(float) - below.astype(float) if phase1 else self.c[self.head]
            y = cb @ self.binv
            if phase1 != was_phase1:
                cand = None
                was_phase1 = phase1

            q = -1
            if cand is not None and not bland and minor < self.candidate_rounds:
                # multiple pricing: re-price the shortlist from the last full pass
                score_c = -sign[cand] * ((0.0 if phase1 else self.c[cand]) - cand_cols @ y)
                best = int(np.argmax(score_c))
                if score_c[best] > self.opt_tol:
                    q = int(cand[best])
                    minor += 1
            if q < 0:
                # score = -sign * d with d = c - A^T y, computed in place
                score = AT @ y
                if not phase1:
                    np.subtract(score, self.c, out=score)
                np.multiply(score, sign, out=score)
                if bland:
                    hits = np.flatnonzero(score > self.opt_tol)
                    q = int(hits[0]) if hits.size else -1
                else:
                    q = int(np.argmax(score))
                    if score[q] <= self.opt_tol:
                        q = -1
                    elif self.candidate_rounds > 0:
                        hits = np.flatnonzero(score > self.opt_tol)
                        if hits.size > self.candidates:
                            hits = np.sort(hits[np.argpartition(-score[hits], self.candidates - 1)[: self.candidates]])
                        cand = hits
                        cand_cols = AT[hits].toarray()
                        minor = 0
            if q < 0:
                if self._saved_bounds is not None:
                    # optimal for the perturbed bounds: restore and clean up
                    self._restore_bounds()
                    sign = self._signs()
                    may_perturb = False
                    degenerate = 0
                    bland = False
                    continue
                self.status = INFEASIBLE if phase1 else OPTIMAL
                return self._finish(y)
            direction = sign[q]

            alpha = self.binv[:, self._col_rows[q]] @ self._col_vals[q]
            delta = -direction * alpha
            t_max, leave = self._ratio_test(xb, lo, hi, delta, below, above, bland, phase1)
            flip = self.ub[q] - self.lb[q]
            if flip <= t_max:
                t_max, leave = flip, -1
            if np.isinf(t_max):
                self.status = UNBOUNDED
                return self._finish(None)

            self.iterations += 1
            self.x[self.head] = xb + t_max * delta
            self.x[q] += direction * t_max
            if leave < 0:
                self.state[q] = _AT_UB if direction > 0 else _AT_LB
                sign[q] = -direction
            else:
                out = self.head[leave]
                if delta[leave] < 0:
                    target = hi[leave] if above[leave] else lo[leave]
                else:
                    target = lo[leave] if below[leave] else hi[leave]
                self.x[out] = target
                if self.ub[out] <= self.lb[out]:
                    self.state[out] = _AT_LB
                    sign[out] = 0.0
                elif target == self.ub[out]:
                    self.state[out] = _AT_UB
                    sign[out] = -1.0
                else:
                    self.state[out] = _AT_LB
                    sign[out] = 1.0
                self.state[q] = _BASIC
                sign[q] = 0.0
                self.head[leave] = q
                row = self.binv[leave] / alpha[leave]
                _rank1(self.binv, alpha, row)
                self.binv[leave] = row
                since_refactor += 1
                if since_refactor >= self.refactor_every:
                    self._refactor()
                    sign = self._signs()
                    since_refactor = 0

            if t_max <= self.feas_tol:
                degenerate += 1
                if may_perturb and degenerate >= self.perturb_after:
                    self._perturb(rng, perturbed)
                    sign = self._signs()
                    degenerate = 0
                elif degenerate > 5 * r:
                    bland = True
            else:
                degenerate = 0
                bland = False
        self.status = ITERATION_LIMIT
        return self._finish(None)

    def _ratio_test(self, xb, lo, hi, delta, below, above, bland, phase1=True):
        down = delta < 0
        if phase1:
            # a basic variable moving further away from a violated bound never blocks
            target = np.where(down, np.where(above, hi, lo), np.where(below, lo, hi))
            ok = (np.abs(delta) > self.pivot_tol) & ~np.where(down, below, above) & np.isfinite(target)
        else:
            target = np.where(down, lo, hi)
            ok = (np.abs(delta) > self.pivot_tol) & np.isfinite(target)
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            return np.inf, -1
        d = delta[idx]
        gap = target[idx] - xb[idx]
        steps = np.maximum(gap / d, 0.0)
        if bland or not self.harris:
            t = steps.min()
            tied = np.flatnonzero(steps <= t + self.feas_tol * 1e-3)
            if bland:
                pick = tied[np.argmin(self.head[idx[tied]])]
            else:
                pick = tied[np.argmax(np.abs(d[tied]))]
            return float(t), int(idx[pick])
        # Harris: relax every bound a little, then take the largest pivot under the relaxed step
        relaxed = (gap + np.copysign(0.5 * self.feas_tol, d)) / d
        within = np.flatnonzero(steps <= max(float(relaxed.min()), 0.0))
        pick = within[np.argmax(np.abs(d[within]))]
        return float(steps[pick]), int(idx[pick])

    def _finish(self, y):
        if y is not None and self.status == OPTIMAL:
            self.y = y
        self.objective = float(self.c[self.rows:] @ self.x[self.rows:])
        return self.status

    def primal(self) -> np.ndarray:
        return self.x[self.rows:].copy()

    def duals(self) -> np.ndarray:
        return self.y.copy()

    def basic_columns(self) -> np.ndarray:
        return np.sort(self.head[self.head >= self.rows] - self.rows)
