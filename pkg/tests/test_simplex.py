import numpy as np
import pytest
from hypothesis import given, settings
from scipy.optimize import linprog

from pbatch import simplex
from pbatch.simplex import BoundedSimplex

from conftest import rng_from, seeds


def load(A, b, c, lb=None, ub=None):
    eng = BoundedSimplex(b)
    rows, vals = [], []
    for j in range(A.shape[1]):
        nz = np.flatnonzero(A[:, j])
        rows.append(nz)
        vals.append(A[nz, j])
    eng.add_columns(rows, vals, c)
    if lb is not None:
        for j, (lo, hi) in enumerate(zip(lb, ub)):
            eng.set_bounds(j, lo, hi)
    return eng


def test_tiny_lp():
    # min -x - y, x + y + s = 4, x - y + t = 1
    A = np.array([[1.0, 1, 1, 0], [1, -1, 0, 1]])
    eng = load(A, [4, 1], [-1, -1, 0, 0])
    assert eng.solve() == simplex.OPTIMAL
    assert eng.objective == pytest.approx(-4)


def test_bounds_respected():
    A = np.array([[1.0, 1.0]])
    eng = load(A, [3], [1, 2], lb=[0, 0], ub=[1, np.inf])
    assert eng.solve() == simplex.OPTIMAL
    assert eng.primal() == pytest.approx([1, 2])


def test_infeasible_and_unbounded():
    eng = load(np.array([[1.0, 1.0]]), [-1], [1, 1])
    assert eng.solve() == simplex.INFEASIBLE
    eng = load(np.array([[1.0, -1.0]]), [0], [-1, 0])
    assert eng.solve() == simplex.UNBOUNDED


def test_warm_start_after_adding_columns():
    A = np.array([[1.0, 0], [0, 1]])
    eng = load(A, [1, 1], [5, 5])
    eng.solve()
    assert eng.objective == pytest.approx(10)
    eng.add_columns([[0, 1]], [[1.0, 1.0]], [3])
    assert eng.solve() == simplex.OPTIMAL
    assert eng.objective == pytest.approx(3)


@settings(max_examples=150, deadline=None)
@given(seeds())
def test_matches_highs(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 7), rng.integers(1, 12)
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    x0 = rng.uniform(0, 3, size=n)
    b = A @ x0 if rng.random() < 0.8 else rng.uniform(-5, 5, size=m)
    c = rng.integers(-5, 10, size=n).astype(float)
    ub = np.where(rng.random(n) < 0.5, rng.uniform(0.5, 4, size=n), np.inf)
    lb = np.zeros(n)
    eng = load(A, b, c, lb, ub)
    status = eng.solve()
    ref = linprog(c, A_eq=A, b_eq=b, bounds=list(zip(lb, ub)), method="highs")
    expected = {0: simplex.OPTIMAL, 2: simplex.INFEASIBLE, 3: simplex.UNBOUNDED}[ref.status]
    assert status == expected
    if status == simplex.OPTIMAL:
        assert eng.objective == pytest.approx(ref.fun, abs=1e-6)
        x = eng.primal()
        assert np.abs(A @ x - b).max() <= 1e-7
        assert (x >= lb - 1e-7).all() and (x <= ub + 1e-7).all()
        # dual check: reduced costs have the right sign at each bound
        d = c - A.T @ eng.duals()
        at_lb = x <= lb + 1e-7
        at_ub = x >= ub - 1e-7
        assert (d[at_lb & ~at_ub] >= -1e-6).all()
        assert (d[at_ub & ~at_lb] <= 1e-6).all()
        free = ~at_lb & ~at_ub
        assert np.abs(d[free]).max(initial=0) <= 1e-6
