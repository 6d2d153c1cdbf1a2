import itertools
import random

import numpy as np
import pytest
from hypothesis import strategies as st

from pbatch.model import Schedule, validate_instance
from pbatch.pricing import DualValues

I3_JOBS = [(5, 6), (3, 5), (2, 4)]


@pytest.fixture
def i3():
    return validate_instance(I3_JOBS, 10)


def random_instance(rng, n, capacity=10, machines=1, pmax=100, smax=None):
    smax = smax or capacity
    jobs = [(rng.randint(1, pmax), rng.randint(1, smax)) for _ in range(n)]
    return validate_instance(jobs, capacity, machines)


def random_schedule(rng, inst):
    """Random capacity-feasible schedule: shuffle, pack first-fit into random batches, scatter over machines."""
    ids = list(range(1, inst.n + 1))
    rng.shuffle(ids)
    batches = []
    for j in ids:
        open_ = [b for b in batches if sum(inst.s(x) for x in b) + inst.s(j) <= inst.capacity]
        if open_ and rng.random() < 0.6:
            rng.choice(open_).append(j)
        else:
            batches.append([j])
    seqs = [[] for _ in range(inst.machines)]
    for b in batches:
        seqs[rng.randrange(inst.machines)].append(b)
    return Schedule.from_lists(seqs)


def feasible_batches(inst, size):
    return [c for c in itertools.combinations(range(1, inst.n + 1), size)
            if sum(inst.s(j) for j in c) <= inst.capacity]


def brute_min_rc(inst, duals, i, k, h=0):
    """Exhaustive minimum reduced cost of arcs (i, k, B) on machine h; None if no batch fits."""
    n = inst.n
    best = None
    for b in feasible_batches(inst, k - i):
        rc = (n - i + 1) * max(inst.p(j) for j in b) - (duals.u[h, i - 1] - duals.u[h, k - 1]) \
            - sum(duals.v[j - 1] for j in b)
        if best is None or rc < best:
            best = rc
    return best


def random_duals(rng, inst, machines=1, scale=50.0):
    u = np.array([[rng.uniform(-scale, scale) for _ in range(inst.n + 1)] for _ in range(machines)])
    v = np.array([rng.uniform(-scale, 3 * scale) for _ in range(inst.n)])
    return DualValues.of(u, v)


@st.composite
def instances(draw, n_min=1, n_max=8, capacity=10, machines=1):
    n = draw(st.integers(n_min, n_max))
    p = draw(st.lists(st.integers(1, 100), min_size=n, max_size=n))
    s = draw(st.lists(st.integers(1, capacity), min_size=n, max_size=n))
    return validate_instance(list(zip(p, s)), capacity, machines)


def seeds():
    return st.integers(0, 2**32 - 1)


def rng_from(seed):
    return random.Random(seed)
