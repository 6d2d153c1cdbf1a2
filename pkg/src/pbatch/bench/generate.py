"""Reproducible random instances.

The generator is splitmix64 seeded with ``seed ^ replica``.  Integers in
``[a, b]`` come from rejection sampling on raw 64-bit outputs: with
``span = b - a + 1`` draws at or above ``2**64 - 2**64 % span`` are
discarded and the result is ``a + x % span``.  Per job, ``p`` is drawn
before ``s``, jobs in id order, so the stream is bit-exact on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import BadSigma
from ..model import Instance, validate_instance

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB

P_RANGE = (1, 100)
SIGMA_RANGES = {1: (1, 10), 2: (2, 8), 3: (3, 10), 4: (1, 5)}


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX_1) & MASK64
        z = ((z ^ (z >> 27)) * MIX_2) & MASK64
        return z ^ (z >> 31)

    def uniform(self, a: int, b: int) -> int:
        span = b - a + 1
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next_u64()
            if x < limit:
                return a + x % span


def parse_sigma(value) -> int:
    text = str(value).strip().lower()
    for prefix in ("sigma", "s", "σ"):
        if text.startswith(prefix):
            text = text[len(prefix):]
            break
    try:
        sigma = int(text)
    except ValueError:
        raise BadSigma(f"unknown size distribution {value!r}") from None
    if sigma not in SIGMA_RANGES:
        raise BadSigma(f"unknown size distribution {value!r}")
    return sigma


@dataclass(frozen=True)
class GenSpec:
    n: int
    sigma: int
    capacity: int = 10
    machines: int = 1
    seed: int = 0
    replicas: int = 10

    def __post_init__(self):
        object.__setattr__(self, "sigma", parse_sigma(self.sigma))
        if self.n < 1 or self.machines < 1 or self.replicas < 1:
            raise ValueError("n, machines and replicas must be positive")
        if self.capacity < SIGMA_RANGES[self.sigma][1]:
            raise ValueError(f"capacity {self.capacity} below the largest size of sigma{self.sigma}")


def generate_instance(spec: GenSpec, replica: int) -> Instance:
    rng = SplitMix64(spec.seed ^ replica)
    lo, hi = SIGMA_RANGES[spec.sigma]
    jobs = []
    for _ in range(spec.n):
        p = rng.uniform(*P_RANGE)
        s = rng.uniform(lo, hi)
        jobs.append((p, s))
    return validate_instance(jobs, spec.capacity, spec.machines)
