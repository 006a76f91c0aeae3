"""Seeded instance generators.

Randomness comes from numpy's PCG64 bit generator, consumed only as raw
64-bit words so that the mapping seed -> instance does not depend on any
numpy distribution code.  Bounded integers use rejection sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadConfig
from .model import MaxSubInstance, MinCkpInstance, format_rational, to_rational

PRNG_NAME = "pcg64"
GEN_VERSION = 1
CAPACITY_POLICIES = ("tight", "absolute")


class Stream:
    """Integer draws from PCG64 raw output."""

    def __init__(self, seed: int):
        if not 0 <= seed < 2 ** 64:
            raise BadConfig(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._bits = np.random.PCG64(seed)

    def word(self) -> int:
        return int(self._bits.random_raw())

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        span = hi - lo + 1
        if span <= 0:
            raise BadConfig(f"empty range [{lo}, {hi}]")
        limit = (1 << 64) - (1 << 64) % span
        while True:
            w = self.word()
            if w < limit:
                return lo + w % span

    def chance(self, prob: Fraction) -> bool:
        """True with probability prob, exact for dyadic prob."""
        return Fraction(self.word(), 1 << 64) < prob


@dataclass(frozen=True)
class GenConfig:
    kind: str = "minckp"
    seed: int = 0
    n: int = 10
    max_value: int = 64
    max_weight: int = 64
    capacity_policy: str = "tight"
    theta: Fraction = Fraction(1, 2)
    capacity: Fraction | None = None
    K: int = 2
    density: Fraction = Fraction(1, 2)
    max_off: int = 8

    def __post_init__(self):
        object.__setattr__(self, "theta", to_rational(self.theta))
        object.__setattr__(self, "density", to_rational(self.density))
        if self.capacity is not None:
            object.__setattr__(self, "capacity", to_rational(self.capacity))
        if self.kind not in ("minckp", "maxsub"):
            raise BadConfig(f"unknown kind {self.kind!r}")
        if self.n < 1:
            raise BadConfig("n must be positive")
        if self.max_value < 1 or self.max_weight < 1 or self.max_off < 0:
            raise BadConfig("value ranges must be positive")
        if self.capacity_policy not in CAPACITY_POLICIES:
            raise BadConfig(f"capacity policy must be one of {CAPACITY_POLICIES}")
        if self.capacity_policy == "tight" and not 0 < self.theta <= 1:
            raise BadConfig(f"theta must lie in (0, 1], got {self.theta}")
        if self.capacity_policy == "absolute" and (self.capacity is None or self.capacity <= 0):
            raise BadConfig("absolute capacity policy needs a positive capacity")
        if self.kind == "maxsub" and not 1 <= self.K <= self.n:
            raise BadConfig(f"K must lie in [1, n], got {self.K}")
        if not 0 <= self.density <= 1:
            raise BadConfig("density must lie in [0, 1]")

    def meta(self, instance_id: str | None = None) -> dict:
        d = {"generator": f"sossched-gen/{GEN_VERSION}", "prng": PRNG_NAME, "seed": self.seed,
             "n": self.n, "capacity_policy": self.capacity_policy}
        if self.capacity_policy == "tight":
            d["theta"] = format_rational(self.theta)
        if self.kind == "maxsub":
            d["K"] = self.K
            d["density"] = format_rational(self.density)
        d["id"] = instance_id or f"{self.kind}-n{self.n}-s{self.seed}"
        return d


def gen_minckp(cfg: GenConfig, instance_id: str | None = None) -> MinCkpInstance:
    """Costs in [1, max_value]; p, q in [0, max_weight] with p_i + q_i > 0."""
    rng = Stream(cfg.seed)
    n = cfg.n
    c = [rng.integer(1, cfg.max_value) for _ in range(n)]
    p, q = [], []
    for _ in range(n):
        while True:
            pi, qi = rng.integer(0, cfg.max_weight), rng.integer(0, cfg.max_weight)
            if pi + qi:
                break
        p.append(pi)
        q.append(qi)
    if cfg.capacity_policy == "tight":
        C = cfg.theta * (sum(p) ** 2 + sum(q) ** 2)
    else:
        C = cfg.capacity
    return MinCkpInstance(c=c, p=p, q=q, capacity=C, meta=cfg.meta(instance_id))


def gen_maxsub(cfg: GenConfig, instance_id: str | None = None) -> MaxSubInstance:
    """Utilities in [0, max_value], off-diagonals in [-max_off, 0] with given density.

    The tight capacity is theta * 1.Q.1, raised to at least max_i Q_ii so that
    every singleton is feasible and preprocessing forces nothing.
    """
    rng = Stream(cfg.seed)
    n = cfg.n
    a = [rng.integer(0, cfg.max_value) for _ in range(n)]
    a_off = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if cfg.max_off and cfg.density and rng.chance(cfg.density):
                a_off[i][j] = a_off[j][i] = -rng.integer(1, cfg.max_off)
    squares = [[rng.integer(0, cfg.max_weight) for _ in range(n)] for _ in range(cfg.K)]
    diag = max(sum(s[i] * s[i] for s in squares) for i in range(n))
    if cfg.capacity_policy == "tight":
        total = sum(sum(s) ** 2 for s in squares)
        C = max(cfg.theta * total, Fraction(diag), Fraction(1))
    else:
        C = cfg.capacity
    return MaxSubInstance(a=a, a_off=a_off, squares=squares, capacity=C,
                          meta=cfg.meta(instance_id))


def generate(cfg: GenConfig, instance_id: str | None = None):
    if cfg.kind == "minckp":
        return gen_minckp(cfg, instance_id)
    return gen_maxsub(cfg, instance_id)
