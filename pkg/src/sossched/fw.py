"""Frank-Wolfe style continuous greedy for the MaxSUB relaxation F1.

F1 = {x in [0,1]^n : x.Q.x <= C, q.x <= C} is convex and down-closed.  The
objective f(x) = x.A*x + a.x is DR-submodular, and the greedy moves

    x <- x + v / K,   v = argmax { grad f(x) . v : v in F1, v <= 1 - x }

starting from zero.  Iterates are exact rationals; the linear maximisation
oracle runs in floating point and its output is rounded down onto a dyadic
grid and then certified feasible in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, InvariantBreach
from .model import FractionalVector, MaxSubInstance, dot, eval_f, eval_qform

ZERO = Fraction(0)
ONE = Fraction(1)
GRID_BITS = 40


@dataclass(frozen=True)
class F1Region:
    squares: tuple
    q: tuple
    capacity: Fraction

    @classmethod
    def of(cls, inst: MaxSubInstance) -> "F1Region":
        return cls(squares=inst.squares, q=inst.q, capacity=inst.capacity)

    @property
    def n(self) -> int:
        return len(self.q)

    def contains(self, v) -> bool:
        if any(x < 0 or x > 1 for x in v):
            return False
        quad = sum((dot(s, v) ** 2 for s in self.squares), ZERO)
        return quad <= self.capacity and dot(self.q, v) <= self.capacity


@dataclass
class FwTrace:
    iterates: list = field(default_factory=list)
    vertices: list = field(default_factory=list)
    f_values: list = field(default_factory=list)
    inner: list = field(default_factory=list)


def gradient_f(inst: MaxSubInstance, x) -> tuple[Fraction, ...]:
    """grad f(x) = a + 2 a_off x for the symmetrised a_off."""
    xs = x.x if isinstance(x, FractionalVector) else tuple(x)
    if len(xs) != inst.n:
        raise DimensionMismatch("gradient point has wrong length")
    out = []
    nz = [(j, v) for j, v in enumerate(xs) if v]
    for i in range(inst.n):
        row = inst.a_off[i]
        out.append(inst.a[i] + 2 * sum((row[j] * v for j, v in nz), ZERO))
    return tuple(out)


def default_tol(w) -> Fraction:
    return Fraction(1, 2 ** 20) * (1 + sum((abs(Fraction(v)) for v in w), ZERO))


def _barrier_max(w, Qm, qv, C, u, gap):
    """max w.v s.t. v.Qm.v <= C, qv.v <= C, 0 <= v <= u by a log-barrier method.

    Returns a strictly feasible float vector whose objective is within ``gap``
    of the optimum, up to floating-point error.
    """
    k = len(w)
    m = 2 * k + 2
    scale = float(np.max(w))
    wn = w / scale
    v = u * 0.5
    quad, lin = v @ Qm @ v, qv @ v
    v = v * min(1.0, math.sqrt(0.25 * C / quad) if quad > 0 else 1.0,
                0.25 * C / lin if lin > 0 else 1.0)

    def barrier(z, t):
        s1 = C - z @ Qm @ z
        s2 = C - qv @ z
        if s1 <= 0 or s2 <= 0 or np.any(z <= 0) or np.any(z >= u):
            return math.inf
        return (-t * (wn @ z) - math.log(s1) - math.log(s2)
                - np.sum(np.log(z)) - np.sum(np.log(u - z)))

    t = 1.0
    while True:
        for _ in range(60):
            Qv = Qm @ v
            s1 = C - v @ Qv
            s2 = C - qv @ v
            g = -t * wn + 2 * Qv / s1 + qv / s2 - 1 / v + 1 / (u - v)
            H = (2 / s1) * Qm + np.outer(2 * Qv, 2 * Qv) / s1 ** 2 + np.outer(qv, qv) / s2 ** 2
            H[np.diag_indices(k)] += 1 / v ** 2 + 1 / (u - v) ** 2
            try:
                dv = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                break
            dec = -g @ dv
            if dec < 1e-10:
                break
            f0 = barrier(v, t)
            step = 1.0
            while barrier(v + step * dv, t) > f0 - 0.25 * step * dec:
                step *= 0.5
                if step < 1e-14:
                    break
            if step < 1e-14:
                break
            v = v + step * dv
        if m / t * scale <= gap:
            return v
        t *= 16.0


def _sqrt_below(value: Fraction) -> Fraction:
    num, den = value.numerator, value.denominator
    return Fraction(math.isqrt(num * den << (2 * GRID_BITS)), den << GRID_BITS)


def _to_grid(v: float, cap: Fraction) -> Fraction:
    val = Fraction(max(0, math.floor(v * (1 << GRID_BITS))), 1 << GRID_BITS)
    return min(val, cap)


def lmo(region: F1Region, w, tol=None, upper=None) -> FractionalVector:
    """Approximately maximise w.v over F1 intersected with v <= upper.

    The output is exactly feasible.  Coordinates with w_i <= 0 are zero.
    """
    n = region.n
    w = tuple(Fraction(v) for v in w)
    if len(w) != n:
        raise DimensionMismatch("weight vector has wrong length")
    ub = tuple(ONE for _ in range(n)) if upper is None else tuple(Fraction(v) for v in upper)
    if tol is None:
        tol = default_tol(w)
    v = [ZERO] * n
    active = [i for i in range(n) if w[i] > 0 and ub[i] > 0]
    free_of_cost = [i for i in active if region.q[i] == 0]
    for i in free_of_cost:
        v[i] = ub[i]
    rest = [i for i in active if region.q[i] != 0]
    if len(rest) == 1:
        # one coordinate: v_i = min(u_i, C / q_i, sqrt(C / Q_ii)), exactly or from below
        i = rest[0]
        cap = min(ub[i], region.capacity / region.q[i])
        root = region.capacity / region.q[i]
        if cap * cap > root:
            cap = _sqrt_below(root)
        v[i] = cap
        rest = []
    if rest:
        C = float(region.capacity)
        S = np.array([[float(s[i]) for i in rest] for s in region.squares], dtype=float)
        Qm = S.T @ S
        qv = np.array([float(region.q[i]) for i in rest])
        wf = np.array([float(w[i]) for i in rest])
        uf = np.array([float(ub[i]) for i in rest])
        vf = _barrier_max(wf, Qm, qv, C, uf, float(tol) / 4)
        for pos, i in enumerate(rest):
            v[i] = _to_grid(float(vf[pos]), ub[i])
        # certify: scale down on the grid until exactly feasible
        shrink_bits = 40
        base = list(v)
        while not region.contains(v):
            shrink_bits -= 4
            if shrink_bits <= 0:
                v = [ub[i] if i in free_of_cost else ZERO for i in range(n)]
                break
            factor = 1 - Fraction(1, 1 << shrink_bits)
            v = [b if i in free_of_cost else _to_grid(float(b * factor), b)
                 for i, b in enumerate(base)]
    return FractionalVector(tuple(v), algorithm="lmo", info={"tol": str(tol)})


def frank_wolfe(inst: MaxSubInstance, K: int, tol=None, keep_iterates: bool = True):
    """Run K greedy steps from zero and return (x_K, trace)."""
    if K < 1:
        raise ValueError("K must be positive")
    n = inst.n
    region = F1Region.of(inst)
    x = [ZERO] * n
    trace = FwTrace()
    trace.iterates.append(tuple(x))
    trace.f_values.append(0.0)
    total = [ZERO] * n
    for _ in range(K):
        grad = gradient_f(inst, x)
        upper = [ONE - xi for xi in x]
        v = lmo(region, grad, tol, upper=upper).x
        inner = dot(grad, v)
        if inner < 0:
            raise InvariantBreach(f"oracle direction has negative gain {inner}")
        x = [xi + vi / K for xi, vi in zip(x, v)]
        total = [ti + vi for ti, vi in zip(total, v)]
        if not region.contains(x):
            raise InvariantBreach("iterate left the feasible region")
        trace.vertices.append(v)
        trace.inner.append(inner)
        if keep_iterates:
            trace.iterates.append(tuple(x))
        trace.f_values.append(float(eval_f(inst, x)))
    if any(xi != ti / K for xi, ti in zip(x, total)):
        raise InvariantBreach("final iterate differs from the averaged directions")
    out = FractionalVector(tuple(x), algorithm="frank_wolfe", info={"K": K})
    return out, trace


def default_steps(n: int, eps) -> int:
    return max(1, math.ceil(Fraction(n * n) / Fraction(eps)))


def lipschitz_bound(inst: MaxSubInstance) -> Fraction:
    """n times the largest |a_off| entry, times two for the symmetric gradient."""
    lam = max((abs(v) for row in inst.a_off for v in row), default=ZERO)
    return 2 * inst.n * lam


def diameter(n: int) -> float:
    return math.sqrt(n)


__all__ = ["F1Region", "FwTrace", "gradient_f", "lmo", "frank_wolfe", "default_steps",
           "default_tol", "eval_qform"]
