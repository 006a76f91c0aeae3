"""Partial-enumeration approximation scheme for MinCKP.

For every set S1 of at most h = ceil(2/eps) items, all items that come after
min(S1) in the (cost, index) order are fixed to zero, S1 is fixed to one, and
the relaxation of the rest is solved to accuracy delta.  The relaxed point is
re-optimised as a vertex of a two-constraint LP, whose at most two fractional
entries are rounded up.  The cheapest exactly feasible candidate wins.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EpsilonOutOfRange, Infeasible, InvariantBreach, TooManyFractional
from .exactlp import GE, BasicSolution, Constraint, LinearProgram, simplex
from .model import BinaryVector, MinCkpInstance, dot, preprocess_minckp, to_rational
from .relax import Fixings, nlp_solve

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class PtasParams:
    eps: Fraction
    bit_length: int
    h: int = 0
    delta: Fraction = ZERO

    def __post_init__(self):
        eps = to_rational(self.eps)
        # eps = 1 is admitted: the guarantee 1 + 2 eps still holds verbatim
        if not 0 < eps <= 1:
            raise EpsilonOutOfRange(f"epsilon must lie in (0, 1], got {eps}")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "h", math.ceil(2 / eps))
        object.__setattr__(self, "delta", eps / (2 ** (2 * self.bit_length + 1)))

    @classmethod
    def for_instance(cls, inst: MinCkpInstance, eps) -> "PtasParams":
        params = cls(eps=eps, bit_length=inst.bit_length)
        if inst.n and params.delta > params.eps * min(inst.c):
            raise InvariantBreach("accuracy exceeds eps * min cost")
        return params


@dataclass
class PtasReport:
    eps: Fraction
    h: int
    delta: Fraction
    bit_length: int
    candidates: int = 0
    evaluated: int = 0
    pruned_reach: int = 0
    pruned_bound: int = 0
    shortcut: int = 0
    discarded: int = 0
    relax_calls: int = 0
    best_S1: tuple = ()
    forced_ones: tuple = ()
    cost: Fraction | None = None
    relaxation_value: Fraction | None = None
    extra: dict = field(default_factory=dict)


def lp_prime(inst: MinCkpInstance, fix: Fixings, alpha, beta) -> BasicSolution:
    """Vertex optimum of min c.x s.t. p.x >= alpha, q.x >= beta, box and fixings."""
    n = inst.n
    fixed = {i: ZERO for i in fix.S0}
    fixed.update({i: ONE for i in fix.S1})
    lp = LinearProgram(
        n=n, objective=inst.c,
        constraints=(Constraint(inst.p, GE, alpha), Constraint(inst.q, GE, beta)),
        lower=(ZERO,) * n, upper=(ONE,) * n, fixed=fixed)
    return simplex(lp)


def round_up_fractional(x) -> BinaryVector:
    xs = x.x if hasattr(x, "x") else tuple(x)
    frac = [i for i, v in enumerate(xs) if 0 < v < 1]
    if len(frac) > 2:
        raise TooManyFractional(f"{len(frac)} fractional coordinates at {frac}")
    return BinaryVector(tuple(1 if v > 0 else 0 for v in xs))


def _constraint(inst, bits) -> Fraction:
    P = inst.base_p + sum((inst.p[i] for i, b in enumerate(bits) if b), ZERO)
    Q = inst.base_q + sum((inst.q[i] for i, b in enumerate(bits) if b), ZERO)
    return P * P + Q * Q


def _sqrt_floor(v: Fraction, bits: int = 40) -> Fraction:
    num, den = v.numerator, v.denominator
    return Fraction(math.isqrt(num * den << (2 * bits)), den << bits)


def candidate_pipeline(inst: MinCkpInstance, fix: Fixings, params: PtasParams, stats=None):
    """Relax, re-optimise as a vertex, round up.  Returns (bits, relax_value) or None."""
    try:
        res = nlp_solve(inst, fix, params.delta, report=True)
    except Infeasible:
        return None
    if stats is not None:
        stats.relax_calls += res.calls
    xs = res.x.x
    alpha, beta = dot(inst.p, xs), dot(inst.q, xs)
    vertex = lp_prime(inst, fix, alpha, beta)
    if vertex.value > res.value:
        raise InvariantBreach("LP re-optimisation increased the cost")
    bits = round_up_fractional(vertex)
    return bits.x, res.value


def enumerate_guesses(inst: MinCkpInstance, h: int):
    """Yield (S1, Fixings) for all |S1| <= h, size ascending then lexicographic."""
    n = inst.n
    order = sorted(range(n), key=lambda i: (inst.c[i], i))
    rank = {i: r for r, i in enumerate(order)}
    yield (), Fixings()
    for size in range(1, min(h, n) + 1):
        for S1 in itertools.combinations(range(n), size):
            low = min(rank[i] for i in S1)
            S0 = frozenset(order[r] for r in range(low + 1, n)) - set(S1)
            yield S1, Fixings(S0=S0, S1=frozenset(S1))


def _knapsack_bound(inst, fix: Fixings) -> Fraction | None:
    """Lower bound on the cost of any binary point consistent with ``fix``.

    Uses sqrt(C) <= P + Q and a fractional knapsack over p_i + q_i.  None means
    the candidate holds no feasible binary point.
    """
    P = inst.base_p + sum((inst.p[i] for i in fix.S1), ZERO)
    Q = inst.base_q + sum((inst.q[i] for i in fix.S1), ZERO)
    base = sum((inst.c[i] for i in fix.S1), ZERO)
    need = _sqrt_floor(inst.capacity) - P - Q
    if need <= 0:
        return base
    free = [i for i in range(inst.n) if i not in fix.S0 and i not in fix.S1
            and (inst.p[i] or inst.q[i])]
    free.sort(key=lambda i: (inst.c[i] / (inst.p[i] + inst.q[i]), i))
    cost = base
    for i in free:
        w = inst.p[i] + inst.q[i]
        if w >= need:
            return cost + inst.c[i] * need / w
        need -= w
        cost += inst.c[i]
    return None


def solve_ptas(inst: MinCkpInstance, eps, prune: bool = True) -> tuple[BinaryVector, PtasReport]:
    """Return a binary point of cost at most (1 + 2 eps) OPT and exactly feasible."""
    reduced, pre = preprocess_minckp(inst)
    params = PtasParams.for_instance(reduced, eps)
    report = PtasReport(eps=params.eps, h=params.h, delta=params.delta,
                        bit_length=reduced.bit_length, forced_ones=tuple(sorted(pre.forced_ones)))
    n = reduced.n
    C = reduced.capacity
    best = None   # (cost, bits, S1, relax_value)
    for S1, fix in enumerate_guesses(reduced, params.h):
        report.candidates += 1
        top = [0 if i in fix.S0 else 1 for i in range(n)]
        if _constraint(reduced, top) < C:
            report.pruned_reach += 1
            continue
        if prune and best is not None:
            bound = _knapsack_bound(reduced, fix)
            if bound is None:
                report.pruned_reach += 1
                continue
            if bound > best[0]:
                report.pruned_bound += 1
                continue
            base = sum((reduced.c[i] for i in S1), ZERO)
            if base == best[0]:
                # only the bare guess can tie; the relaxation would return it verbatim
                report.shortcut += 1
                bits = tuple(1 if i in fix.S1 else 0 for i in range(n))
                if _constraint(reduced, bits) >= C and bits < best[1]:
                    best = (base, bits, S1, base)
                continue
        report.evaluated += 1
        out = candidate_pipeline(reduced, fix, params, report)
        if out is None:
            continue
        bits, relax_value = out
        if _constraint(reduced, bits) < C:
            report.discarded += 1
            continue
        cost = sum((reduced.c[i] for i, b in enumerate(bits) if b), ZERO)
        if best is None or (cost, bits) < (best[0], best[1]):
            best = (cost, bits, S1, relax_value)
    if best is None:
        if n == 0:
            best = (ZERO, (), (), ZERO)
        else:
            raise Infeasible("no candidate produced a feasible point")
    full = pre.lift(best[1])
    report.best_S1 = tuple(pre.kept[i] for i in best[2])
    report.cost = best[0] + pre.forced_cost
    report.relaxation_value = best[3] + pre.forced_cost
    return BinaryVector(full), report


def candidate_count(n: int, h: int) -> int:
    return sum(math.comb(n, k) for k in range(0, min(h, n) + 1))
