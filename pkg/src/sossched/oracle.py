"""Reference solvers for desk-scale verification.

These share nothing with the solver modules except the instance types and
evaluation helpers.  All arithmetic is exact: rational data are scaled to a
common integer denominator before enumeration.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .errors import Infeasible, InvalidInput, InvariantBreach, TooLarge
from .model import (
    BinaryVector,
    MaxSubInstance,
    MinCkpInstance,
    eval_f,
    eval_minckp_constraint,
    eval_minckp_cost,
    eval_qform,
)

BRUTE_MAX_N = 24
GRID_MAX_N = 3
SUBMODULAR_MAX_N = 12


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, Fraction(v).denominator)
    return d


def _ints(values, d):
    return [int(Fraction(v) * d) for v in values]


def _gray_flips(n):
    """Yield (mask, flipped index) along the reflected Gray code, after mask 0."""
    mask = 0
    for k in range(1, 1 << n):
        i = (k & -k).bit_length() - 1
        mask ^= 1 << i
        yield mask, i


def _bits(mask, n):
    return tuple((mask >> i) & 1 for i in range(n))


def brute_minckp(inst: MinCkpInstance) -> tuple[BinaryVector, Fraction]:
    """Exact minimum-cost feasible binary point; ties go to the smallest bit tuple."""
    n = inst.n
    if n > BRUTE_MAX_N:
        raise TooLarge(f"brute force limited to n <= {BRUTE_MAX_N}, got {n}")
    d = _lcm_den(inst.p + inst.q + (inst.base_p, inst.base_q))
    p, q = _ints(inst.p, d), _ints(inst.q, d)
    cap = inst.capacity * d * d
    cn, cd = cap.numerator, cap.denominator
    dc = _lcm_den(inst.c)
    c = _ints(inst.c, dc)
    P, Q, cost = int(inst.base_p * d), int(inst.base_q * d), 0
    best_cost, best_masks = None, []
    if (P * P + Q * Q) * cd >= cn:
        best_cost, best_masks = 0, [0]
    for mask, i in _gray_flips(n):
        if mask >> i & 1:
            P += p[i]; Q += q[i]; cost += c[i]
        else:
            P -= p[i]; Q -= q[i]; cost -= c[i]
        if (P * P + Q * Q) * cd >= cn:
            if best_cost is None or cost < best_cost:
                best_cost, best_masks = cost, [mask]
            elif cost == best_cost:
                best_masks.append(mask)
    if best_cost is None:
        raise Infeasible("no binary point reaches the capacity")
    bits = min(_bits(m, n) for m in best_masks)
    if eval_minckp_constraint(inst, bits) < inst.capacity:
        raise InvariantBreach("integer scaling disagrees with exact evaluation")
    return BinaryVector(bits), eval_minckp_cost(inst, bits)


def brute_maxsub(inst: MaxSubInstance) -> tuple[BinaryVector, Fraction]:
    """Exact maximum of f over feasible binary points; ties go to the smallest bit tuple."""
    n = inst.n
    if n > BRUTE_MAX_N:
        raise TooLarge(f"brute force limited to n <= {BRUTE_MAX_N}, got {n}")
    da = _lcm_den(list(inst.a) + [v for row in inst.a_off for v in row])
    a = _ints(inst.a, da)
    A = [_ints(row, da) for row in inst.a_off]
    ds = _lcm_den([v for s in inst.squares for v in s])
    S = [_ints(s, ds) for s in inst.squares]
    cap = inst.capacity * ds * ds
    cn, cd = cap.numerator, cap.denominator
    sums = [0] * len(S)
    inter = [0] * n        # sum over members l of 2 * A[i][l]
    value = 0
    best_val, best_masks = 0, [0]
    for mask, i in _gray_flips(n):
        if mask >> i & 1:
            value += a[i] + inter[i]
            sign = 1
        else:
            value -= a[i] + inter[i]
            sign = -1
        for l in range(n):
            if l != i:
                inter[l] += sign * 2 * A[l][i]
        for k, s in enumerate(S):
            sums[k] += sign * s[i]
        if sum(t * t for t in sums) * cd <= cn:
            if value > best_val:
                best_val, best_masks = value, [mask]
            elif value == best_val:
                best_masks.append(mask)
    bits = min(_bits(m, n) for m in best_masks)
    if eval_qform(inst, bits) > inst.capacity:
        raise InvariantBreach("integer scaling disagrees with exact evaluation")
    return BinaryVector(bits), eval_f(inst, bits)


# ---------------------------------------------------------------------------
# grid search


def grid_continuous(problem: str, inst, m: int):
    """Optimum over the grid {0, 1/m, ..., 1}^n with a guaranteed error radius.

    Returns (value, radius, x).  For ``"nlp"`` (minimisation) the grid value lies
    in [OPT, OPT + radius]; for ``"f1"`` (maximisation) in [OPT - radius, OPT].
    """
    if m < 1:
        raise InvalidInput("grid resolution must be positive")
    if inst.n > GRID_MAX_N:
        raise TooLarge(f"grid search limited to n <= {GRID_MAX_N}, got {inst.n}")
    if problem == "nlp":
        return _grid_nlp(inst, m)
    if problem == "f1":
        return _grid_f1(inst, m)
    raise InvalidInput(f"unknown problem {problem!r}")


def _grid_nlp(inst: MinCkpInstance, m: int):
    n = inst.n
    if any(v <= 0 for v in inst.c):
        raise InvalidInput("grid search for the relaxation needs positive costs")
    d = _lcm_den(inst.p + inst.q + (inst.base_p, inst.base_q))
    p, q = _ints(inst.p, d), _ints(inst.q, d)
    cap = inst.capacity * d * d * m * m
    cn, cd = cap.numerator, cap.denominator
    bp, bq = int(inst.base_p * d) * m, int(inst.base_q * d) * m

    def ok(P, Q):
        return (P * P + Q * Q) * cd >= cn

    best = None
    last = n - 1
    for prefix in itertools.product(range(m + 1), repeat=last):
        P = bp + sum(p[i] * k for i, k in enumerate(prefix))
        Q = bq + sum(q[i] * k for i, k in enumerate(prefix))
        if not ok(P + p[last] * m, Q + q[last] * m):
            continue
        k = _first_true(lambda t: ok(P + p[last] * t, Q + q[last] * t), m)
        ks = prefix + (k,)
        cost = sum(inst.c[i] * ks[i] for i in range(n)) / m
        if best is None or cost < best[0]:
            best = (cost, ks)
    if best is None:
        raise Infeasible("no grid point reaches the capacity")
    radius = sum(abs(v) for v in inst.c) / m
    return best[0], radius, tuple(Fraction(k, m) for k in best[1])


def _first_true(pred, m):
    """Smallest t in [0, m] with pred(t), for a monotone predicate with pred(m) true."""
    lo, hi = -1, m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _grid_f1(inst: MaxSubInstance, m: int):
    n = inst.n
    ds = _lcm_den([v for s in inst.squares for v in s])
    S = [_ints(s, ds) for s in inst.squares]
    qd = [sum(s[i] * s[i] for s in S) for i in range(n)]
    cap_q = inst.capacity * ds * ds * m * m
    cap_l = inst.capacity * ds * ds * m
    last = n - 1

    def feasible(ks):
        quad = sum(sum(s[i] * ks[i] for i in range(n)) ** 2 for s in S)
        lin = sum(qd[i] * ks[i] for i in range(n))
        return quad <= cap_q and lin <= cap_l

    best = None
    for prefix in itertools.product(range(m + 1), repeat=last):
        if not feasible(prefix + (0,)):
            continue
        # the feasible last coordinates form an interval [0, kmax]
        kmax = _first_true(lambda t: not feasible(prefix + (t,)), m + 1) - 1
        for k in {0, kmax}:
            ks = prefix + (k,)
            val = eval_f(inst, tuple(Fraction(v, m) for v in ks))
            if best is None or val > best[0]:
                best = (val, ks)
    slope = [abs(inst.a[i]) + 2 * sum(abs(v) for v in inst.a_off[i]) for i in range(n)]
    radius = sum(slope, Fraction(0)) / m
    return best[0], radius, tuple(Fraction(k, m) for k in best[1])


# ---------------------------------------------------------------------------
# submodularity


def check_submodular(inst: MaxSubInstance) -> bool:
    """Check F(S) + F(V) >= F(S & V) + F(S | V) for the set function of f.

    Exhaustive over all pairs for n <= 8; for larger n the equivalent local
    form F(S+i) + F(S+j) >= F(S) + F(S+i+j) is checked for every S, i, j.
    """
    n = inst.n
    if n > SUBMODULAR_MAX_N:
        raise TooLarge(f"submodularity check limited to n <= {SUBMODULAR_MAX_N}, got {n}")
    da = _lcm_den(list(inst.a) + [v for row in inst.a_off for v in row])
    a = _ints(inst.a, da)
    A = [_ints(row, da) for row in inst.a_off]
    F = [0] * (1 << n)
    for mask in range(1, 1 << n):
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        F[mask] = F[rest] + a[i] + 2 * sum(A[i][l] for l in range(n) if rest >> l & 1)
    if n <= 8:
        for s in range(1 << n):
            for v in range(s, 1 << n):
                if F[s] + F[v] < F[s & v] + F[s | v]:
                    return False
        return True
    for s in range(1 << n):
        outside = [i for i in range(n) if not s >> i & 1]
        for x, y in itertools.combinations(outside, 2):
            if F[s | 1 << x] + F[s | 1 << y] < F[s] + F[s | 1 << x | 1 << y]:
                return False
    return True
