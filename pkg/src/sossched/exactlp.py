"""Exact rational linear-algebra kernel.

Contains a 2x2 solver, a bounded-variable two-phase simplex over Fractions
with Bland's rule, and certified rational brackets for the real roots of a
quadratic with positive leading coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    DimensionMismatch,
    InvalidInput,
    InvariantBreach,
    LPInfeasible,
    LPUnbounded,
    NonPositiveDelta,
    Singular,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_2x2(pj, qj, cj, pk, qk, ck) -> tuple[Fraction, Fraction]:
    """Solve pj*z1 + qj*z2 = cj, pk*z1 + qk*z2 = ck exactly."""
    pj, qj, cj, pk, qk, ck = (Fraction(v) for v in (pj, qj, cj, pk, qk, ck))
    det = pj * qk - pk * qj
    if det == 0:
        raise Singular("determinant is zero")
    z1 = (cj * qk - ck * qj) / det
    z2 = (pj * ck - pk * cj) / det
    return z1, z2


# ---------------------------------------------------------------------------
# linear programs

LE, GE, EQ = "<=", ">=", "="
_SENSES = (LE, GE, EQ)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in _SENSES:
            raise InvalidInput(f"unknown constraint sense {self.sense!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(v) for v in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


@dataclass(frozen=True)
class LinearProgram:
    """min objective.x subject to constraints, lower <= x <= upper, fixed entries.

    ``objective=None`` asks for any vertex of the feasible region.  Upper
    bounds may be ``None`` (unbounded above); lower bounds must be finite.
    """

    n: int
    objective: tuple[Fraction, ...] | None = None
    constraints: tuple[Constraint, ...] = ()
    lower: tuple[Fraction, ...] | None = None
    upper: tuple | None = None
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.n
        if self.objective is not None:
            obj = tuple(Fraction(v) for v in self.objective)
            if len(obj) != n:
                raise DimensionMismatch("objective length differs from n")
            object.__setattr__(self, "objective", obj)
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        for c in cons:
            if len(c.coeffs) != n:
                raise DimensionMismatch("constraint length differs from n")
        object.__setattr__(self, "constraints", cons)
        lo = (ZERO,) * n if self.lower is None else tuple(Fraction(v) for v in self.lower)
        hi = (None,) * n if self.upper is None else tuple(
            None if v is None else Fraction(v) for v in self.upper)
        if len(lo) != n or len(hi) != n:
            raise DimensionMismatch("bounds length differs from n")
        for a, b in zip(lo, hi):
            if b is not None and a > b:
                raise InvalidInput(f"bound lo={a} exceeds hi={b}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "fixed", {int(k): Fraction(v) for k, v in self.fixed.items()})


@dataclass(frozen=True)
class BasicSolution:
    x: tuple[Fraction, ...]
    is_vertex: bool
    value: Fraction
    tight: frozenset

    def fractional_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.x) if 0 < v < 1]


def box_lp(objective, constraints, n, fixed=None) -> LinearProgram:
    """LP over the unit box with the given constraints."""
    return LinearProgram(n=n, objective=objective, constraints=tuple(constraints),
                         lower=(ZERO,) * n, upper=(ONE,) * n, fixed=fixed or {})


class _Tableau:
    """Dense bounded-variable simplex tableau with shifted lower bounds at zero."""

    def __init__(self, rows, rhs, upper, basis):
        self.rows = rows          # m rows of length N, expressed in the current basis
        self.beta = rhs           # values of basic variables
        self.upper = upper        # N upper bounds (None = infinity), lower bounds are 0
        self.basis = basis        # basic variable for each row
        self.at_upper = [False] * len(upper)
        self.pivots = 0

    def value_of(self, j):
        return self.upper[j] if self.at_upper[j] else ZERO

    def solution(self):
        N = len(self.upper)
        x = [self.value_of(j) for j in range(N)]
        for i, b in enumerate(self.basis):
            x[b] = self.beta[i]
        return x

    def run(self, cost):
        m = len(self.rows)
        N = len(self.upper)
        while True:
            basic = set(self.basis)
            # reduced costs d_j = c_j - c_B . column_j
            cb = [cost[b] for b in self.basis]
            enter = None
            for j in range(N):
                if j in basic or self.upper[j] == 0:
                    continue
                d = cost[j]
                for i in range(m):
                    a = self.rows[i][j]
                    if a and cb[i]:
                        d -= cb[i] * a
                if (not self.at_upper[j] and d < 0) or (self.at_upper[j] and d > 0):
                    enter = j
                    break
            if enter is None:
                return
            self._step(enter)

    def _step(self, j):
        m = len(self.rows)
        direction = -1 if self.at_upper[j] else 1
        best = None   # (theta, index, row)  row None means bound flip
        if self.upper[j] is not None:
            best = (self.upper[j], j, None)
        for i in range(m):
            a = self.rows[i][j] * direction
            if a == 0:
                continue
            b = self.basis[i]
            if a > 0:
                theta = self.beta[i] / a
            else:
                ub = self.upper[b]
                if ub is None:
                    continue
                theta = (ub - self.beta[i]) / (-a)
            if best is None or theta < best[0] or (theta == best[0] and b < best[1]):
                best = (theta, b, i)
        if best is None:
            raise LPUnbounded("objective unbounded below")
        theta, _, r = best
        delta = theta * direction
        for i in range(m):
            a = self.rows[i][j]
            if a:
                self.beta[i] -= a * delta
        if r is None:
            self.at_upper[j] = not self.at_upper[j]
            return
        leaving = self.basis[r]
        a_lv = self.rows[r][j] * direction
        self.at_upper[leaving] = a_lv < 0
        entering_value = self.value_of(j) + delta
        self.at_upper[j] = False
        self._pivot(r, j)
        self.beta[r] = entering_value
        self.pivots += 1

    def _pivot(self, r, j):
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            row = [v / piv for v in row]
            self.rows[r] = row
        nz = [(k, v) for k, v in enumerate(row) if v]
        for i in range(len(self.rows)):
            if i == r:
                continue
            f = self.rows[i][j]
            if f:
                ri = self.rows[i]
                for k, v in nz:
                    ri[k] -= f * v
        self.basis[r] = j


def simplex(lp: LinearProgram) -> BasicSolution:
    """Return an exact optimal basic solution of ``lp``.

    Raises LPInfeasible or LPUnbounded.  The pivot rule is Bland's rule with
    smallest-index tie breaking in both the entering and ratio steps, so the
    output is a deterministic function of the input.
    """
    n = lp.n
    lo = list(lp.lower)
    hi = list(lp.upper)
    for k, v in lp.fixed.items():
        if not 0 <= k < n:
            raise DimensionMismatch(f"fixed index {k} out of range")
        if v < lo[k] or (hi[k] is not None and v > hi[k]):
            raise LPInfeasible(f"fixed value {v} for x{k} outside its bounds")
        lo[k] = v
        hi[k] = v
    width = [None if hi[j] is None else hi[j] - lo[j] for j in range(n)]

    cons = lp.constraints
    m = len(cons)
    # columns: n structural, m slacks, m artificials
    N = n + 2 * m
    rows = []
    rhs = []
    upper = width + [None] * m + [None] * m
    for i, con in enumerate(cons):
        coeffs = list(con.coeffs)
        r = con.rhs - sum((a * l for a, l in zip(coeffs, lo) if a), ZERO)
        slack = ZERO if con.sense == EQ else (ONE if con.sense == LE else -ONE)
        if con.sense == EQ:
            upper[n + i] = ZERO
        sign = -1 if r < 0 else 1
        row = [a * sign for a in coeffs] + [ZERO] * (2 * m)
        row[n + i] = slack * sign
        row[n + m + i] = ONE
        rows.append(row)
        rhs.append(r * sign)
    tab = _Tableau(rows, rhs, upper, [n + m + i for i in range(m)])

    if m:
        phase1 = [ZERO] * (n + m) + [ONE] * m
        tab.run(phase1)
        infeas = sum((tab.beta[i] for i, b in enumerate(tab.basis) if b >= n + m), ZERO)
        if infeas > 0:
            raise LPInfeasible(f"linear system infeasible (phase-one residual {infeas})")
    for i in range(m):
        tab.upper[n + m + i] = ZERO

    cost = [ZERO] * N
    if lp.objective is not None:
        cost[:n] = list(lp.objective)
        tab.run(cost)

    full = tab.solution()
    x = tuple(full[j] + lo[j] for j in range(n))
    for j in range(n):
        if x[j] < lo[j] or (hi[j] is not None and x[j] > hi[j]):
            raise InvariantBreach(f"simplex produced out-of-bounds x{j} = {x[j]}")
    tight = set()
    for i, con in enumerate(cons):
        lhs = sum((a * v for a, v in zip(con.coeffs, x) if a), ZERO)
        ok = (lhs <= con.rhs if con.sense == LE else lhs >= con.rhs if con.sense == GE
              else lhs == con.rhs)
        if not ok:
            raise InvariantBreach(f"simplex violated constraint {i}: {lhs} {con.sense} {con.rhs}")
        if lhs == con.rhs:
            tight.add(i)
    value = ZERO if lp.objective is None else sum(
        (c * v for c, v in zip(lp.objective, x)), ZERO)
    interior = [j for j in range(n) if x[j] != lo[j] and (hi[j] is None or x[j] != hi[j])]
    is_vertex = _rank([[cons[i].coeffs[j] for j in interior] for i in sorted(tight)]) == len(interior)
    return BasicSolution(x=x, is_vertex=is_vertex, value=value, tight=frozenset(tight))


def _rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(r) for r in matrix]
    if not rows or not rows[0]:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col] / p
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def matrix_rank(matrix) -> int:
    return _rank([[Fraction(v) for v in row] for row in matrix])


# ---------------------------------------------------------------------------
# quadratic roots

TWO_ROOTS = "TwoRoots"
NO_REAL_ROOTS = "NoRealRoots"
DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class RootBracket:
    status: str
    lo1: Fraction | None = None
    hi1: Fraction | None = None
    lo2: Fraction | None = None
    hi2: Fraction | None = None
    width: Fraction | None = None


def quad_value(A, B, Cc, t) -> Fraction:
    return (A * t + B) * t + Cc


def quad_root_brackets(A, B, Cc, delta, method: str = "isqrt") -> RootBracket:
    """Bracket the real roots of A t^2 + B t + Cc (A > 0) to width ``delta``.

    ``method="isqrt"`` computes the square root of the discriminant with an
    integer square root at sufficient precision; ``method="bisect"`` runs sign
    bisection from a Cauchy-type root bound.  Both return closed rational
    brackets that contain the true roots.
    """
    A, B, Cc, delta = (Fraction(v) for v in (A, B, Cc, delta))
    if delta <= 0:
        raise NonPositiveDelta(f"bracket width must be positive, got {delta}")
    if A <= 0:
        raise InvariantBreach(f"leading coefficient must be positive, got {A}")
    disc = B * B - 4 * A * Cc
    if disc < 0:
        return RootBracket(NO_REAL_ROOTS, width=delta)
    if disc == 0:
        r = -B / (2 * A)
        return RootBracket(DEGENERATE, r, r, r, r, width=delta)
    if method == "isqrt":
        return _brackets_isqrt(A, B, disc, delta)
    if method == "bisect":
        return _brackets_bisect(A, B, Cc, delta)
    raise InvalidInput(f"unknown method {method!r}")


def _brackets_isqrt(A, B, disc, delta) -> RootBracket:
    dn, dd = disc.numerator, disc.denominator
    # sqrt(disc) = sqrt(dn*dd)/dd; choose 2^k with 1/(2A*dd*2^k) <= delta
    need = 1 / (2 * A * dd * delta)
    k = 0
    if need > 1:
        k = (need.numerator // need.denominator).bit_length()
        while Fraction(1 << k) < need:
            k += 1
    N = dn * dd << (2 * k)
    r = math.isqrt(N)
    scale = Fraction(1, dd << k)
    s_lo = r * scale
    s_hi = s_lo if r * r == N else (r + 1) * scale
    two_a = 2 * A
    lo1, hi1 = (-B - s_hi) / two_a, (-B - s_lo) / two_a
    lo2, hi2 = (-B + s_lo) / two_a, (-B + s_hi) / two_a
    return RootBracket(TWO_ROOTS, lo1, hi1, lo2, hi2, width=delta)


def _brackets_bisect(A, B, Cc, delta) -> RootBracket:
    M = 1 + (abs(B) + abs(Cc)) / A
    vertex = -B / (2 * A)

    def bisect(lo, hi, increasing):
        # invariant: the sign change lies in [lo, hi]
        while hi - lo > delta:
            mid = (lo + hi) / 2
            v = quad_value(A, B, Cc, mid)
            if v == 0:
                return mid, mid
            if (v > 0) == increasing:
                hi = mid
            else:
                lo = mid
        for t in (lo, hi):
            if quad_value(A, B, Cc, t) == 0:
                return t, t
        return lo, hi

    lo1, hi1 = bisect(-M, vertex, increasing=False)
    lo2, hi2 = bisect(vertex, M, increasing=True)
    return RootBracket(TWO_ROOTS, lo1, hi1, lo2, hi2, width=delta)
