"""Exact solver for the continuous relaxation of MinCKP under coordinate fixings.

The relaxation is min c.x over x in [0,1]^n subject to
(base_p + p.x)^2 + (base_q + q.x)^2 >= C.  It is non-convex, but every
optimal point lies on a face of the cost zonotope described by a pair of
dual multipliers (z1, z2) obtained from two items.  On such a face the cost
is a linear function of the aggregates xi = sum p_i x_i and zeta = sum q_i x_i,
which turns the feasibility question for a fixed cost T into a quadratic
inequality in one variable plus a small feasibility LP.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key

from . import exactlp
from .errors import (
    CollinearPQ,
    Infeasible,
    InvalidInput,
    InvalidTarget,
    InvariantBreach,
    LPInfeasible,
    NonPositiveDelta,
    Singular,
)
from .exactlp import Constraint, LinearProgram, quad_root_brackets, quad_value, simplex, solve_2x2
from .model import FractionalVector, MinCkpInstance, vectors_collinear

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Fixings:
    S0: frozenset = frozenset()
    S1: frozenset = frozenset()

    def __post_init__(self):
        s0, s1 = frozenset(self.S0), frozenset(self.S1)
        if s0 & s1:
            raise InvalidInput(f"fixings overlap on {sorted(s0 & s1)}")
        object.__setattr__(self, "S0", s0)
        object.__setattr__(self, "S1", s1)


NO_FIXINGS = Fixings()


@dataclass(frozen=True)
class DualClassification:
    pair: tuple[int, int]
    z1: Fraction
    z2: Fraction
    delta0: frozenset
    delta1: frozenset
    delta: frozenset


def _sum(values):
    return sum(values, ZERO)


@dataclass
class _Face:
    """Aggregates of one dual classification."""

    cls: DualClassification
    items: tuple[int, ...]        # indices in delta, ascending
    P1: Fraction
    Q1: Fraction
    c1: Fraction
    pbar: Fraction
    qbar: Fraction
    cbar: Fraction


@dataclass
class _Context:
    inst: MinCkpInstance
    fix: Fixings
    free: tuple[int, ...]
    movers: tuple[int, ...]       # free items with (p_i, q_i) != 0
    idle: tuple[int, ...]         # free items with p_i = q_i = 0
    P0: Fraction
    Q0: Fraction
    c0: Fraction
    collinear: bool
    faces: list = field(default_factory=list)
    classes: list = field(default_factory=list)


def _context(inst: MinCkpInstance, fix: Fixings) -> _Context:
    n = inst.n
    for i in fix.S0 | fix.S1:
        if not 0 <= i < n:
            raise InvalidInput(f"fixed index {i} out of range")
    free = tuple(i for i in range(n) if i not in fix.S0 and i not in fix.S1)
    p, q, c = inst.p, inst.q, inst.c
    movers = tuple(i for i in free if p[i] or q[i])
    idle = tuple(i for i in free if not (p[i] or q[i]))
    ctx = _Context(
        inst=inst, fix=fix, free=free, movers=movers, idle=idle,
        P0=inst.base_p + _sum(p[i] for i in fix.S1),
        Q0=inst.base_q + _sum(q[i] for i in fix.S1),
        c0=_sum(c[i] for i in fix.S1),
        collinear=vectors_collinear(p, q, free))
    if ctx.collinear:
        return ctx
    seen = set()
    for a_pos, j in enumerate(free):
        for k in free[a_pos + 1:]:
            try:
                z1, z2 = solve_2x2(p[j], q[j], c[j], p[k], q[k], c[k])
            except Singular:
                continue
            cls = classify(inst, fix, (j, k), z1, z2, free)
            ctx.classes.append(cls)
            if (z1, z2) in seen:
                continue
            seen.add((z1, z2))
            items = tuple(sorted(cls.delta))
            ctx.faces.append(_Face(
                cls=cls, items=items,
                P1=ctx.P0 + _sum(p[i] for i in cls.delta1),
                Q1=ctx.Q0 + _sum(q[i] for i in cls.delta1),
                c1=ctx.c0 + _sum(c[i] for i in cls.delta1),
                pbar=_sum(p[i] for i in items),
                qbar=_sum(q[i] for i in items),
                cbar=_sum(c[i] for i in items)))
    return ctx


def classify(inst, fix, pair, z1, z2, free=None) -> DualClassification:
    """Split the free items by the sign of p_i z1 + q_i z2 - c_i."""
    if free is None:
        free = [i for i in range(inst.n) if i not in fix.S0 and i not in fix.S1]
    d0, d1, d = [], [], []
    for i in free:
        s = inst.p[i] * z1 + inst.q[i] * z2
        if s < inst.c[i]:
            d0.append(i)
        elif s > inst.c[i]:
            d1.append(i)
        else:
            d.append(i)
    return DualClassification(pair=tuple(pair), z1=z1, z2=z2, delta0=frozenset(d0),
                              delta1=frozenset(d1), delta=frozenset(d))


def dual_classifications(inst: MinCkpInstance, fix: Fixings = NO_FIXINGS) -> list[DualClassification]:
    """All classifications from independent free pairs, in lexicographic pair order."""
    return list(_context(inst, fix).classes)


def _constraint_at(P0, Q0, inst, x, indices):
    P = P0 + _sum(inst.p[i] * x[i] for i in indices)
    Q = Q0 + _sum(inst.q[i] * x[i] for i in indices)
    return P * P + Q * Q


def _assemble(ctx: _Context, values: dict) -> list:
    x = [ZERO] * ctx.inst.n
    for i in ctx.fix.S1:
        x[i] = ONE
    for i, v in values.items():
        x[i] = v
    return x


def _finish(ctx: _Context, x, T, delta, algorithm, info) -> FractionalVector:
    inst = ctx.inst
    cost = _sum(a * b for a, b in zip(inst.c, x))
    if T is not None and cost != T:
        raise InvariantBreach(f"assembled point has cost {cost}, expected {T}")
    val = (inst.base_p + _sum(a * b for a, b in zip(inst.p, x))) ** 2 + \
          (inst.base_q + _sum(a * b for a, b in zip(inst.q, x))) ** 2
    if val < inst.capacity - delta:
        raise InvariantBreach(f"assembled point misses capacity by more than delta: {val}")
    return FractionalVector(tuple(x), delta=delta, algorithm=algorithm, info=info)


# ---------------------------------------------------------------------------
# feasibility for a fixed cost


def _face_intervals(face: _Face, T, delta, C):
    """Admissible intervals for the kept aggregate on one face, widened to delta.

    Returns (use_p, intervals) where use_p says whether the kept aggregate is
    xi (p-weighted) or zeta (q-weighted).
    """
    z1, z2 = face.cls.z1, face.cls.z2
    R = T - face.c1
    if z2 > 0:
        use_p, w, u, P, Q, top = True, z2, z1, face.P1, face.Q1, face.pbar
    else:
        use_p, w, u, P, Q, top = False, z1, z2, face.Q1, face.P1, face.qbar
    if w <= 0:
        raise InvariantBreach(f"dual pair {face.cls.pair} has no positive multiplier")
    # (w P + w t)^2 + (w Q + R - u t)^2 >= w^2 C
    A = w * w + u * u
    B = 2 * w * w * P - 2 * u * (w * Q + R)
    Cc = w * w * P * P + (w * Q + R) ** 2 - w * w * C
    bound = -delta * w * w
    dprime = delta / (8 * (1 + z1 * z1 + z2 * z2) * (1 + top + abs(T) + face.c1 + face.P1 + face.Q1))
    while True:
        br = quad_root_brackets(A, B, Cc, dprime)
        if br.status != exactlp.TWO_ROOTS:
            return use_p, [(ZERO, top)]
        # the quadratic is convex with its vertex between the roots, so on the
        # widened pieces it is smallest at the inner endpoint or at the vertex
        vertex = -B / (2 * A)
        ok = quad_value(A, B, Cc, br.hi1) >= bound and quad_value(A, B, Cc, br.lo2) >= bound
        if br.hi1 >= vertex or br.lo2 <= vertex:
            ok = ok and quad_value(A, B, Cc, vertex) >= bound
        if ok:
            break
        dprime /= 16
    intervals = []
    if br.hi1 >= 0:
        intervals.append((ZERO, min(br.hi1, top)))
    if br.lo2 <= top:
        lo = max(br.lo2, ZERO)
        if intervals and intervals[-1][1] >= lo:
            intervals[-1] = (ZERO, top)
        else:
            intervals.append((lo, top))
    return use_p, intervals


def _face_lp(ctx: _Context, face: _Face, R, use_p, interval):
    inst = ctx.inst
    items = face.items
    m = len(items)
    weights = [(inst.p if use_p else inst.q)[i] for i in items]
    top = face.pbar if use_p else face.qbar
    cons = [Constraint(tuple(inst.c[i] for i in items), exactlp.EQ, R)]
    lo, hi = interval
    if lo > 0:
        cons.append(Constraint(tuple(weights), exactlp.GE, lo))
    if hi < top:
        cons.append(Constraint(tuple(weights), exactlp.LE, hi))
    lp = LinearProgram(n=m, objective=None, constraints=tuple(cons),
                       lower=(ZERO,) * m, upper=(ONE,) * m)
    try:
        sol = simplex(lp)
    except LPInfeasible:
        return None
    return dict(zip(items, sol.x))


def _t_feasible(ctx: _Context, T, delta):
    inst = ctx.inst
    c = inst.c
    full_movers = ctx.c0 + _sum(c[i] for i in ctx.movers)
    if T >= full_movers:
        # every moving item at one; idle items absorb the remaining cost
        values = {i: ONE for i in ctx.movers}
        rest = T - full_movers
        for i in ctx.idle:
            take = min(ONE, rest / c[i])
            values[i] = take
            rest -= take * c[i]
        if rest:
            return None
        x = _assemble(ctx, values)
        if _constraint_at(inst.base_p, inst.base_q, inst, x, range(inst.n)) < inst.capacity - delta:
            return None
        return _finish(ctx, x, T, delta, "nlp_t_feasible", {"face": "top"})
    if ctx.collinear:
        raise CollinearPQ("free p and q are linearly dependent; use lp_fallback")
    for face in ctx.faces:
        R = T - face.c1
        if R < 0 or R > face.cbar:
            continue
        use_p, intervals = _face_intervals(face, T, delta, inst.capacity)
        for interval in intervals:
            values = _face_lp(ctx, face, R, use_p, interval)
            if values is None:
                continue
            for i in face.cls.delta1:
                values[i] = ONE
            x = _assemble(ctx, values)
            return _finish(ctx, x, T, delta, "nlp_t_feasible",
                           {"pair": face.cls.pair, "z": (str(face.cls.z1), str(face.cls.z2))})
    return None


def nlp_t_feasible(inst: MinCkpInstance, fix: Fixings, T, delta) -> FractionalVector | None:
    """Find x with c.x == T and constraint >= C - delta, or return None.

    None means that no point of cost exactly T satisfies the constraint
    exactly.  Raises CollinearPQ when the free p, q are dependent.
    """
    T, delta = Fraction(T), Fraction(delta)
    if delta <= 0:
        raise NonPositiveDelta("delta must be positive")
    ctx = _context(inst, fix)
    _check_target(ctx, T)
    return _t_feasible(ctx, T, delta)


def _check_target(ctx, T):
    top = ctx.c0 + _sum(ctx.inst.c[i] for i in ctx.free)
    if T < ctx.c0 or T > top:
        raise InvalidTarget(f"target {T} outside [{ctx.c0}, {top}]")


# ---------------------------------------------------------------------------
# optimisation


@dataclass(frozen=True)
class NlpResult:
    x: FractionalVector
    value: Fraction
    iterations: int
    calls: int
    route: str


def _angle_cmp(a, b):
    # order generators (p, q) >= 0 by angle from the p-axis
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def _upper_root(a, b, cc, delta):
    """A rational t >= the larger root of a t^2 + 2 b t + cc, within delta."""
    br = quad_root_brackets(a, 2 * b, cc, delta)
    return br.hi2


def _chain_min_cost(ctx: _Context, face: _Face, delta) -> Fraction | None:
    inst = ctx.inst
    C = inst.capacity
    gens = sorted(((inst.p[i], inst.q[i], inst.c[i], i) for i in face.items),
                  key=cmp_to_key(lambda u, v: _angle_cmp(u, v) or (u[3] - v[3])))
    best = None
    for chain in (gens, gens[::-1]):
        P, Q, cost = face.P1, face.Q1, face.c1
        if P * P + Q * Q >= C:
            return cost
        for gp, gq, gc, _ in chain:
            nP, nQ = P + gp, Q + gq
            if nP * nP + nQ * nQ >= C:
                a = gp * gp + gq * gq
                b = P * gp + Q * gq
                t = min(ONE, _upper_root(a, b, P * P + Q * Q - C, delta / (8 * gc)))
                val = cost + t * gc
                if best is None or val < best:
                    best = val
                break
            P, Q, cost = nP, nQ, cost + gc
    return best


def nlp_solve(inst: MinCkpInstance, fix: Fixings = NO_FIXINGS, delta=Fraction(1, 2 ** 20),
              report: bool = False):
    """Return a delta-optimal point of the relaxation under ``fix``.

    The result costs at most OPT + delta and satisfies the constraint within
    additive delta.  With ``report=True`` an :class:`NlpResult` is returned.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise NonPositiveDelta("delta must be positive")
    ctx = _context(inst, fix)
    res = _nlp_solve(ctx, delta)
    return res if report else res.x


def _nlp_solve(ctx: _Context, delta) -> NlpResult:
    inst = ctx.inst
    C = inst.capacity
    x0 = _assemble(ctx, {})
    if _constraint_at(inst.base_p, inst.base_q, inst, x0, range(inst.n)) >= C - delta:
        sol = _finish(ctx, x0, None, delta, "nlp_solve", {"route": "fixed"})
        return NlpResult(sol, ctx.c0, 0, 0, "fixed")
    P = ctx.P0 + _sum(inst.p[i] for i in ctx.free)
    Q = ctx.Q0 + _sum(inst.q[i] for i in ctx.free)
    if P * P + Q * Q < C - delta:
        raise Infeasible("relaxation infeasible under the given fixings")
    if ctx.collinear:
        sol = _lp_fallback(ctx, delta)
        return NlpResult(sol, _sum(a * b for a, b in zip(inst.c, sol.x)), 0, 0, "collinear")

    top_cost = ctx.c0 + _sum(inst.c[i] for i in ctx.free)
    calls = 0
    warm = None
    for face in ctx.faces:
        v = _chain_min_cost(ctx, face, delta)
        if v is not None and (warm is None or v < warm):
            warm = v
    if warm is None:
        warm = top_cost

    def probe(T):
        nonlocal calls
        calls += 1
        return _t_feasible(ctx, T, delta)

    # certified bracket: feasible UB, infeasible LB (c0 is infeasible here)
    step = delta / 8
    ub = min(warm + step, top_cost)
    ub_sol = probe(ub)
    while ub_sol is None:
        if ub == top_cost:
            raise InvariantBreach("full vector rejected although it reaches the capacity")
        step *= 2
        ub = min(ub + step, top_cost)
        ub_sol = probe(ub)
    step = delta / 2
    lb = max(ub - step, ctx.c0)
    while lb > ctx.c0:
        s = probe(lb)
        if s is None:
            break
        ub, ub_sol = lb, s
        step *= 2
        lb = max(ub - step, ctx.c0)
    iterations = 0
    while ub - lb > delta:
        T = (ub + lb) / 2
        iterations += 1
        s = probe(T)
        if s is None:
            lb = T
        else:
            ub, ub_sol = T, s
    info = dict(ub_sol.info, route="search", lower=str(lb), iterations=iterations)
    sol = FractionalVector(ub_sol.x, delta=delta, algorithm="nlp_solve", info=info)
    return NlpResult(sol, ub, iterations, calls, "search")


def lp_fallback(inst: MinCkpInstance, fix: Fixings = NO_FIXINGS, delta=Fraction(1, 2 ** 20)):
    """Solve the relaxation when the free p and q vectors are proportional."""
    delta = Fraction(delta)
    if delta <= 0:
        raise NonPositiveDelta("delta must be positive")
    ctx = _context(inst, fix)
    if not ctx.collinear:
        raise InvalidInput("lp_fallback needs proportional free p and q")
    return _lp_fallback(ctx, delta)


def _lp_fallback(ctx: _Context, delta) -> FractionalVector:
    inst = ctx.inst
    C = inst.capacity
    P0, Q0 = ctx.P0, ctx.Q0
    movers = ctx.movers
    if P0 * P0 + Q0 * Q0 >= C - delta or not movers:
        if P0 * P0 + Q0 * Q0 < C - delta:
            raise Infeasible("no free item can raise the constraint")
        return _finish(ctx, _assemble(ctx, {}), None, delta, "lp_fallback", {"threshold": "0"})
    r = movers[0]
    u, v = inst.p[r], inst.q[r]
    scale = [(inst.p[i] / u if u else inst.q[i] / v) for i in movers]
    smax = _sum(scale)
    a = u * u + v * v
    b = P0 * u + Q0 * v

    def reach(s):
        return (P0 + s * u) ** 2 + (Q0 + s * v) ** 2

    if reach(smax) < C - delta:
        raise Infeasible("relaxation infeasible under the given fixings")
    width = delta / (4 * (1 + 2 * a * smax + 2 * b))
    while True:
        br = quad_root_brackets(a, 2 * b, P0 * P0 + Q0 * Q0 - C, width)
        s = max(ZERO, br.lo2)
        s = min(s, smax)
        if reach(s) >= C - delta:
            break
        width /= 16
    m = len(movers)
    lp = LinearProgram(
        n=m, objective=tuple(inst.c[i] for i in movers),
        constraints=(Constraint(tuple(scale), exactlp.GE, s),),
        lower=(ZERO,) * m, upper=(ONE,) * m)
    sol = simplex(lp)
    x = _assemble(ctx, dict(zip(movers, sol.x)))
    return _finish(ctx, x, None, delta, "lp_fallback", {"threshold": str(s)})
