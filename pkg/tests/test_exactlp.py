import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sossched.errors import InvariantBreach, LPInfeasible, NonPositiveDelta, Singular
from sossched.exactlp import (
    DEGENERATE,
    GE,
    LE,
    NO_REAL_ROOTS,
    TWO_ROOTS,
    Constraint,
    LinearProgram,
    box_lp,
    matrix_rank,
    quad_root_brackets,
    quad_value,
    simplex,
    solve_2x2,
)


def _solve_square(rows, rhs):
    """Exact Gaussian elimination; None when singular."""
    n = len(rows)
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertex_oracle(c, cons, n):
    """min c.x over the unit box and ``cons`` by enumerating all vertices."""
    planes = [(list(a), b) for a, _, b in cons]
    for i in range(n):
        e = [Fraction(int(k == i)) for k in range(n)]
        planes += [(e, Fraction(0)), (e, Fraction(1))]
    best = None
    for subset in itertools.combinations(planes, n):
        x = _solve_square([p[0] for p in subset], [p[1] for p in subset])
        if x is None or any(v < 0 or v > 1 for v in x):
            continue
        ok = all((sum(ai * xi for ai, xi in zip(a, x)) >= b) if s == GE else
                 (sum(ai * xi for ai, xi in zip(a, x)) <= b) for a, s, b in cons)
        if ok:
            val = sum(ci * xi for ci, xi in zip(c, x))
            best = val if best is None else min(best, val)
    return best


class TestSolve2x2:
    def test_identity(self):
        assert solve_2x2(1, 0, 2, 0, 1, 3) == (2, 3)

    def test_singular(self):
        with pytest.raises(Singular):
            solve_2x2(1, 2, 5, 2, 4, 7)

    def test_back_substitution(self):
        assert solve_2x2(1, 3, 7, 2, 1, 4) == (1, 2)

    @given(st.lists(st.integers(-9, 9), min_size=6, max_size=6))
    def test_satisfies_system(self, v):
        pj, qj, cj, pk, qk, ck = v
        try:
            z1, z2 = solve_2x2(*v)
        except Singular:
            assert pj * qk == pk * qj
            return
        assert pj * z1 + qj * z2 == cj and pk * z1 + qk * z2 == ck


class TestSimplex:
    def test_two_item_cover(self):
        sol = simplex(box_lp((1, 1), [Constraint((1, 1), GE, 1)], 2))
        assert sol.value == 1
        assert sol.x == (1, 0)  # Bland's rule enters the lowest index first
        assert sol.is_vertex

    def test_infeasible(self):
        lp = LinearProgram(n=1, constraints=(Constraint((1,), "=", 2),), lower=(0,), upper=(1,))
        with pytest.raises(LPInfeasible):
            simplex(lp)

    def test_fixed_variables(self):
        lp = box_lp((1, 1, 1), [Constraint((1, 1, 1), GE, Fraction(3, 2))], 3, fixed={0: 1})
        sol = simplex(lp)
        assert sol.x[0] == 1 and sol.value == Fraction(3, 2)

    def test_unbounded_above_variable(self):
        lp = LinearProgram(n=1, objective=(1,), constraints=(Constraint((1,), GE, 5),),
                           lower=(0,), upper=(None,))
        assert simplex(lp).x == (5,)

    def test_deterministic(self):
        lp = box_lp((3, 2, 2, 1), [Constraint((1, 2, 3, 1), GE, 3), Constraint((2, 1, 1, 3), GE, 2)], 4)
        assert simplex(lp) == simplex(lp)

    @given(st.data())
    def test_matches_vertex_oracle(self, data):
        n = data.draw(st.integers(2, 4))
        c = data.draw(st.lists(st.integers(1, 9), min_size=n, max_size=n))
        cons = []
        for _ in range(2):
            a = data.draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
            b = Fraction(data.draw(st.integers(0, sum(a) * 4)), 4)
            cons.append((tuple(Fraction(v) for v in a), GE, b))
        lp = box_lp(c, [Constraint(*k) for k in cons], n)
        sol = simplex(lp)
        assert sol.value == vertex_oracle(c, cons, n)
        assert len(sol.fractional_indices()) <= 2
        assert sol.is_vertex

    @given(st.data())
    def test_mixed_senses_feasible_point(self, data):
        n = 3
        a = data.draw(st.lists(st.integers(-4, 4), min_size=n, max_size=n))
        b = data.draw(st.integers(-4, 4))
        lp = box_lp(None, [Constraint(a, LE, b)], n)
        try:
            sol = simplex(lp)
        except LPInfeasible:
            assert sum(min(v, 0) for v in a) > b
            return
        assert sum(ai * xi for ai, xi in zip(a, sol.x)) <= b


class TestRank:
    def test_rank(self):
        assert matrix_rank([[1, 2], [2, 4]]) == 1
        assert matrix_rank([[1, 0], [0, 1], [1, 1]]) == 2


class TestRootBrackets:
    def test_rational_roots_exact(self):
        rb = quad_root_brackets(1, 0, -1, Fraction(1, 2 ** 10))
        assert rb.status == TWO_ROOTS
        assert (rb.lo1, rb.hi1, rb.lo2, rb.hi2) == (-1, -1, 1, 1)

    def test_no_real_roots(self):
        assert quad_root_brackets(1, 0, 1, Fraction(1, 8)).status == NO_REAL_ROOTS

    def test_double_root(self):
        rb = quad_root_brackets(1, -2, 1, Fraction(1, 8))
        assert rb.status == DEGENERATE and rb.lo1 == rb.hi2 == 1

    @pytest.mark.parametrize("method", ["isqrt", "bisect"])
    def test_sqrt_two(self, method):
        d = Fraction(1, 2 ** 20)
        rb = quad_root_brackets(1, 0, -2, d, method=method)
        assert rb.hi2 - rb.lo2 <= d and rb.hi1 - rb.lo1 <= d
        assert rb.lo2 ** 2 < 2 < rb.hi2 ** 2
        assert rb.lo1 ** 2 > 2 > rb.hi1 ** 2
        assert math.isclose(float(rb.lo2), math.sqrt(2), abs_tol=1e-6)

    def test_bad_delta(self):
        with pytest.raises(NonPositiveDelta):
            quad_root_brackets(1, 0, -1, 0)

    def test_bad_leading(self):
        with pytest.raises(InvariantBreach):
            quad_root_brackets(0, 1, -1, Fraction(1, 4))

    @given(st.fractions(min_value=Fraction(1, 8), max_value=20, max_denominator=8),
           st.fractions(min_value=-20, max_value=20, max_denominator=8),
           st.fractions(min_value=-20, max_value=20, max_denominator=8),
           st.sampled_from(["isqrt", "bisect"]))
    def test_brackets_straddle(self, A, B, Cc, method):
        d = Fraction(1, 2 ** 12)
        rb = quad_root_brackets(A, B, Cc, d, method=method)
        if rb.status != TWO_ROOTS:
            assert (B * B - 4 * A * Cc <= 0)
            return
        for lo, hi in ((rb.lo1, rb.hi1), (rb.lo2, rb.hi2)):
            assert 0 <= hi - lo <= d
            assert quad_value(A, B, Cc, lo) * quad_value(A, B, Cc, hi) <= 0
        assert rb.hi1 <= rb.lo2

    @given(st.integers(1, 9), st.integers(-30, 30), st.integers(-30, 30))
    def test_methods_agree(self, A, B, Cc):
        d = Fraction(1, 2 ** 16)
        r1 = quad_root_brackets(A, B, Cc, d, "isqrt")
        r2 = quad_root_brackets(A, B, Cc, d, "bisect")
        assert r1.status == r2.status
        if r1.status == TWO_ROOTS:
            assert max(r1.lo2, r2.lo2) <= min(r1.hi2, r2.hi2)
            assert max(r1.lo1, r2.lo1) <= min(r1.hi1, r2.hi1)
