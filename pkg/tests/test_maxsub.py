import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sossched.errors import EpsilonOutOfRange, InfeasibleInput
from sossched.maxsub import phi_rational, scale_to_f2, solve_maxsub
from sossched.model import FractionalVector, MaxSubInstance, eval_f, eval_g, eval_qform, in_f1
from sossched.oracle import brute_maxsub
from sossched.runner import grid_relaxation
from strategies import maxsub_instances

F = Fraction
PHI = 2 / (1 + math.sqrt(5))


class TestPhi:
    def test_default_precision(self):
        phi = phi_rational()
        assert phi.square + phi.value <= 1
        assert 1 - (phi.square + phi.value) <= F(1, 2 ** 63)
        assert abs(float(phi.value) - 0.6180339887498949) < 1e-15

    def test_four_bits(self):
        assert phi_rational(4).value == F(9, 16)

    @given(st.integers(2, 80))
    def test_below_and_close(self, bits):
        phi = phi_rational(bits)
        assert phi.square + phi.value <= 1
        nxt = phi.value + F(1, 2 ** bits)
        assert nxt * nxt + nxt > 1
        assert phi_rational(bits + 1).value >= phi.value

    def test_bits_guard(self):
        with pytest.raises(ValueError):
            phi_rational(1)


class TestScale:
    inst = MaxSubInstance(a=[1, 1], a_off=[[0, -1], [-1, 0]], squares=[[1, 1]], capacity=1)

    def test_zero(self):
        assert scale_to_f2(self.inst, (0, 0), phi_rational()).x == (0, 0)

    def test_boundary(self):
        x = (F(1, 2), F(1, 2))
        assert eval_qform(self.inst, x) == self.inst.capacity
        y = scale_to_f2(self.inst, x, phi_rational())
        assert eval_g(self.inst, y.x) <= self.inst.capacity

    def test_rejects_outside(self):
        with pytest.raises(InfeasibleInput):
            scale_to_f2(self.inst, (1, 1), phi_rational())

    @settings(max_examples=100)
    @given(maxsub_instances(max_n=5), st.data())
    def test_scaling_guarantees(self, inst, data):
        x = data.draw(st.lists(st.fractions(0, 1, max_denominator=10), min_size=inst.n,
                               max_size=inst.n))
        t = 1
        while not in_f1(inst, [v * t for v in x]):
            t /= F(2)
        x = [v * t for v in x]
        phi = phi_rational()
        y = scale_to_f2(inst, x, phi).x
        assert eval_g(inst, y) <= inst.capacity
        assert eval_f(inst, y) >= phi.square * eval_f(inst, x)


class TestSolve:
    def test_single_item(self):
        inst = MaxSubInstance(a=[1], a_off=[[0]], squares=[[1]], capacity=1)
        x, rep = solve_maxsub(inst)
        assert x.x == (1,) and rep.value == 1

    def test_all_singletons_infeasible(self):
        inst = MaxSubInstance(a=[5, 7], a_off=[[0, 0], [0, 0]], squares=[[3, 4]], capacity=2)
        x, rep = solve_maxsub(inst)
        assert x.x == (0, 0) and rep.value == 0 and rep.winner == "empty"

    def test_epsilon_range(self):
        inst = MaxSubInstance(a=[1], a_off=[[0]], squares=[[1]], capacity=1)
        with pytest.raises(EpsilonOutOfRange):
            solve_maxsub(inst, eps=0)

    def test_forced_zero_lifted(self):
        inst = MaxSubInstance(a=[-1, 3], a_off=[[0, 0], [0, 0]], squares=[[1, 1]], capacity=4)
        x, rep = solve_maxsub(inst)
        assert x.x == (0, 1) and rep.forced_zeros == (0,)

    def test_pluggable_relaxation(self):
        inst = MaxSubInstance(a=[3, 4], a_off=[[0, -1], [-1, 0]], squares=[[1, 2]], capacity=5)

        def fixed(reduced):
            return FractionalVector((F(1), F(1, 2))), None
        fixed.name = "fixed"
        x, rep = solve_maxsub(inst, relaxation=fixed)
        assert rep.relaxation == "fixed" and rep.f_frac == eval_f(inst, (1, F(1, 2)))
        assert eval_qform(inst, x.x) <= inst.capacity

    @settings(max_examples=25)
    @given(maxsub_instances(min_n=1, max_n=6))
    def test_chain_and_oracle(self, inst):
        x, rep = solve_maxsub(inst, K_override=8)
        _, opt = brute_maxsub(inst)
        phi = phi_rational()
        assert eval_qform(inst, x.x) <= inst.capacity
        assert rep.value == eval_f(inst, x.x) <= opt
        assert rep.value >= phi.square / 2 * rep.f_frac
        assert rep.f_pipage >= rep.f_scaled
        assert rep.value >= rep.f_singleton

    @settings(max_examples=15)
    @given(maxsub_instances(min_n=1, max_n=3))
    def test_grid_relaxation_floor(self, inst):
        x, rep = solve_maxsub(inst, relaxation=grid_relaxation(32))
        _, opt = brute_maxsub(inst)
        floor = PHI ** 2 / (2 * math.e) - 1 / 4
        assert float(rep.value) >= floor * float(opt)
