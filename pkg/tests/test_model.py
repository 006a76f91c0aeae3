from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sossched.errors import (
    DimensionMismatch,
    EmptyInstance,
    Infeasible,
    InvalidInput,
    NegativePQ,
    PositiveOffDiagonal,
)
from sossched.model import (
    BinaryVector,
    FractionalVector,
    MaxSubInstance,
    MinCkpInstance,
    bit_size,
    eval_f,
    eval_g,
    eval_minckp_constraint,
    eval_qform,
    parse_instance,
    preprocess_maxsub,
    preprocess_minckp,
    quad_form,
    serialize_instance,
    to_rational,
)
from strategies import binary_vectors, maxsub_instances, minckp_instances, unit_vectors


class TestRationals:
    def test_parse_forms(self):
        assert to_rational("3/6") == Fraction(1, 2)
        assert to_rational(-4) == -4
        assert to_rational("7") == 7

    @pytest.mark.parametrize("bad", [0.5, True, "1.5", "1/0", "a/b", None])
    def test_rejects(self, bad):
        with pytest.raises(InvalidInput):
            to_rational(bad)

    def test_bit_size_canonical(self):
        assert bit_size(Fraction(2, 4)) == bit_size(Fraction(1, 2)) == 3


class TestVectors:
    def test_fractional_box(self):
        with pytest.raises(InvalidInput):
            FractionalVector((Fraction(3, 2),))
        assert FractionalVector((Fraction(1, 3), 0, 1)).fractional_indices() == [0]

    def test_binary_entries(self):
        with pytest.raises(InvalidInput):
            BinaryVector((0, 2))
        assert BinaryVector((1, 0, 1)).support() == [0, 2]


class TestPreprocessMinckp:
    def test_forced_one(self):
        inst = MinCkpInstance(c=[-1, 2], p=[1, 1], q=[1, 1], capacity=4)
        reduced, rep = preprocess_minckp(inst)
        assert rep.forced_ones == {0}
        assert reduced.n == 1
        assert (reduced.base_p, reduced.base_q) == (1, 1)
        assert rep.lift((1,)) == (1, 1)

    def test_infeasible(self):
        with pytest.raises(Infeasible):
            preprocess_minckp(MinCkpInstance(c=[1], p=[1], q=[1], capacity=9))

    def test_unchanged(self):
        inst = MinCkpInstance(c=[2, 3], p=[1, 2], q=[2, 1], capacity=9)
        reduced, rep = preprocess_minckp(inst)
        assert reduced is inst and rep.empty

    def test_negative_power(self):
        with pytest.raises(NegativePQ):
            preprocess_minckp(MinCkpInstance(c=[1, 1], p=[1, -1], q=[1, 1], capacity=1))

    @given(minckp_instances())
    def test_idempotent(self, inst):
        reduced, _ = preprocess_minckp(inst)
        again, rep = preprocess_minckp(reduced)
        assert rep.empty and again == reduced


class TestPreprocessMaxsub:
    def test_forced_zero(self):
        inst = MaxSubInstance(a=[-1, 5], a_off=[[0, -3], [-3, 0]], squares=[[1, 1]], capacity=4)
        reduced, rep = preprocess_maxsub(inst)
        assert rep.forced_zeros == {0} and reduced.n == 1

    def test_positive_off_diagonal(self):
        inst = MaxSubInstance(a=[1, 1], a_off=[[0, "1/2"], ["1/2", 0]], squares=[[1, 1]],
                              capacity=4)
        with pytest.raises(PositiveOffDiagonal):
            preprocess_maxsub(inst)

    def test_derived_matrices(self):
        inst = MaxSubInstance(a=[1, 1], a_off=[[0, 0], [0, 0]], squares=[[1, 2]], capacity=9)
        assert inst.Q == ((1, 2), (2, 4))
        assert inst.q == (1, 4)
        assert inst.Qstar == ((0, 2), (2, 0))

    def test_empty(self):
        with pytest.raises(EmptyInstance):
            preprocess_maxsub(MaxSubInstance(a=[], a_off=[], squares=[], capacity=1))

    def test_nonzero_diagonal(self):
        with pytest.raises(InvalidInput):
            MaxSubInstance(a=[1], a_off=[[1]], squares=[[1]], capacity=1)

    @given(maxsub_instances())
    def test_idempotent(self, inst):
        reduced, _ = preprocess_maxsub(inst)
        _, rep = preprocess_maxsub(reduced)
        assert rep.empty


class TestEvaluation:
    def test_constraint_examples(self):
        assert eval_minckp_constraint(MinCkpInstance(c=[1], p=[3], q=[4], capacity=1), (1,)) == 25
        two = MinCkpInstance(c=[1, 1], p=[1, 2], q=[2, 1], capacity=1)
        assert eval_minckp_constraint(two, (0, 0)) == 0
        assert eval_minckp_constraint(two, (1, 1)) == 18

    def test_dimension(self):
        inst = MinCkpInstance(c=[1], p=[3], q=[4], capacity=1)
        with pytest.raises(DimensionMismatch):
            eval_minckp_constraint(inst, (1, 0))

    def test_f_g_examples(self):
        inst = MaxSubInstance(a=[3], a_off=[[0]], squares=[[2]], capacity=9)
        assert eval_f(inst, (0,)) == 0 and eval_g(inst, (0,)) == 0
        assert eval_f(inst, (1,)) == 3 and eval_g(inst, (1,)) == 4

    @given(maxsub_instances(max_n=6), st.data())
    def test_split_identity_on_binary(self, inst, data):
        x = data.draw(binary_vectors(inst.n))
        assert eval_g(inst, x) == quad_form(inst.Q, x) == eval_qform(inst, x)

    @given(maxsub_instances(max_n=6), st.data())
    def test_objective_as_quadratic_form(self, inst, data):
        x = data.draw(binary_vectors(inst.n))
        A = [[inst.a[i] if i == j else inst.a_off[i][j] for j in range(inst.n)]
             for i in range(inst.n)]
        assert eval_f(inst, x) == quad_form(A, x)

    @given(maxsub_instances(max_n=5), st.data())
    def test_g_dominates_qform_on_box(self, inst, data):
        x = data.draw(unit_vectors(inst.n))
        assert eval_g(inst, x) >= eval_qform(inst, x)


class TestSerialization:
    @given(minckp_instances())
    def test_minckp_round_trip(self, inst):
        text = serialize_instance(inst)
        back = parse_instance(text)
        assert back == inst and serialize_instance(back) == text

    @given(maxsub_instances())
    def test_maxsub_round_trip(self, inst):
        text = serialize_instance(inst)
        assert serialize_instance(parse_instance(text)) == text

    def test_offsets_round_trip(self):
        inst = MinCkpInstance(c=[1], p=[1], q=[1], capacity=2, base_p=Fraction(1, 3), base_q=2)
        assert parse_instance(serialize_instance(inst)) == inst

    @pytest.mark.parametrize("text", ['{"kind": "x"}', "[1]", '{"kind": "minckp", "c": [1]}',
                                      "not json", '{"kind": "minckp", "c": [], "p": [], "q": [],'
                                      ' "capacity": 1}'])
    def test_invalid(self, text):
        with pytest.raises(InvalidInput):
            parse_instance(text)
