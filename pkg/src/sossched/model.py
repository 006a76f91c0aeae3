"""Instances, solution vectors, preprocessing, exact evaluation and JSON I/O.

All data are stored as tuples of :class:`fractions.Fraction`.  Floats are
rejected on input; every objective and constraint evaluation is exact.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import (
    DimensionMismatch,
    EmptyInstance,
    Infeasible,
    InvalidInput,
    NegativePQ,
    PositiveOffDiagonal,
)

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def to_rational(value) -> Fraction:
    """Convert an int, Fraction or ``"num/den"`` string to a Fraction."""
    if isinstance(value, bool):
        raise InvalidInput(f"boolean is not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.match(text):
            raise InvalidInput(f"malformed rational {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise InvalidInput(f"zero denominator in {value!r}") from None
    raise InvalidInput(f"expected int, Fraction or 'num/den' string, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def rational_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_rational(v) for v in values)


def bit_size(value: Fraction) -> int:
    """Bits of numerator plus bits of denominator in canonical form."""
    return max(1, abs(value.numerator).bit_length()) + value.denominator.bit_length()


def _vec(x) -> tuple:
    if isinstance(x, (FractionalVector, BinaryVector)):
        return x.x
    return tuple(x)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), ZERO)


# ---------------------------------------------------------------------------
# solution vectors


@dataclass(frozen=True)
class FractionalVector:
    """A point of [0,1]^n with the additive slack it was computed for."""

    x: tuple[Fraction, ...]
    delta: Fraction | None = None
    algorithm: str = ""
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        xs = rational_vector(self.x)
        for v in xs:
            if v < 0 or v > 1:
                raise InvalidInput(f"coordinate {v} outside [0,1]")
        object.__setattr__(self, "x", xs)

    def __len__(self):
        return len(self.x)

    def fractional_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.x) if 0 < v < 1]


@dataclass(frozen=True)
class BinaryVector:
    x: tuple[int, ...]

    def __post_init__(self):
        xs = tuple(int(v) for v in self.x)
        if any(v not in (0, 1) for v in xs):
            raise InvalidInput("binary vector entries must be 0 or 1")
        object.__setattr__(self, "x", xs)

    def __len__(self):
        return len(self.x)

    def support(self) -> list[int]:
        return [i for i, v in enumerate(self.x) if v]


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class MinCkpInstance:
    """min c.x  s.t. (base_p + p.x)^2 + (base_q + q.x)^2 >= capacity, x binary.

    ``base_p``/``base_q`` carry the contribution of items fixed to one during
    preprocessing; raw instances have them at zero.
    """

    c: tuple[Fraction, ...]
    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]
    capacity: Fraction
    base_p: Fraction = ZERO
    base_q: Fraction = ZERO
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("c", "p", "q"):
            object.__setattr__(self, name, rational_vector(getattr(self, name)))
        for name in ("capacity", "base_p", "base_q"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        if not (len(self.c) == len(self.p) == len(self.q)):
            raise DimensionMismatch(
                f"c, p, q lengths differ: {len(self.c)}, {len(self.p)}, {len(self.q)}")

    @property
    def n(self) -> int:
        return len(self.c)

    @cached_property
    def collinear(self) -> bool:
        """True when every 2x2 minor p_j q_k - p_k q_j vanishes."""
        return vectors_collinear(self.p, self.q, range(self.n))

    @cached_property
    def bit_length(self) -> int:
        total = sum(bit_size(v) for v in self.c + self.p + self.q)
        total += bit_size(self.capacity)
        if self.base_p or self.base_q:
            total += bit_size(self.base_p) + bit_size(self.base_q)
        return total

    def constraint_value(self, x) -> Fraction:
        return eval_minckp_constraint(self, x)

    def cost(self, x) -> Fraction:
        return eval_minckp_cost(self, x)


def vectors_collinear(p, q, indices) -> bool:
    ref = None
    for i in indices:
        if p[i] or q[i]:
            if ref is None:
                ref = (p[i], q[i])
            elif ref[0] * q[i] != ref[1] * p[i]:
                return False
    return True


@dataclass(frozen=True)
class MaxSubInstance:
    """max x.A*x + a.x  s.t. sum_k (p_k.x)^2 <= capacity, x binary.

    ``a_off`` is symmetrised on construction so that the gradient of the
    continuous extension is ``a + 2 a_off x``.
    """

    a: tuple[Fraction, ...]
    a_off: tuple[tuple[Fraction, ...], ...]
    squares: tuple[tuple[Fraction, ...], ...]
    capacity: Fraction
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        a = rational_vector(self.a)
        n = len(a)
        rows = tuple(rational_vector(r) for r in self.a_off)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DimensionMismatch(f"a_off must be {n}x{n}")
        if any(rows[i][i] != 0 for i in range(n)):
            raise InvalidInput("a_off must have a zero diagonal; put diagonal utilities in a")
        sym = tuple(
            tuple((rows[i][j] + rows[j][i]) / 2 for j in range(n)) for i in range(n))
        squares = tuple(rational_vector(s) for s in self.squares)
        if any(len(s) != n for s in squares):
            raise DimensionMismatch("every square vector must have length n")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "a_off", sym)
        object.__setattr__(self, "squares", squares)
        object.__setattr__(self, "capacity", to_rational(self.capacity))

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def K(self) -> int:
        return len(self.squares)

    @cached_property
    def Q(self) -> tuple[tuple[Fraction, ...], ...]:
        n = self.n
        return tuple(
            tuple(sum((s[i] * s[j] for s in self.squares), ZERO) for j in range(n))
            for i in range(n))

    @cached_property
    def q(self) -> tuple[Fraction, ...]:
        return tuple(self.Q[i][i] for i in range(self.n))

    @cached_property
    def Qstar(self) -> tuple[tuple[Fraction, ...], ...]:
        Q = self.Q
        return tuple(
            tuple(ZERO if i == j else Q[i][j] for j in range(self.n)) for i in range(self.n))


# ---------------------------------------------------------------------------
# preprocessing


@dataclass(frozen=True)
class PreprocessReport:
    forced_ones: frozenset = frozenset()
    forced_zeros: frozenset = frozenset()
    kept: tuple[int, ...] = ()
    original_n: int = 0
    forced_cost: Fraction = ZERO

    @property
    def empty(self) -> bool:
        return not self.forced_ones and not self.forced_zeros

    def lift(self, x_reduced) -> tuple:
        """Embed a solution of the reduced instance into the original index space."""
        xs = _vec(x_reduced)
        if len(xs) != len(self.kept):
            raise DimensionMismatch("reduced solution has wrong length")
        full: list = [0] * self.original_n
        for i in self.forced_ones:
            full[i] = 1
        for pos, i in enumerate(self.kept):
            full[i] = xs[pos]
        return tuple(full)


def preprocess_minckp(raw: MinCkpInstance) -> tuple[MinCkpInstance, PreprocessReport]:
    """Fix items with non-positive cost to one and drop them.

    Raises NegativePQ for negative powers and Infeasible when even the full
    vector misses the capacity.
    """
    if any(v < 0 for v in raw.p + raw.q):
        raise NegativePQ("p and q must be non-negative")
    if raw.capacity <= 0:
        raise InvalidInput("capacity must be positive")
    ones = frozenset(i for i in range(raw.n) if raw.c[i] <= 0)
    kept = tuple(i for i in range(raw.n) if i not in ones)
    bp = raw.base_p + sum((raw.p[i] for i in ones), ZERO)
    bq = raw.base_q + sum((raw.q[i] for i in ones), ZERO)
    total_p = bp + sum((raw.p[i] for i in kept), ZERO)
    total_q = bq + sum((raw.q[i] for i in kept), ZERO)
    if total_p ** 2 + total_q ** 2 < raw.capacity:
        raise Infeasible(
            f"even the full vector reaches only {total_p ** 2 + total_q ** 2} < {raw.capacity}")
    if not ones:
        return raw, PreprocessReport(kept=kept, original_n=raw.n)
    reduced = MinCkpInstance(
        c=[raw.c[i] for i in kept], p=[raw.p[i] for i in kept], q=[raw.q[i] for i in kept],
        capacity=raw.capacity, base_p=bp, base_q=bq, meta=raw.meta)
    report = PreprocessReport(
        forced_ones=ones, kept=kept, original_n=raw.n,
        forced_cost=sum((raw.c[i] for i in ones), ZERO))
    return reduced, report


def preprocess_maxsub(raw: MaxSubInstance) -> tuple[MaxSubInstance, PreprocessReport]:
    """Drop items that cannot appear in an optimal feasible solution.

    Those are items with negative utility and items whose own square already
    exceeds the capacity.
    """
    if raw.n == 0:
        raise EmptyInstance("instance has no items")
    for i in range(raw.n):
        for j in range(raw.n):
            if i != j and raw.a_off[i][j] > 0:
                raise PositiveOffDiagonal(f"a_off[{i}][{j}] = {raw.a_off[i][j]} > 0")
    if any(v < 0 for s in raw.squares for v in s):
        raise NegativePQ("square vectors must be non-negative")
    if raw.capacity <= 0:
        raise InvalidInput("capacity must be positive")
    q = raw.q
    zeros = frozenset(i for i in range(raw.n) if raw.a[i] < 0 or q[i] > raw.capacity)
    kept = tuple(i for i in range(raw.n) if i not in zeros)
    if not zeros:
        return raw, PreprocessReport(kept=kept, original_n=raw.n)
    reduced = MaxSubInstance(
        a=[raw.a[i] for i in kept],
        a_off=[[raw.a_off[i][j] for j in kept] for i in kept],
        squares=[[s[i] for i in kept] for s in raw.squares],
        capacity=raw.capacity, meta=raw.meta)
    return reduced, PreprocessReport(forced_zeros=zeros, kept=kept, original_n=raw.n)


# ---------------------------------------------------------------------------
# evaluation


def _check_dim(n, x):
    if len(x) != n:
        raise DimensionMismatch(f"vector of length {len(x)} for instance with n={n}")


def eval_minckp_constraint(inst: MinCkpInstance, x) -> Fraction:
    xs = _vec(x)
    _check_dim(inst.n, xs)
    return (inst.base_p + dot(inst.p, xs)) ** 2 + (inst.base_q + dot(inst.q, xs)) ** 2


def eval_minckp_cost(inst: MinCkpInstance, x) -> Fraction:
    xs = _vec(x)
    _check_dim(inst.n, xs)
    return dot(inst.c, xs)


def quad_form(M, x) -> Fraction:
    n = len(x)
    total = ZERO
    for i in range(n):
        if x[i]:
            row = M[i]
            total += x[i] * sum((row[j] * x[j] for j in range(n) if x[j]), ZERO)
    return total


def eval_f(inst: MaxSubInstance, x) -> Fraction:
    xs = _vec(x)
    _check_dim(inst.n, xs)
    return quad_form(inst.a_off, xs) + dot(inst.a, xs)


def eval_g(inst: MaxSubInstance, x) -> Fraction:
    xs = _vec(x)
    _check_dim(inst.n, xs)
    return quad_form(inst.Qstar, xs) + dot(inst.q, xs)


def eval_qform(inst: MaxSubInstance, x) -> Fraction:
    """x.Q.x computed from the square vectors directly."""
    xs = _vec(x)
    _check_dim(inst.n, xs)
    return sum((dot(s, xs) ** 2 for s in inst.squares), ZERO)


def in_f1(inst: MaxSubInstance, x) -> bool:
    xs = _vec(x)
    return (all(0 <= v <= 1 for v in xs) and eval_qform(inst, xs) <= inst.capacity
            and dot(inst.q, xs) <= inst.capacity)


# ---------------------------------------------------------------------------
# JSON I/O


def instance_to_dict(inst) -> dict:
    fr = format_rational
    if isinstance(inst, MinCkpInstance):
        d: dict[str, Any] = {
            "kind": "minckp",
            "c": [fr(v) for v in inst.c],
            "p": [fr(v) for v in inst.p],
            "q": [fr(v) for v in inst.q],
            "capacity": fr(inst.capacity),
        }
        if inst.base_p or inst.base_q:
            d["base_p"] = fr(inst.base_p)
            d["base_q"] = fr(inst.base_q)
    elif isinstance(inst, MaxSubInstance):
        d = {
            "kind": "maxsub",
            "a": [fr(v) for v in inst.a],
            "a_off": [[fr(v) for v in row] for row in inst.a_off],
            "squares": [[fr(v) for v in s] for s in inst.squares],
            "capacity": fr(inst.capacity),
        }
    else:
        raise TypeError(f"not an instance: {inst!r}")
    if inst.meta:
        d["meta"] = inst.meta
    return d


def instance_from_dict(d: dict):
    if not isinstance(d, dict):
        raise InvalidInput("instance must be a JSON object")
    kind = d.get("kind")
    try:
        if kind == "minckp":
            inst = MinCkpInstance(
                c=d["c"], p=d["p"], q=d["q"], capacity=d["capacity"],
                base_p=d.get("base_p", 0), base_q=d.get("base_q", 0), meta=d.get("meta"))
        elif kind == "maxsub":
            inst = MaxSubInstance(
                a=d["a"], a_off=d["a_off"], squares=d["squares"], capacity=d["capacity"],
                meta=d.get("meta"))
        else:
            raise InvalidInput(f"unknown instance kind {kind!r}")
    except KeyError as exc:
        raise InvalidInput(f"missing field {exc.args[0]!r}") from None
    except TypeError as exc:
        raise InvalidInput(str(exc)) from None
    if inst.n == 0:
        raise EmptyInstance("instance has no items")
    return inst


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def serialize_instance(inst) -> str:
    return dumps(instance_to_dict(inst))


def parse_instance(text: str):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from None
    return instance_from_dict(d)


def load_instance(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidInput(f"{path}: not UTF-8: {exc}") from None
    return parse_instance(text)


def save_instance(inst, path) -> None:
    Path(path).write_text(serialize_instance(inst), encoding="utf-8")


def solution_to_dict(kind: str, x, value, algorithm: str, params: dict | None = None,
                     extra: dict | None = None) -> dict:
    xs = _vec(x)
    if all(isinstance(v, int) for v in xs):
        xout: list = list(xs)
    else:
        xout = [format_rational(v) for v in xs]
    d = {"kind": kind, "x": xout, "value": format_rational(value),
         "algorithm": algorithm, "params": params or {}}
    if extra:
        d.update(extra)
    return d
