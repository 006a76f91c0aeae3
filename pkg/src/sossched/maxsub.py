"""End-to-end approximation for the submodular quadratic under a quadratic capacity.

Pipeline: relaxation point x_frac in F1, scaling by phi~ into F2, pair
rounding, dropping the last fractional coordinate, and comparison with the
best singleton.  Every link of the value chain is stored in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import EpsilonOutOfRange, InfeasibleInput, InvariantBreach
from .fw import default_steps, frank_wolfe
from .model import (
    BinaryVector,
    FractionalVector,
    MaxSubInstance,
    eval_f,
    eval_g,
    eval_qform,
    in_f1,
    preprocess_maxsub,
    to_rational,
)
from .pipage import pipage_all

ZERO = Fraction(0)
ONE = Fraction(1)
DEFAULT_PHI_BITS = 66


@dataclass(frozen=True)
class PhiConstant:
    value: Fraction
    bits: int

    @property
    def square(self) -> Fraction:
        return self.value * self.value


def phi_rational(bits: int = DEFAULT_PHI_BITS) -> PhiConstant:
    """Largest m / 2^bits with t^2 + t <= 1, i.e. the reverse golden ratio from below."""
    if bits < 2:
        raise ValueError("bits must be at least 2")
    one = 1 << bits
    m = (math.isqrt(5 * one * one) - one) // 2

    def ok(k):
        return k * k + k * one <= one * one

    while not ok(m):
        m -= 1
    while ok(m + 1):
        m += 1
    value = Fraction(m, one)
    if value * value + value > 1:
        raise InvariantBreach("phi approximation violates t^2 + t <= 1")
    return PhiConstant(value, bits)


def scale_to_f2(inst: MaxSubInstance, x, phi: PhiConstant) -> FractionalVector:
    """Return phi~ * x, which satisfies x.Q*.x + q.x <= C whenever x is in F1."""
    xs = x.x if isinstance(x, FractionalVector) else tuple(Fraction(v) for v in x)
    if not in_f1(inst, xs):
        raise InfeasibleInput("point is not feasible for the relaxation F1")
    ys = tuple(phi.value * v for v in xs)
    if eval_g(inst, ys) > inst.capacity:
        raise InvariantBreach("scaled point violates the split constraint")
    if all(a >= 0 for a in inst.a) and eval_f(inst, ys) < phi.square * eval_f(inst, xs):
        raise InvariantBreach("scaling lost more than a phi^2 factor")
    return FractionalVector(ys, algorithm="scale_to_f2", info={"phi": str(phi.value)})


@dataclass
class MaxSubReport:
    relaxation: str
    K: int | None
    phi: Fraction
    f_frac: Fraction = ZERO
    f_scaled: Fraction = ZERO
    f_pipage: Fraction = ZERO
    f_dropped: Fraction = ZERO
    f_singleton: Fraction = ZERO
    singleton: int | None = None
    value: Fraction = ZERO
    winner: str = ""
    pipage_iterations: int = 0
    forced_zeros: tuple = ()
    x_frac: tuple = ()
    extra: dict = field(default_factory=dict)

    def chain(self) -> dict:
        return {k: str(getattr(self, k)) for k in
                ("f_frac", "f_scaled", "f_pipage", "f_dropped", "f_singleton", "value")}


def fw_relaxation(eps, K_override=None, tol=None) -> Callable:
    def run(inst: MaxSubInstance):
        K = K_override if K_override is not None else default_steps(inst.n, eps)
        x, _ = frank_wolfe(inst, K, tol=tol, keep_iterates=False)
        return x, K
    run.name = "frank_wolfe"
    return run


def solve_maxsub(inst: MaxSubInstance, eps=Fraction(1, 4), K_override: int | None = None,
                 relaxation: Callable | None = None,
                 phi_bits: int = DEFAULT_PHI_BITS) -> tuple[BinaryVector, MaxSubReport]:
    """Approximate MaxSUB; the output is exactly feasible.

    ``relaxation`` maps the preprocessed instance to (x_frac, K) with x_frac in
    F1; by default it is the Frank-Wolfe greedy with K = ceil(n^2 / eps).
    """
    eps = to_rational(eps)
    if not 0 < eps <= 1:
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1], got {eps}")
    reduced, pre = preprocess_maxsub(inst)
    phi = phi_rational(phi_bits)
    if relaxation is None:
        relaxation = fw_relaxation(eps, K_override)
    report = MaxSubReport(relaxation=getattr(relaxation, "name", "custom"), K=None,
                          phi=phi.value, forced_zeros=tuple(sorted(pre.forced_zeros)))
    n = reduced.n
    if n == 0:
        report.winner = "empty"
        return BinaryVector(pre.lift(())), report

    x_frac, K = relaxation(reduced)
    xs = x_frac.x if isinstance(x_frac, FractionalVector) else tuple(x_frac)
    report.K = K
    report.x_frac = xs
    report.f_frac = eval_f(reduced, xs)
    y = scale_to_f2(reduced, xs, phi)
    report.f_scaled = eval_f(reduced, y.x)
    rounded = pipage_all(reduced, y, report=True)
    yp = rounded.y.x
    report.pipage_iterations = rounded.iterations
    report.f_pipage = eval_f(reduced, yp)
    ybar = tuple(1 if v == 1 else 0 for v in yp)
    report.f_dropped = eval_f(reduced, ybar)

    star = max(range(n), key=lambda i: (reduced.a[i], -i))
    single = tuple(1 if i == star else 0 for i in range(n))
    report.singleton = pre.kept[star]
    single_ok = eval_qform(reduced, single) <= reduced.capacity
    report.f_singleton = eval_f(reduced, single) if single_ok else ZERO

    if single_ok and report.f_singleton > report.f_dropped:
        out, report.winner = single, "singleton"
    else:
        out, report.winner = ybar, "rounded"
    report.value = eval_f(reduced, out)

    if eval_qform(reduced, out) > reduced.capacity:
        raise InvariantBreach("rounded output violates the capacity")
    if report.value < phi.square / 2 * report.f_frac:
        raise InvariantBreach("output value below the phi^2/2 chain bound")
    if single_ok and report.value < report.f_singleton:
        raise InvariantBreach("output worse than the best singleton")
    return BinaryVector(pre.lift(out)), report
