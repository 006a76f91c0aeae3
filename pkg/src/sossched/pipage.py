"""Pair rounding for the submodular quadratic with a split quadratic constraint.

For two fractional coordinates (x_i, x_j) the objective and constraint
restricted to them read

    phi(x_i, x_j) = a_ij x_i x_j + a'_i x_i + a'_j x_j
    psi(x_i, x_j) = q_ij x_i x_j + q'_i x_i + q'_j x_j

with a_ij <= 0 and q_ij, q'_i, q'_j >= 0.  ``round_pair`` moves the pair so
that one coordinate becomes integral while phi does not decrease and psi
does not increase.  Every step is verified in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInput, InvariantBreach, NoCaseApplies
from .model import FractionalVector, MaxSubInstance, eval_f, eval_g

ZERO = Fraction(0)
ONE = Fraction(1)

NON_POS_PHI = "NonPosPhi"
ZERO_A_PRIME_I, ZERO_A_PRIME_J = "ZeroAPrime_i", "ZeroAPrime_j"
ZERO_PHI_PRIME_I, ZERO_PHI_PRIME_J = "ZeroPhiPrime_i", "ZeroPhiPrime_j"
LINEAR_PSI_I, LINEAR_PSI_J = "LinearPsi_i", "LinearPsi_j"
CASE1, CASE2, CASE3, CASE4 = "Case1", "Case2", "Case3", "Case4"
CASE3_CORNER, CASE4_CORNER = "Case3Corner", "Case4Corner"


@dataclass(frozen=True)
class PairCoefficients:
    a_ij: Fraction
    a_i: Fraction
    a_j: Fraction
    q_ij: Fraction
    q_i: Fraction
    q_j: Fraction
    x_i: Fraction
    x_j: Fraction

    def __post_init__(self):
        for name in ("a_ij", "a_i", "a_j", "q_ij", "q_i", "q_j", "x_i", "x_j"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.a_ij > 0:
            raise InvalidInput(f"pair interaction must be non-positive, got {self.a_ij}")
        if self.q_ij < 0 or self.q_i < 0 or self.q_j < 0:
            raise InvalidInput("constraint coefficients must be non-negative")
        if not (0 < self.x_i < 1 and 0 < self.x_j < 1):
            raise InvalidInput("both coordinates must be strictly fractional")

    def phi_at(self, xi, xj) -> Fraction:
        return self.a_ij * xi * xj + self.a_i * xi + self.a_j * xj

    def psi_at(self, xi, xj) -> Fraction:
        return self.q_ij * xi * xj + self.q_i * xi + self.q_j * xj

    @property
    def phi(self) -> Fraction:
        return self.phi_at(self.x_i, self.x_j)

    @property
    def psi(self) -> Fraction:
        return self.psi_at(self.x_i, self.x_j)

    @property
    def dphi_i(self) -> Fraction:
        return self.a_ij * self.x_j + self.a_i

    @property
    def dphi_j(self) -> Fraction:
        return self.a_ij * self.x_i + self.a_j

    @property
    def dpsi_i(self) -> Fraction:
        return self.q_ij * self.x_j + self.q_i

    @property
    def dpsi_j(self) -> Fraction:
        return self.q_ij * self.x_i + self.q_j


@dataclass(frozen=True)
class RoundOutcome:
    x_i: Fraction
    x_j: Fraction
    tag: str


def pair_coefficients(inst: MaxSubInstance, x, i: int, j: int) -> PairCoefficients:
    """Local coefficients of f and g in the coordinates i and j at x."""
    xs = x.x if isinstance(x, FractionalVector) else tuple(x)
    n = inst.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"pair ({i}, {j}) out of range for n={n}")
    if i == j:
        raise InvalidInput("pair needs two distinct coordinates")
    A, Q = inst.a_off, inst.Q
    a_i, a_j = inst.a[i], inst.a[j]
    q_i, q_j = Q[i][i], Q[j][j]
    for l in range(n):
        if l in (i, j) or not xs[l]:
            continue
        a_i += (A[i][l] + A[l][i]) * xs[l]
        a_j += (A[j][l] + A[l][j]) * xs[l]
        q_i += 2 * Q[i][l] * xs[l]
        q_j += 2 * Q[j][l] * xs[l]
    return PairCoefficients(a_ij=A[i][j] + A[j][i], a_i=a_i, a_j=a_j, q_ij=2 * Q[i][j],
                            q_i=q_i, q_j=q_j, x_i=xs[i], x_j=xs[j])


def _choose(pc: PairCoefficients) -> tuple[Fraction, Fraction, str]:
    xi, xj = pc.x_i, pc.x_j
    phi = pc.phi
    di, dj = pc.dphi_i, pc.dphi_j
    if phi <= 0:
        return ZERO, ZERO, NON_POS_PHI
    if pc.a_i <= 0:
        return ZERO, xj, ZERO_A_PRIME_I
    if di <= 0:
        return ZERO, xj, ZERO_PHI_PRIME_I
    if pc.a_j <= 0:
        return xi, ZERO, ZERO_A_PRIME_J
    if dj <= 0:
        return xi, ZERO, ZERO_PHI_PRIME_J
    # phi is linear and increasing in a coordinate that psi ignores
    if pc.q_ij + pc.q_i == 0:
        return ONE, xj, LINEAR_PSI_I
    if pc.q_ij + pc.q_j == 0:
        return xi, ONE, LINEAR_PSI_J
    psi = pc.psi
    si, sj = pc.dpsi_i, pc.dpsi_j
    if phi <= pc.a_j and di * pc.q_j <= pc.a_j * si:
        new_j = ONE if pc.q_j == 0 else min(xj + xi * si / pc.q_j, ONE)
        return ZERO, new_j, CASE1
    if phi <= pc.a_i and dj * pc.q_i <= pc.a_i * sj:
        new_i = ONE if pc.q_i == 0 else min(xi + xj * sj / pc.q_i, ONE)
        return new_i, ZERO, CASE2
    if psi >= pc.q_i and di * (pc.q_j + pc.q_ij) >= (pc.a_j + pc.a_ij) * si:
        slope = pc.a_ij + pc.a_j
        if slope <= 0:
            return ONE, ZERO, CASE3_CORNER
        return ONE, max(xj - (1 - xi) * di / slope, ZERO), CASE3
    if psi >= pc.q_j and dj * (pc.q_i + pc.q_ij) >= (pc.a_i + pc.a_ij) * sj:
        slope = pc.a_ij + pc.a_i
        if slope <= 0:
            return ZERO, ONE, CASE4_CORNER
        return max(xi - (1 - xj) * dj / slope, ZERO), ONE, CASE4
    raise NoCaseApplies(f"no rounding case applies to {pc}")


def round_pair(pc: PairCoefficients) -> RoundOutcome:
    """Round one coordinate of the pair without decreasing phi or increasing psi."""
    new_i, new_j, tag = _choose(pc)
    if not (0 <= new_i <= 1 and 0 <= new_j <= 1):
        raise InvariantBreach(f"{tag} left the box: ({new_i}, {new_j})")
    if new_i not in (0, 1) and new_j not in (0, 1):
        raise InvariantBreach(f"{tag} produced two fractional coordinates")
    if pc.phi_at(new_i, new_j) < pc.phi:
        raise InvariantBreach(f"{tag} decreased phi")
    if pc.psi_at(new_i, new_j) > pc.psi:
        raise InvariantBreach(f"{tag} increased psi")
    return RoundOutcome(new_i, new_j, tag)


@dataclass(frozen=True)
class PipageResult:
    y: FractionalVector
    iterations: int
    tags: tuple[str, ...]


def pipage_all(inst: MaxSubInstance, y, report: bool = False):
    """Round pairs of fractional coordinates until at most one remains."""
    ys = list(y.x if isinstance(y, FractionalVector) else y)
    ys = [Fraction(v) for v in ys]
    f_cur, g_cur = eval_f(inst, ys), eval_g(inst, ys)
    tags = []
    iterations = 0
    while True:
        frac = [k for k, v in enumerate(ys) if 0 < v < 1]
        if len(frac) < 2:
            break
        i, j = frac[0], frac[1]
        out = round_pair(pair_coefficients(inst, ys, i, j))
        ys[i], ys[j] = out.x_i, out.x_j
        iterations += 1
        tags.append(out.tag)
        f_new, g_new = eval_f(inst, ys), eval_g(inst, ys)
        if f_new < f_cur or g_new > g_cur:
            raise InvariantBreach(f"{out.tag} broke monotonicity of f or g")
        if sum(1 for v in ys if 0 < v < 1) >= len(frac):
            raise InvariantBreach("rounding step did not integralise a coordinate")
        if iterations > inst.n:
            raise InvariantBreach("pipage rounding exceeded n iterations")
        f_cur, g_cur = f_new, g_new
    result = FractionalVector(tuple(ys), algorithm="pipage", info={"iterations": iterations})
    if report:
        return PipageResult(result, iterations, tuple(tags))
    return result
