"""Exception hierarchy.

Three families map onto CLI exit codes: invalid input (3), infeasibility (2)
and internal-invariant breaches (4).
"""


class SosschedError(Exception):
    exit_code = 1


class InvalidInput(SosschedError, ValueError):
    exit_code = 3


class DimensionMismatch(InvalidInput):
    pass


class NegativePQ(InvalidInput):
    pass


class PositiveOffDiagonal(InvalidInput):
    pass


class EmptyInstance(InvalidInput):
    pass


class NonPositiveDelta(InvalidInput):
    pass


class EpsilonOutOfRange(InvalidInput):
    pass


class InvalidTarget(InvalidInput):
    pass


class BadConfig(InvalidInput):
    pass


class TooLarge(InvalidInput):
    pass


class ValueMismatch(InvalidInput):
    pass


class Infeasible(SosschedError):
    exit_code = 2


class InfeasibleSolution(Infeasible):
    def __init__(self, message, slack=None):
        super().__init__(message)
        self.slack = slack


class InfeasibleInput(InvalidInput):
    pass


# the next three are handled inside the solvers; reaching the CLI is a breach


class CollinearPQ(SosschedError):
    """Raised when the free p, q vectors are linearly dependent."""

    exit_code = 4


class Singular(SosschedError, ArithmeticError):
    exit_code = 4


class LPInfeasible(Infeasible):
    pass


class LPUnbounded(SosschedError):
    exit_code = 4


class InvariantBreach(SosschedError, AssertionError):
    exit_code = 4


class NoCaseApplies(InvariantBreach):
    pass


class TooManyFractional(InvariantBreach):
    pass


class DigestMismatch(ValueMismatch):
    """The solution file's integrity digest does not match its content."""
