"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for domain or
precondition failures, 3 for size guards.
"""


class GkBoundError(Exception):
    exit_code = 1


class DomainError(GkBoundError, ValueError):
    exit_code = 2


class NormalizationDegenerate(DomainError):
    pass


class NotInvertibleAtZero(DomainError):
    pass


class ArityError(DomainError):
    pass


class ParityError(DomainError):
    pass


class DivergentAtBoundary(DomainError):
    pass


class ParameterPole(DomainError):
    pass


class DimensionMismatch(DomainError):
    pass


class ShapeMismatch(DomainError):
    pass


class SignConditionUnverified(DomainError):
    pass


class NoRootInRange(DomainError):
    pass


class BoundaryRho(DomainError):
    pass


class SizeGuard(GkBoundError):
    exit_code = 3
