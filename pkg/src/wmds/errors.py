"""Exception types shared across the package."""


class WmdsError(Exception):
    """Base class for all library errors."""


class RankMismatch(WmdsError):
    """Operands live over rings with different numbers of variables."""


class NotDivisible(WmdsError):
    """An exact division left a nonzero remainder."""


class PolarAtZero(WmdsError):
    """A partial evaluation at 0 hit a negative exponent."""


class OddIntegerCoefficient(WmdsError):
    """A parity split required halving a numerator with odd coefficients."""


class UnsupportedType(WmdsError):
    """Requested Dynkin family/rank outside the supported simply-laced list."""


class GroupTooLarge(WmdsError):
    """The Weyl group order exceeds the configured enumeration cap."""


class NotUniquelyDetermined(WmdsError):
    """The relation-only solver could not pin down every coefficient."""


class InvalidModulus(WmdsError):
    """A quadratic-symbol denominator was even or non-positive."""
