"""Exception types shared across the package."""


class DompError(Exception):
    """Base class for all package errors."""


class ParseError(DompError):
    """Instance file is malformed (bad line, wrong counts, non-numeric token)."""


class ValidationError(DompError):
    """Instance data violates an invariant (p out of range, negative cost/weight)."""


class InvalidParams(DompError):
    """Bad arguments to the instance generator."""


class InvalidOpenSet(DompError):
    """Open-site set has the wrong size or references unknown sites."""


class TooLarge(DompError):
    """Enumeration would exceed the configured subset limit."""


class IndexOutOfRange(DompError):
    """Rank threshold or position index outside its valid range."""


class ThresholdOutOfRange(DompError):
    """Integral-candidate violation threshold outside [1, 2)."""


class NotIntegral(DompError):
    """An operation requiring an integral point received a fractional one."""


class NumericalFailure(DompError):
    """LP pivoting broke down and the Bland-rule retry did not recover."""


class SizeGuard(DompError):
    """Full formulation requested beyond the configured size guard."""


class Mismatch(DompError):
    """A solution failed verification against the instance or the optimum."""


class InternalError(DompError):
    """An internal consistency assertion failed; indicates a solver bug."""
