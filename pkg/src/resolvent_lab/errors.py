"""Exception and warning types shared across the package."""


class ResolventLabError(Exception):
    """Base class for all package errors."""

    code = "error"


class BOrderViolation(ResolventLabError, ValueError):
    """Log-domain subtraction with a subtrahend larger than the minuend."""

    code = "b_order_violation"


class CancellationWarning(UserWarning):
    """A log-domain subtraction lost most of its significant digits."""


class NonComputableSup(ResolventLabError):
    """A window-product supremum cannot be certified for these weights."""

    code = "non_computable_sup"


class TruncationBudgetExceeded(ResolventLabError):
    """A series needed more terms than the configured cap allows."""

    code = "truncation_budget_exceeded"


class NotSummable(ResolventLabError):
    """A vector or series could not be shown to be p-summable."""

    code = "not_summable"


class OverflowRisk(ResolventLabError):
    """Plain floating point evaluation would overflow."""

    code = "overflow_risk"


class RadiusTooLarge(ResolventLabError):
    """Logarithms in an exponent ratio are not positive at this radius."""

    code = "radius_too_large"


class UnknownScenario(ResolventLabError, KeyError):
    code = "unknown_scenario"


class SpecParseError(ResolventLabError, ValueError):
    """A weight, shift or vector spec string could not be parsed."""

    code = "spec_parse_error"


class HypothesisViolation(ResolventLabError):
    """Inputs violate the hypotheses an operation depends on."""

    code = "hypothesis_violation"
