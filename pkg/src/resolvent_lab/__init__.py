"""Resolvent growth exponents ("power sets") of weighted shift operators.

For a quasinilpotent weighted shift ``T`` and a vector ``x`` the exponent

    k_x = limsup_{z -> 0} ln ||(z - T)^{-1} x|| / ln ||(z - T)^{-1}||

is estimated from log-domain series with certified truncation bounds,
operator-norm enclosures and an extrapolation in the radius.
"""

from .errors import (
    BOrderViolation,
    CancellationWarning,
    HypothesisViolation,
    NonComputableSup,
    NotSummable,
    OverflowRisk,
    RadiusTooLarge,
    ResolventLabError,
    SpecParseError,
    TruncationBudgetExceeded,
    UnknownScenario,
)
from .logdomain import LogMagnitude, log_add, log_sub
from .shift_core import (
    PNorm,
    ShiftOperator,
    WeightSequence,
    band,
    explicit,
    harmonic,
    parse_shift,
    parse_weights,
    power_norm,
    quasinilpotence_report,
    recfact,
)
from .vectors import VectorSpec, basis, finite, parse_vector, stack, tail_vector, xr_family, zero
from .resolvent import (
    ResolventEvaluation,
    backward_resolvent_apply,
    bilateral_resolvent_apply,
    closed_form_f0,
    dense_truncated_resolvent,
    forward_resolvent_apply,
    forward_resolvent_basis_norm,
    resolvent_apply,
    tail_vector_f0,
)
from .opnorm import NormEnclosure, bilateral_enclosure, enclosure, opnorm_lower, opnorm_upper
from .powerset import ExponentEstimate, RadiusSchedule, estimate_kx, exponent_ratio, sweep_family
from .scenarios import SCENARIOS, ScenarioReport, run_scenario

__version__ = "0.1.0"
