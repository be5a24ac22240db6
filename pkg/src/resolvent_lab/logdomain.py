"""Arithmetic on nonnegative reals stored as natural logarithms.

Resolvent norms at radius ``r`` grow like ``exp(1/r)``; at ``r = 1e-3`` they
are far outside the float range, while their logarithms are ordinary numbers.
Everything in this package that can overflow is carried as a
:class:`LogMagnitude` (scalars) or as a float array of logs (``-inf`` is 0).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import BOrderViolation, CancellationWarning

__all__ = [
    "LogMagnitude",
    "log_add",
    "log_sub",
    "log_sub_checked",
    "condition_of_sub",
    "log_sum_series",
    "logsumexp",
    "cumlogsumexp",
    "revcumlogsumexp",
    "log_diff_array",
    "CANCELLATION_GAP",
]

NEG_INF = -math.inf

#: ``log_sub`` flags results whose operands differ by less than this in log.
CANCELLATION_GAP = 1e-12


@dataclass(frozen=True, order=False)
class LogMagnitude:
    """A nonnegative real ``exp(ln_value)``; ``ln_value = -inf`` encodes 0."""

    ln_value: float

    def __post_init__(self):
        if math.isnan(self.ln_value) or self.ln_value == math.inf:
            raise ValueError(f"invalid log magnitude {self.ln_value!r}")

    @classmethod
    def zero(cls) -> "LogMagnitude":
        return cls(NEG_INF)

    @classmethod
    def one(cls) -> "LogMagnitude":
        return cls(0.0)

    @classmethod
    def from_real(cls, x: float) -> "LogMagnitude":
        if x < 0:
            raise ValueError("LogMagnitude holds nonnegative values only")
        return cls(math.log(x)) if x > 0 else cls.zero()

    @property
    def is_zero(self) -> bool:
        return self.ln_value == NEG_INF

    def to_real(self) -> float:
        """Plain float value; overflows to ``inf`` past ~1.8e308."""
        if self.is_zero:
            return 0.0
        try:
            return math.exp(self.ln_value)
        except OverflowError:
            return math.inf

    def __mul__(self, other: "LogMagnitude") -> "LogMagnitude":
        return LogMagnitude(_ln_prod(self.ln_value, other.ln_value))

    def __truediv__(self, other: "LogMagnitude") -> "LogMagnitude":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogMagnitude")
        return LogMagnitude(_ln_prod(self.ln_value, -other.ln_value))

    def __pow__(self, k: float) -> "LogMagnitude":
        if self.is_zero:
            return self if k > 0 else LogMagnitude.one()
        return LogMagnitude(self.ln_value * k)

    def __add__(self, other: "LogMagnitude") -> "LogMagnitude":
        return log_add(self, other)

    def __lt__(self, other: "LogMagnitude") -> bool:
        return self.ln_value < other.ln_value

    def __le__(self, other: "LogMagnitude") -> bool:
        return self.ln_value <= other.ln_value

    def __gt__(self, other: "LogMagnitude") -> bool:
        return self.ln_value > other.ln_value

    def __ge__(self, other: "LogMagnitude") -> bool:
        return self.ln_value >= other.ln_value

    def __repr__(self) -> str:
        return "LogMagnitude(0)" if self.is_zero else f"LogMagnitude(ln={self.ln_value!r})"


def _ln_prod(a: float, b: float) -> float:
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def log_add(a: LogMagnitude, b: LogMagnitude) -> LogMagnitude:
    """``ln(e^a + e^b)`` as ``max + log1p(exp(min - max))``."""
    hi, lo = (a.ln_value, b.ln_value) if a.ln_value >= b.ln_value else (b.ln_value, a.ln_value)
    if lo == NEG_INF:
        return LogMagnitude(hi)
    return LogMagnitude(hi + math.log1p(math.exp(lo - hi)))


def log_sub(a: LogMagnitude, b: LogMagnitude) -> LogMagnitude:
    """``ln(e^a - e^b)`` for ``a >= b``.

    Emits :class:`CancellationWarning` when the operands are closer than
    :data:`CANCELLATION_GAP` in log, since the result then carries almost no
    correct digits. Use :func:`log_sub_checked` to get the flag as a value.
    """
    result, cancelled = log_sub_checked(a, b)
    if cancelled:
        warnings.warn(
            f"log_sub({a.ln_value!r}, {b.ln_value!r}) lost its significant digits",
            CancellationWarning,
            stacklevel=2,
        )
    return result


def log_sub_checked(a: LogMagnitude, b: LogMagnitude) -> tuple[LogMagnitude, bool]:
    """Same as :func:`log_sub` but returns ``(result, cancelled)``."""
    if b.ln_value > a.ln_value:
        raise BOrderViolation(f"log_sub needs a >= b, got a={a.ln_value!r}, b={b.ln_value!r}")
    if b.is_zero:
        return a, False
    gap = a.ln_value - b.ln_value
    if gap == 0.0:
        return LogMagnitude.zero(), False
    return LogMagnitude(a.ln_value + math.log(-math.expm1(-gap))), gap < CANCELLATION_GAP


def condition_of_sub(a: LogMagnitude, b: LogMagnitude) -> float:
    """Relative error amplification of ``e^a - e^b``, i.e. ``e^a / (e^a - e^b)``."""
    if b.is_zero:
        return 1.0
    gap = a.ln_value - b.ln_value
    if gap <= 0.0:
        return math.inf
    return -1.0 / math.expm1(-gap)


def log_sum_series(
    terms: Iterable[LogMagnitude], tail_bound: LogMagnitude = LogMagnitude(NEG_INF)
) -> tuple[LogMagnitude, LogMagnitude]:
    """Sum nonnegative terms given in log form.

    Returns ``(partial_sum, error_bound)`` where ``error_bound`` is the
    caller-supplied bound on the omitted tail; the true sum lies in
    ``[partial_sum, partial_sum + error_bound]``.
    """
    lns = np.fromiter((t.ln_value for t in terms), dtype=float)
    return LogMagnitude(logsumexp(lns)), tail_bound


def logsumexp(x) -> float:
    """Log of the sum of exponentials of a 1-d array; ``-inf`` for empty input."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return NEG_INF
    m = float(np.max(x))
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(float(np.sum(np.exp(x - m))))


def cumlogsumexp(x: np.ndarray) -> np.ndarray:
    """Running ``ln sum_{j<=i} e^{x_j}``."""
    return np.logaddexp.accumulate(np.asarray(x, dtype=float))


def revcumlogsumexp(x: np.ndarray) -> np.ndarray:
    """Running ``ln sum_{j>=i} e^{x_j}``."""
    x = np.asarray(x, dtype=float)
    return np.logaddexp.accumulate(x[::-1])[::-1]


def log_diff_array(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise ``e^a - e^b`` as ``(ln |diff|, sign)``; sign is 0 for exact ties."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    sign = np.where(a > b, 1.0, np.where(a < b, -1.0, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = hi - lo
        out = np.where(lo == NEG_INF, hi, hi + np.log(-np.expm1(-gap)))
    out = np.where(sign == 0.0, NEG_INF, out)
    return out, sign
