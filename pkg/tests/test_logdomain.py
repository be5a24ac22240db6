from __future__ import annotations

import math
import warnings

import mpmath as mp
import numpy as np
import pytest

from resolvent_lab.errors import BOrderViolation, CancellationWarning
from resolvent_lab.logdomain import (
    LogMagnitude,
    condition_of_sub,
    cumlogsumexp,
    log_add,
    log_diff_array,
    log_sub,
    log_sub_checked,
    log_sum_series,
    logsumexp,
    revcumlogsumexp,
)

mp.mp.dps = 60
L = LogMagnitude
ZERO = LogMagnitude.zero()


def mp_log_add(a, b):
    return float(mp.log(mp.exp(mp.mpf(a)) + mp.exp(mp.mpf(b))))


def mp_log_sub(a, b):
    return float(mp.log(mp.exp(mp.mpf(a)) - mp.exp(mp.mpf(b))))


class TestLogAdd:
    def test_identity(self):
        assert log_add(L(0.0), ZERO).ln_value == 0.0
        assert log_add(ZERO, L(3.0)).ln_value == 3.0

    def test_doubling(self):
        assert log_add(L(math.log(2)), L(math.log(2))).ln_value == pytest.approx(math.log(4), abs=1e-15)

    def test_large_gap(self):
        assert abs(log_add(L(100.0), L(0.0)).ln_value - mp_log_add(100, 0)) <= 1e-15 * 100

    @pytest.mark.parametrize("a,b", [(0.3, -2.0), (750.0, 749.0), (-800.0, -801.5), (1e5, 1e5 - 30)])
    def test_against_mpmath(self, a, b):
        assert log_add(L(a), L(b)).ln_value == pytest.approx(mp_log_add(a, b), rel=1e-15, abs=1e-15)

    def test_associative(self):
        a, b, c = L(1.3), L(-4.0), L(2.2)
        assert log_add(log_add(a, b), c).ln_value == pytest.approx(log_add(a, log_add(b, c)).ln_value, abs=1e-15)

    def test_operator_alias(self):
        assert (L(1.0) + L(2.0)).ln_value == log_add(L(1.0), L(2.0)).ln_value


class TestLogSub:
    def test_exact_cancellation(self):
        assert log_sub(L(math.log(4)), L(math.log(4))).is_zero

    def test_small_integers(self):
        assert log_sub(L(math.log(5)), L(0.0)).ln_value == pytest.approx(math.log(4), abs=1e-15)

    def test_gap_ten(self):
        v = log_sub(L(100.0), L(90.0)).ln_value
        assert v == pytest.approx(99.99995460, abs=5e-9)
        assert v == pytest.approx(mp_log_sub(100, 90), rel=1e-15)

    def test_zero_subtrahend(self):
        assert log_sub(L(2.0), ZERO).ln_value == 2.0

    def test_order_violation(self):
        with pytest.raises(BOrderViolation):
            log_sub(L(1.0), L(2.0))

    def test_cancellation_warning(self):
        a = L(10.0)
        b = L(10.0 - 1e-14)
        with pytest.warns(CancellationWarning):
            log_sub(a, b)
        _, flag = log_sub_checked(a, b)
        assert flag

    def test_no_warning_when_separated(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            log_sub(L(3.0), L(1.0))

    def test_inverse_of_add(self):
        a, b = L(5.5), L(2.0)
        assert log_sub(log_add(a, b), b).ln_value == pytest.approx(a.ln_value, abs=1e-14)

    def test_condition(self):
        assert condition_of_sub(L(1.0), ZERO) == 1.0
        assert condition_of_sub(L(1.0), L(1.0)) == math.inf
        assert condition_of_sub(L(math.log(2)), L(0.0)) == pytest.approx(2.0)


class TestSeries:
    def test_empty(self):
        s, err = log_sum_series([], ZERO)
        assert s.is_zero and err.is_zero

    def test_small(self):
        s, err = log_sum_series([L(0.0), L(math.log(2)), L(math.log(3))], ZERO)
        assert s.ln_value == pytest.approx(math.log(6), abs=1e-15)
        assert err.is_zero

    def test_exponential(self):
        terms = [L(-math.lgamma(n + 1)) for n in range(31)]
        # geometric bound on sum_{n>30} 1/n!
        tail = L(-math.lgamma(32) - math.log1p(-1 / 32))
        s, err = log_sum_series(terms, tail)
        assert s.ln_value == pytest.approx(1.0, abs=1e-15)
        assert err.to_real() < 1e-30

    def test_logsumexp_matches_mpmath(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(-700, 700, 50)
        ref = float(mp.log(mp.fsum(mp.exp(mp.mpf(v)) for v in x)))
        assert logsumexp(x) == pytest.approx(ref, rel=1e-14)
        assert logsumexp([]) == -math.inf

    def test_cumulative(self):
        x = np.log(np.arange(1.0, 6.0))
        assert np.allclose(np.exp(cumlogsumexp(x)), np.cumsum(np.arange(1.0, 6.0)))
        assert np.allclose(np.exp(revcumlogsumexp(x)), np.cumsum(np.arange(5.0, 0, -1))[::-1])

    def test_diff_array(self):
        ln, sign = log_diff_array(np.log([3.0, 1.0, 2.0]), np.log([1.0, 3.0, 2.0]))
        assert np.allclose(np.exp(ln[:2]), [2.0, 2.0])
        assert list(sign) == [1, -1, 0]


class TestMagnitude:
    def test_arithmetic(self):
        a, b = L.from_real(6.0), L.from_real(3.0)
        assert (a * b).to_real() == pytest.approx(18.0)
        assert (a / b).to_real() == pytest.approx(2.0)
        assert (b ** 2).to_real() == pytest.approx(9.0)
        assert (ZERO * a).is_zero

    def test_ordering(self):
        assert ZERO < L(-1e300) < L(0.0) <= L(0.0)

    def test_from_real_zero(self):
        assert L.from_real(0.0).is_zero

    def test_monotone(self):
        xs = np.linspace(-5, 5, 11)
        vals = [log_add(L(x), L(1.0)).ln_value for x in xs]
        assert all(b > a for a, b in zip(vals, vals[1:]))
