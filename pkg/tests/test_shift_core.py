from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from resolvent_lab.errors import HypothesisViolation, NonComputableSup, SpecParseError
from resolvent_lab.shift_core import (
    PNorm,
    ShiftOperator,
    band,
    beta_product,
    explicit,
    harmonic,
    log_beta_array,
    log_power_norms,
    parse_shift,
    parse_weights,
    power_norm,
    quasinilpotence_report,
    recfact,
)


def exact_window_sup(w, k_range, n):
    return max(math.prod(w(j) for j in range(k, k + n)) for k in k_range)


class TestBeta:
    def test_empty_product(self):
        for w in (harmonic(1), band(2, "steps"), recfact(1.5)):
            assert beta_product(w, 0).ln_value == 0.0

    def test_forward_product(self):
        assert beta_product(harmonic(1), 3).to_real() == pytest.approx(1 / 6, rel=1e-15)

    def test_backward_product(self):
        assert beta_product(harmonic(1), 5, "backward").to_real() == pytest.approx(1 / 720, rel=1e-15)

    def test_against_fractions(self):
        exact = [Fraction(1)]
        for j in range(40):
            exact.append(exact[-1] * Fraction(1, j + 3))
        got = log_beta_array(harmonic(3), 40)
        ref = np.array([-math.log(f.denominator) for f in exact])
        assert np.allclose(got, ref, rtol=1e-14)

    def test_recfact_one_is_harmonic(self):
        assert np.allclose(recfact(1).log_weights(0, 50), harmonic(1).log_weights(0, 50), atol=1e-13)


class TestPowerNorms:
    def test_examples(self):
        f = ShiftOperator("forward", harmonic(1))
        b = ShiftOperator("backward", harmonic(1))
        assert power_norm(f, 1).to_real() == pytest.approx(1.0)
        assert power_norm(f, 3).to_real() == pytest.approx(1 / 6)
        assert power_norm(b, 2).to_real() == pytest.approx(1 / 6)

    @pytest.mark.parametrize("spec", ["harmonic:c=1", "band:m0=2,rule=steps", "recfact:s=2"])
    def test_submultiplicative(self, spec):
        for kind in ("forward", "backward", "bilateral"):
            t = ShiftOperator(kind, parse_weights(spec))
            ln = log_power_norms(t, 30)
            for m in range(1, 15):
                for n in range(1, 15):
                    assert ln[m + n] <= ln[m] + ln[n] + 1e-12

    def test_window_sup_against_brute_force(self):
        # a non-monotone explicit prefix moves the sup away from the first window
        w = explicit([0.2, 0.9, 0.8, 0.1], harmonic(4), claimed_monotone=False)
        t = ShiftOperator("forward", w)
        ln = log_power_norms(t, 6)
        wf = lambda j: w.weight(j)
        for n in range(1, 7):
            assert math.exp(ln[n]) == pytest.approx(exact_window_sup(wf, range(0, 40), n), rel=1e-12)

    def test_quasinilpotence_report(self):
        rep = quasinilpotence_report(ShiftOperator("forward", harmonic(1)), 10)
        n, v = rep.values[-1]
        assert n == 10
        assert v == pytest.approx(-math.lgamma(11) / 10, abs=1e-12)
        assert v == pytest.approx(-1.5104, abs=1e-4)
        assert rep.decreasing

    def test_report_consistent_with_power_norm(self):
        t = ShiftOperator("backward", band(1, "mid"))
        rep = quasinilpotence_report(t, 5)
        assert rep.values[0][1] == pytest.approx(power_norm(t, 1).ln_value)

    def test_undefined_weight_guard(self):
        with pytest.raises(NonComputableSup):
            ShiftOperator("forward", harmonic(0))
        # w_n = 1/n is fine when index 0 is never used
        ShiftOperator("backward", harmonic(0))


class TestEnvelopes:
    @pytest.mark.parametrize("spec", ["harmonic:c=1", "harmonic:c=3.5", "band:m0=1,rule=lower",
                                      "band:m0=2,rule=upper", "band:m0=2,rule=steps", "recfact:s=1.5"])
    def test_envelopes_hold(self, spec):
        w = parse_weights(spec)
        lw = w.log_weights(0, 5000)
        j = np.arange(5000)
        a, j0 = w.upper_envelope
        sel = j >= j0
        assert np.all(lw[sel] <= -np.log(j[sel] - a) + 1e-12)
        if w.lower_envelope is None:
            # weights decaying faster than 1/j admit no such envelope
            assert spec.startswith("recfact") and w.params["s"] > 1
            return
        b, j1 = w.lower_envelope
        sel = j >= j1
        assert np.all(lw[sel] >= -np.log(j[sel] + b) - 1e-12)

    @pytest.mark.parametrize("rule", ["lower", "upper", "mid", "steps"])
    @pytest.mark.parametrize("m0", [1, 2, 3])
    def test_band_hypothesis(self, rule, m0):
        w = band(m0, rule)
        n = np.arange(1, 3000)
        lw = w.log_weights(0, 3000 + m0)[n + m0]
        assert np.all(lw >= -np.log(n + 2 * m0) - 1e-12)
        assert np.all(lw <= -np.log(n) + 1e-12)
        assert np.all(np.diff(w.log_weights(0, 3000)) <= 1e-15)
        assert w.band_m0 == m0


class TestParsing:
    def test_roundtrip(self):
        for text in ["harmonic:c=2", "band:m0=2,rule=steps", "recfact:s=1.5"]:
            assert parse_weights(text).spec() == text

    def test_shift(self):
        t = parse_shift("backward:harmonic:c=1", 1)
        assert t.kind == "backward" and t.p.p == 1.0
        assert parse_shift("bilateral:band:m0=1,rule=mid").kind == "bilateral"

    @pytest.mark.parametrize("bad", ["nonsense", "band:m0=1,rule=bogus", "recfact:s=0", "harmonic:c=x",
                                     "explicit:[1,0.5]"])
    def test_bad_weights(self, bad):
        with pytest.raises(SpecParseError):
            parse_weights(bad)

    def test_bad_kind(self):
        with pytest.raises(SpecParseError):
            parse_shift("sideways:harmonic:c=1")

    def test_explicit(self):
        w = parse_weights("explicit:[1,0.5];tail=harmonic:c=2")
        assert w.weight(0) == 1.0 and w.weight(1) == 0.5
        assert w.weight(5) == pytest.approx(1 / 7)

    def test_bilateral_needs_monotone(self):
        w = explicit([0.2, 0.9], harmonic(4), claimed_monotone=False)
        with pytest.raises(HypothesisViolation):
            ShiftOperator("bilateral", w)
        with pytest.raises(HypothesisViolation):
            explicit([0.2, 0.9], harmonic(4), claimed_monotone=True)

    def test_pnorm(self):
        assert PNorm(1.0).q == math.inf
        assert PNorm(2.0).q == 2.0
        assert PNorm(3.0).q == pytest.approx(1.5)
        with pytest.raises(ValueError):
            PNorm(0.5)
