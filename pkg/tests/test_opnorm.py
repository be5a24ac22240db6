from __future__ import annotations

import math

import numpy as np
import pytest

from resolvent_lab.errors import HypothesisViolation
from resolvent_lab.opnorm import (
    RANK_ONE_PROBE,
    bilateral_enclosure,
    default_probes,
    enclosure,
    opnorm_lower,
    opnorm_upper,
)
from resolvent_lab.resolvent import closed_form_f0, dense_truncated_resolvent, resolvent_apply
from resolvent_lab.shift_core import ShiftOperator, harmonic, parse_weights
from resolvent_lab.vectors import basis, stack, vector_norm_bounds, xr_family, zero

FWD = ShiftOperator("forward", harmonic(1), 2)
BWD = ShiftOperator("backward", harmonic(1), 2)
BIL = ShiftOperator("bilateral", harmonic(1), 2)


def dense_opnorm(t, z, N, p=2):
    """Norm of the ``(N+1)``-dimensional truncated resolvent matrix (``p`` in {1, 2})."""
    cols = np.column_stack([dense_truncated_resolvent(t, N, z, basis(n)) for n in range(N + 1)])
    return math.log(np.linalg.norm(cols, ord=p))


class TestUpper:
    def test_exponential(self):
        # ||T^k|| = 1/(k+1)! for the backward shift, so sum_k 100^{k+1}/(k+1)! = e^100 - 1
        v = opnorm_upper(BWD, 0.01).ln_value
        assert v == pytest.approx(100.0, rel=1e-13)

    def test_l1_identity(self):
        for z in (0.01, 0.3, 2.0):
            up = opnorm_upper(FWD, z, p=1)
            assert up.ln_value == resolvent_apply(FWD.with_p(1), basis(0), z).norm.ln_value

    def test_large_z(self):
        for t in (FWD, BWD, BIL):
            assert opnorm_upper(t, 1e6).to_real() == pytest.approx(1e-6, rel=1e-5)

    @pytest.mark.parametrize("t", [FWD, BWD])
    def test_dominates_dense(self, t):
        # finite sections of the resolvent have norm at most the full one
        for z in (0.3, 0.8):
            assert dense_opnorm(t, z, 80) <= opnorm_upper(t, z).ln_value + 1e-12

    @pytest.mark.parametrize("z", [0.3, 0.8, 2.5])
    def test_bilateral_dominates_dense(self, z):
        N = 60
        cols = []
        for x in [stack(basis(n), zero()) for n in range(N + 1)] + [stack(zero(), basis(i)) for i in range(1, N + 1)]:
            top, bottom = dense_truncated_resolvent(BIL, N, z, x)
            cols.append(np.concatenate((top, bottom)))
        dense = math.log(np.linalg.norm(np.column_stack(cols), ord=2))
        enc = bilateral_enclosure(BIL, z, 2)
        assert enc.lower.ln_value <= dense + 1e-10
        assert dense <= enc.upper.ln_value + 1e-12

    def test_invalid_z(self):
        with pytest.raises(ValueError):
            opnorm_upper(FWD, 0.0)


class TestLower:
    def test_l1_equals_upper(self):
        t = FWD.with_p(1)
        for z in (0.01, 0.5):
            lo, label = opnorm_lower(t, z, 1, [basis(0)])
            assert lo.ln_value == opnorm_upper(t, z, p=1).ln_value
            assert label == str(basis(0))

    def test_basis_probe_is_vacuous(self):
        lo, _ = opnorm_lower(BWD, 0.01, 2, [basis(5)])
        assert lo.ln_value == pytest.approx(6 * math.log(100) - math.lgamma(7), abs=1e-3)
        assert lo.ln_value < 0.3 * opnorm_upper(BWD, 0.01).ln_value

    def test_xr_probe(self):
        x = xr_family(1, 3)
        lo, _ = opnorm_lower(BWD.with_p(1), 0.01, 1, [x])
        _, x_hi = vector_norm_bounds(x, BWD.weights, 1)
        assert lo.ln_value >= closed_form_f0(1, 3, 0.01).ln_value - x_hi - 1e-12
        assert closed_form_f0(1, 3, 0.01).ln_value == pytest.approx(90.79, abs=0.01)

    def test_default_probes(self):
        assert default_probes(FWD) == [basis(0)]
        b = default_probes(BWD, 2)
        assert b[0] == basis(0) and all(x.family == "xr" for x in b[1:])
        assert default_probes(BIL)[0] == RANK_ONE_PROBE

    def test_bilateral_rejects_unstacked(self):
        with pytest.raises(HypothesisViolation):
            opnorm_lower(BIL, 0.1, 2, [basis(0)])

    def test_needs_probes(self):
        with pytest.raises(ValueError):
            opnorm_lower(FWD, 0.1, 2, [])


class TestEnclosure:
    @pytest.mark.parametrize("kind", ["forward", "backward", "bilateral"])
    @pytest.mark.parametrize("spec", ["harmonic:c=1", "band:m0=2,rule=steps", "recfact:s=1"])
    def test_ordering(self, kind, spec):
        t = ShiftOperator(kind, parse_weights(spec), 2)
        for z in (0.1 * 0.5 ** k for k in range(8)):
            enc = enclosure(t, z)
            assert enc.lower <= enc.upper
            assert enc.width >= 0

    def test_tightness_increases(self):
        vals = [enclosure(BWD, z).tightness for z in 0.1 * 0.5 ** np.arange(8)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] >= 0.95

    def test_za2(self):
        z = 1e-3
        enc = bilateral_enclosure(BIL, z, 2)
        ae1 = resolvent_apply(BIL.block_a(), basis(0), z).norm.ln_value
        ratio = enc.upper.ln_value / (2 * ae1)
        assert 0.95 <= ratio <= 1.05
        assert 0.97 <= enc.tightness <= 1.0

    def test_self_dual_factors(self):
        # for p = 2 the two rank-one factors are the same l^2 norm
        from resolvent_lab.opnorm import _rank_one
        from resolvent_lab.resolvent import DEFAULT_POLICY

        u, g = _rank_one(BIL, 0.05, 2.0, DEFAULT_POLICY)
        assert u.norm.ln_value == pytest.approx(g.norm.ln_value, rel=1e-14)

    def test_bilateral_large_z(self):
        enc = bilateral_enclosure(BIL, 50.0, 2)
        assert enc.lower <= enc.upper
        assert enc.upper.to_real() == pytest.approx(1 / 50, rel=0.05)

    def test_bilateral_needs_bilateral(self):
        with pytest.raises(HypothesisViolation):
            bilateral_enclosure(FWD, 0.1)
