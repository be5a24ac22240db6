"""Cross-checks between independent evaluation routes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotSummable
from .resolvent import closed_form_f0, dense_truncated_resolvent, f0_series, resolvent_apply
from .shift_core import BACKWARD, BILATERAL, FORWARD, ShiftOperator, parse_weights
from .vectors import VectorSpec, finite, stack, tail_vector, xr_family, zero

__all__ = ["OracleCase", "random_oracle_cases", "oracle_agreement", "closed_form_agreement"]

_WEIGHTS = (
    "harmonic:c=1", "harmonic:c=0.5", "harmonic:c=2", "band:m0=1,rule=steps", "band:m0=2,rule=lower",
    "band:m0=1,rule=upper", "recfact:s=1", "recfact:s=2", "explicit:[0.9,0.6,0.3];tail=harmonic:c=3",
)


@dataclass
class OracleCase:
    shift: str
    vector: str
    z: float
    compared: int = 0
    max_rel_diff: float = math.nan
    passed: bool = False
    details: dict = field(default_factory=dict)


def _random_finite(rng, max_index: int = 8, start: int = 0) -> VectorSpec:
    k = int(rng.integers(1, 4))
    idx = rng.choice(np.arange(start, max_index + 1), size=k, replace=False)
    return finite([(int(i), float(round(rng.uniform(0.1, 2.0), 4))) for i in sorted(idx)])


def _random_unilateral_vector(rng, kind: str) -> VectorSpec:
    if kind == FORWARD:
        return _random_finite(rng)
    pick = int(rng.integers(3))
    if pick == 0:
        return _random_finite(rng)
    if pick == 1:
        return xr_family(float(rng.choice([0.25, 0.5, 0.75, 1.0])), int(rng.integers(2, 7)))
    return tail_vector(int(rng.integers(2, 5)))


def random_oracle_cases(n: int = 20, seed: int = 0) -> list:
    """``n`` random ``(shift, vector, z)`` triples with ``z`` in ``[0.3, 2]``.

    Draws whose vector has no summability certificate are redrawn.
    """
    rng = np.random.default_rng(seed)
    cases = []
    kinds = (FORWARD, BACKWARD, BILATERAL)
    while len(cases) < n:
        kind = kinds[len(cases) % 3]
        wspec = str(rng.choice(_WEIGHTS))
        w = parse_weights(wspec)
        if kind == BILATERAL and not w.claimed_monotone:
            continue
        if kind == BILATERAL:
            top = _random_unilateral_vector(rng, BACKWARD)
            bottom = _random_finite(rng, start=1) if rng.random() < 0.5 else zero()
            x = stack(top, bottom)
        else:
            x = _random_unilateral_vector(rng, kind)
        t = ShiftOperator(kind, w, float(rng.choice([1.0, 2.0, 3.0])))
        z = float(rng.uniform(0.3, 2.0))
        try:
            resolvent_apply(t, x, z)
        except NotSummable:
            continue  # e.g. x_r for weights decaying faster than factorially
        cases.append((t, x, z))
    return cases


def _rel(ln_series: np.ndarray, dense: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        ln_dense = np.log(np.abs(dense))
    both_zero = (ln_series == -np.inf) & (ln_dense == -np.inf)
    with np.errstate(invalid="ignore", over="ignore"):
        d = np.abs(np.expm1(ln_series - ln_dense))
    d = np.where(both_zero, 0.0, d)
    return np.where(np.isnan(d), np.inf, d)


def oracle_agreement(cases=None, n: int = 20, seed: int = 0, rtol: float = 1e-8,
                     size: int = 400, compare: int = 30) -> list:
    """Compare the leading resolvent coefficients from the log-domain series with a dense solve."""
    cases = random_oracle_cases(n, seed) if cases is None else cases
    out = []
    for t, x, z in cases:
        ev = resolvent_apply(t, x, z)
        case = OracleCase(t.spec(), str(x), z)
        if t.kind == BILATERAL:
            top, bottom = dense_truncated_resolvent(t, size, z, x)
            k1 = min(compare, ev.ln_coefficients.size) if ev.ln_coefficients.size else 0
            k2 = min(compare, ev.ln_coefficients_bottom.size)
            d = np.concatenate((_rel(ev.ln_coefficients[:k1], top[:k1]),
                                _rel(ev.ln_coefficients_bottom[:k2], bottom[:k2])))
        else:
            dense = dense_truncated_resolvent(t, size, z, x)
            k = min(compare, ev.ln_coefficients.size)
            d = _rel(ev.ln_coefficients[:k], dense[:k])
        case.compared = int(d.size)
        case.max_rel_diff = float(d.max()) if d.size else 0.0
        case.passed = bool(d.size > 0 and case.max_rel_diff <= rtol)
        out.append(case)
    return out


def closed_form_agreement(rs=(0.25, 0.5, 1.0), ms=(3, 5), zs=(1.0, 0.1, 0.01)) -> list:
    """``(r, m, z, |ln closed form - ln series|)`` over a grid.

    The closed form is evaluated without its series fallback, so the two
    routes stay independent.
    """
    rows = []
    for r in rs:
        for m in ms:
            for z in zs:
                a = closed_form_f0(r, m, z, fallback=False).ln_value
                b = f0_series(r, m, z).ln_value
                rows.append((r, m, z, abs(a - b)))
    return rows
