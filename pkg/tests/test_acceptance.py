"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from invariants import randomized_sweep  # noqa: E402
from resolvent_lab.checks import closed_form_agreement, oracle_agreement  # noqa: E402
from resolvent_lab.opnorm import bilateral_enclosure  # noqa: E402
from resolvent_lab.resolvent import resolvent_apply  # noqa: E402
from resolvent_lab.scenarios import run_scenario  # noqa: E402
from resolvent_lab.shift_core import ShiftOperator, harmonic  # noqa: E402
from resolvent_lab.vectors import basis  # noqa: E402

RESULTS: list = []
TIME_LIMIT = 60.0


def report(number: int, title: str, ok: bool, detail: str, runtime: float) -> bool:
    ok = ok and runtime < TIME_LIMIT
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title}: {detail}  [{runtime:.1f}s]"
    RESULTS.append(line)
    print(line)
    return ok


def _rows(scenario, overrides=None):
    t0 = time.perf_counter()
    rep = run_scenario(scenario, overrides)
    return rep, time.perf_counter() - t0


def test_criterion_01_oracle_equivalence():
    t0 = time.perf_counter()
    cases = oracle_agreement(n=20, seed=0, rtol=1e-8)
    worst = max(c.max_rel_diff for c in cases)
    ok = len(cases) == 20 and all(c.passed for c in cases)
    assert report(1, "series vs dense substitution", ok,
                  f"{sum(c.passed for c in cases)}/20 cases, max rel diff {worst:.2e} (tol 1e-8)",
                  time.perf_counter() - t0)


def test_criterion_02_closed_form():
    t0 = time.perf_counter()
    rows = closed_form_agreement((0.25, 0.5, 1.0), (3, 5), (1.0, 0.1, 0.01))
    worst = max(r[3] for r in rows)
    assert report(2, "closed-form f0 vs series", len(rows) == 18 and worst <= 1e-10,
                  f"18 grid points, max |log diff| {worst:.2e} (tol 1e-10)", time.perf_counter() - t0)


def test_criterion_03_l1_identity():
    rep, dt = _rows("FORWARD_L1_DECREASING")
    (row,) = rep.rows
    samples = row.estimate.samples
    dev = max(max(abs(s.ratio_lo - 1), abs(s.ratio_hi - 1)) for s in samples)
    ok = dev <= 1e-12 and row.estimated == 1.0 and len(samples) == 8
    assert report(3, "forward l1 ratio identity", ok,
                  f"max |ratio - 1| {dev:.1e} over {len(samples)} radii, k = {row.estimated!r}", dt)


def test_criterion_04_forward_strictly_cyclic():
    rep, dt = _rows("FORWARD_STRICTLY_CYCLIC", {"p": 2})
    worst = max(abs(r.estimated - 1.0) for r in rep.rows)
    vecs = ", ".join(f"{r.vector.split(':')[0]}:{r.estimated:.4f}" for r in rep.rows)
    ok = len(rep.rows) == 4 and worst <= 0.02
    assert report(4, "forward p=2 basis and random vector", ok, f"{vecs}; max dev {worst:.4f} (tol 0.02)", dt)


def test_criterion_05_backward_basis():
    rep, dt = _rows("BACKWARD_BASIS_ZERO")
    worst = max(r.estimated for r in rep.rows)
    env_ok = True
    for r in rep.rows:
        m = int(r.vector.split(":")[1])
        for s in r.estimate.samples:
            env_ok &= s.ratio_hi <= 1.10 * (m + 1) * math.log(1 / s.r) / s.ln_den_lo
    ok = len(rep.rows) == 3 and worst <= 0.03 and env_ok
    vals = ", ".join(f"{r.vector}:{r.estimated:.4f}" for r in rep.rows)
    assert report(5, "backward basis exponents", ok,
                  f"{vals} (tol 0.03); envelope within 10%: {env_ok}", dt)


def test_criterion_06_tail_vector():
    rep, dt = _rows("BACKWARD_TAIL_ONE")
    (row,) = rep.rows
    dev = abs(row.estimated - 1)
    assert report(6, "tail vector exponent", dev <= 0.05,
                  f"{row.vector} -> {row.estimated:.4f} (last raw {row.estimate.samples[-1].ratio_lo:.4f}, tol 0.05)",
                  dt)


def test_criterion_07_full_interval():
    rep, dt = _rows("BACKWARD_FULL_INTERVAL")
    worst = max(abs(r.estimated - r.expected_value) for r in rep.rows)
    vals = ", ".join(f"{r.expected_value:g}->{r.estimated:.4f}" for r in rep.rows)
    ok = len(rep.rows) == 4 and worst <= 0.03
    assert report(7, "backward x_r sweep", ok, f"{vals}; max dev {worst:.4f} (tol 0.03)", dt)


def test_criterion_08_bilateral():
    rep, dt = _rows("BILATERAL_HALF_TO_ONE", {"p": 2})
    rows = {r.vector: r for r in rep.rows}
    targets = [("stack:top=e:0;bottom=zero", 0.5, 0.02), ("stack:top=zero;bottom=e:1", 0.5, 0.03),
               ("stack:top=xr:r=0.5,m=5;bottom=zero", 0.75, 0.03), ("stack:top=xr:r=1,m=5;bottom=zero", 1.0, 0.03),
               ("stack:top=tail:m=2;bottom=zero", 1.0, 0.05)]
    ok = True
    parts = []
    for vec, target, tol in targets:
        est = rows[vec].estimated if vec in rows else math.nan
        ok &= abs(est - target) <= tol
        parts.append(f"{target:g}->{est:.4f}")
    assert report(8, "bilateral block exponents", ok, "x~, stack(0,e1), xi_0.5, xi_1, tail: " + ", ".join(parts), dt)


def test_criterion_09_za2():
    t0 = time.perf_counter()
    t = ShiftOperator("bilateral", harmonic(1), 2)
    z = 1e-3
    enc = bilateral_enclosure(t, z, 2)
    ae1 = resolvent_apply(t.block_a(), basis(0), z).norm.ln_value
    ratio = enc.upper.ln_value / (2 * ae1)
    assert report(9, "bilateral upper bound vs 2 ln||(z-A)^-1 e1||", 0.95 <= ratio <= 1.05,
                  f"ratio {ratio:.5f} at r = 1e-3 (band [0.95, 1.05])", time.perf_counter() - t0)


LITERAL = ("termwise_domination", "xrn_inequality", "sandwich_ordering", "z_monotonicity",
           "backward_basis_polynomial")


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    out = randomized_sweep(cases_per_invariant=250, seed=2024)
    return out, time.perf_counter() - t0


@pytest.mark.xfail(strict=True, reason="the literal x_r norm inequality is false by a factor up to m!; "
                                       "see test_literal_xrn_has_counterexamples")
def test_criterion_10_invariants(sweep):
    out, dt = sweep
    cases = sum(out[k][0] for k in LITERAL)
    bad = {k: out[k][1] for k in LITERAL if out[k][1]}
    ok = cases >= 1000 and not bad
    detail = f"{cases} cases over 5 suites; violations: {bad or 'none'}"
    detail += f"; factorial-form x_r bound: {out['xrn_factorial_form'][1]} of {out['xrn_factorial_form'][0]}"
    assert report(10, "invariant suites", ok, detail, dt)


def test_invariants_other_than_literal_xrn(sweep):
    out, _ = sweep
    for name in ("termwise_domination", "xrn_factorial_form", "sandwich_ordering", "z_monotonicity",
                 "backward_basis_polynomial"):
        n, bad, _, first = out[name]
        assert n == 250 and bad == 0, (name, first)


def main() -> int:
    passed = 0
    criteria = sorted(n for n in globals() if n.startswith("test_criterion_"))
    for name in criteria:
        fn = globals()[name]
        args = []
        if name == "test_criterion_10_invariants":
            t0 = time.perf_counter()
            args = [(randomized_sweep(cases_per_invariant=250, seed=2024), time.perf_counter() - t0)]
        try:
            fn(*args)
            passed += 1
        except AssertionError:
            pass
    print(f"{passed}/{len(criteria)} criteria pass")
    return 0 if passed == len(criteria) else 1


if __name__ == "__main__":
    sys.exit(main())
