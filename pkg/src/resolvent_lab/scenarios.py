"""Named reproductions of the power-set results, each checked against its exact exponent.

====================== ============================================ =========================
id                     shift and vectors                            exponents
====================== ============================================ =========================
FORWARD_L1_DECREASING  forward, ``w_n = 1/(n+1)``, ``l^1``, ``e_0``  1 (exact identity)
FORWARD_STRICTLY_CYCLIC forward, ``p`` in {1, 2}, ``e_0, e_1, e_3``,  1
                       a random nonnegative finite vector
BACKWARD_BASIS_ZERO    backward harmonic, ``e_0, e_2, e_5``         0
BACKWARD_TAIL_ONE      backward harmonic, tail vector               1
BACKWARD_FULL_INTERVAL backward harmonic, ``x_r`` for four ``r``    ``r``
BILATERAL_HALF_TO_ONE  bilateral block, ``stack(0, e_1)``,          1/2, 1/2, ``(1+r)/2``, 1
                       ``stack(e_0, 0)``, ``stack(xi_r, 0)``,
                       ``stack(tail, 0)``
====================== ============================================ =========================
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import HypothesisViolation, UnknownScenario
from .powerset import ExponentEstimate, RadiusSchedule, estimate_kx
from .shift_core import BACKWARD, BILATERAL, FORWARD, ShiftOperator, parse_weights
from .vectors import VectorSpec, basis, finite, stack, tail_vector, xr_family, zero

__all__ = [
    "SCENARIOS",
    "DEFAULT_TOLERANCES",
    "ScenarioRow",
    "ScenarioReport",
    "run_scenario",
    "default_m",
    "random_finite_vector",
    "CSV_HEADER",
]

SCENARIOS = (
    "FORWARD_L1_DECREASING",
    "FORWARD_STRICTLY_CYCLIC",
    "BACKWARD_BASIS_ZERO",
    "BACKWARD_TAIL_ONE",
    "BACKWARD_FULL_INTERVAL",
    "BILATERAL_HALF_TO_ONE",
)

#: Per-target tolerances on ``|estimated - exact|``; override with ``tolerance``.
DEFAULT_TOLERANCES = {
    "FORWARD_L1_DECREASING": {"e0": 1e-12},
    "FORWARD_STRICTLY_CYCLIC": {"basis": 0.02, "random": 0.02},
    "BACKWARD_BASIS_ZERO": {"basis": 0.03, "envelope": 0.10},
    "BACKWARD_TAIL_ONE": {"tail": 0.05},
    "BACKWARD_FULL_INTERVAL": {"xr": 0.03},
    "BILATERAL_HALF_TO_ONE": {"centre": 0.02, "case1": 0.03, "xi": 0.03, "tail": 0.05},
}

CSV_HEADER = ("scenario", "vector", "r", "ln_num", "ln_den_lo", "ln_den_hi", "ratio_lo", "ratio_hi")

_OVERRIDE_KEYS = {"p", "r_start", "ratio", "count", "tolerance", "weights", "m", "tail_m", "model",
                  "seed", "r_values", "threads"}


@dataclass
class ScenarioRow:
    """One target: the exact exponent, the estimate and whether it passes."""

    vector: str
    expected_value: float
    estimated: float
    tolerance: float
    passed: bool
    status: str
    p: float
    checks: dict = field(default_factory=dict)
    estimate: Optional[ExponentEstimate] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "estimate"}
        if self.estimate is not None:
            d["estimate"] = self.estimate.to_dict()
        return d


@dataclass
class ScenarioReport:
    scenario: str
    rows: list
    status: str
    runtime: float
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "status": self.status, "runtime": self.runtime,
                "config": self.config, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, default=_json_default)

    def to_table(self) -> str:
        head = f"{'vector':44s} {'p':>3s} {'exact':>8s} {'estimated':>10s} {'tol':>7s} {'status':>12s}  result"
        lines = [f"{self.scenario}  ({self.status}, {self.runtime:.1f}s)", head, "-" * len(head)]
        for r in self.rows:
            lines.append(f"{r.vector:44s} {_fmt_p(r.p):>3s} {r.expected_value:8.4f} {r.estimated:10.6f} "
                         f"{r.tolerance:7.1e} {r.status:>12s}  {'pass' if r.passed else 'FAIL'}")
            for name, ok in r.checks.items():
                if not ok:
                    lines.append(f"    check failed: {name}")
        return "\n".join(lines)

    def csv_rows(self) -> list:
        out = []
        for row in self.rows:
            if row.estimate is None:
                continue
            for s in row.estimate.samples:
                out.append((self.scenario, row.vector, s.r, s.ln_num, s.ln_den_lo, s.ln_den_hi,
                            s.ratio_lo, s.ratio_hi))
        return out


def _fmt_p(p: float) -> str:
    return str(int(p)) if float(p).is_integer() else f"{p:g}"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(f"not serializable: {type(o)}")


def default_m(weights) -> int:
    """Smallest integer ``m > 2 m0 + 2`` for the band parameter ``m0`` of the weights."""
    m0 = weights.band_m0
    if m0 is None:
        raise HypothesisViolation(f"{weights.spec()} is not inside a band 1/(n+m0) .. 1/(n-m0)")
    return int(math.floor(2 * m0 + 2)) + 1


def random_finite_vector(seed: int = 0, length: int = 6) -> VectorSpec:
    """A nonnegative finitely supported vector with entries drawn from ``(0, 1]``."""
    rng = np.random.default_rng(seed)
    support = sorted(rng.choice(np.arange(12), size=length, replace=False).tolist())
    values = 1.0 - rng.random(length)
    return finite([(int(n), round(float(v), 6)) for n, v in zip(support, values)])


def _tol(scenario: str, key: str, overrides: dict) -> float:
    tol = overrides.get("tolerance")
    if isinstance(tol, dict):
        return float(tol.get(key, DEFAULT_TOLERANCES[scenario][key]))
    if tol is not None and key != "envelope":
        return float(tol)
    return DEFAULT_TOLERANCES[scenario][key]


def _row(x: VectorSpec, target: float, tol: float, est: ExponentEstimate, p: float, checks=None) -> ScenarioRow:
    checks = dict(checks or {})
    ok = abs(est.extrapolated - target) <= tol and est.status == "converged" and all(checks.values())
    return ScenarioRow(str(x), target, est.extrapolated, tol, bool(ok), est.status, p, checks, est)


def run_scenario(scenario: str, overrides: Optional[dict] = None, max_workers: Optional[int] = None) -> ScenarioReport:
    """Run one named scenario.

    ``overrides`` may set ``p``, ``r_start``, ``ratio``, ``count``,
    ``tolerance`` (number or per-target dict), ``weights`` (a weight spec),
    ``m`` (``x_r`` and ``xi_r`` parameter), ``tail_m``, ``model``, ``seed``
    and ``r_values``. Values outside the hypotheses of the underlying result
    raise :class:`HypothesisViolation`.
    """
    if scenario not in SCENARIOS:
        raise UnknownScenario(scenario)
    overrides = dict(overrides or {})
    unknown = set(overrides) - _OVERRIDE_KEYS
    if unknown:
        raise ValueError(f"unknown overrides: {sorted(unknown)}")
    max_workers = overrides.pop("threads", None) or max_workers
    schedule = RadiusSchedule(float(overrides.get("r_start", 0.1)), float(overrides.get("ratio", 0.5)),
                              int(overrides.get("count", 8)))
    model = overrides.get("model", "dual")
    start = time.perf_counter()
    rows = _RUNNERS[scenario](overrides, schedule, model, max_workers)
    status = "pass" if rows and all(r.passed for r in rows) else "fail"
    config = {"schedule": asdict(schedule), "model": model,
              **{k: v for k, v in overrides.items() if k not in ("r_start", "ratio", "count")}}
    return ScenarioReport(scenario, rows, status, time.perf_counter() - start, config)


def _weights(overrides: dict, default: str = "harmonic:c=1"):
    w = parse_weights(overrides.get("weights", default))
    if not w.claimed_monotone:
        raise HypothesisViolation("these scenarios need decreasing weights")
    return w


def _forward_l1(o, schedule, model, workers):
    if o.get("p", 1) != 1:
        raise HypothesisViolation("the l^1 identity scenario runs at p = 1")
    t = ShiftOperator(FORWARD, _weights(o), 1.0)
    x = basis(0)
    tol = _tol("FORWARD_L1_DECREASING", "e0", o)
    est = estimate_kx(t, x, 1.0, schedule, model, max_workers=workers)
    exact = all(abs(s.ratio_lo - 1) <= tol and abs(s.ratio_hi - 1) <= tol for s in est.samples)
    return [_row(x, 1.0, tol, est, 1.0, {"every radius ratio 1": exact})]


def _forward_cyclic(o, schedule, model, workers):
    ps = [float(o["p"])] if "p" in o else [1.0, 2.0]
    w = _weights(o)
    vectors = [(basis(0), "basis"), (basis(1), "basis"), (basis(3), "basis"),
               (random_finite_vector(int(o.get("seed", 0))), "random")]
    rows = []
    for p in ps:
        t = ShiftOperator(FORWARD, w, p)
        for x, key in vectors:
            est = estimate_kx(t, x, p, schedule, model, max_workers=workers)
            rows.append(_row(x, 1.0, _tol("FORWARD_STRICTLY_CYCLIC", key, o), est, p))
    return rows


def _backward_basis(o, schedule, model, workers):
    p = float(o.get("p", 2.0))
    t = ShiftOperator(BACKWARD, _weights(o), p)
    slack = DEFAULT_TOLERANCES["BACKWARD_BASIS_ZERO"]["envelope"]
    if isinstance(o.get("tolerance"), dict):
        slack = float(o["tolerance"].get("envelope", slack))
    rows = []
    for m in (0, 2, 5):
        est = estimate_kx(t, basis(m), p, schedule, model, max_workers=workers)
        env = all(s.ratio_hi <= (1 + slack) * (m + 1) * math.log(1 / s.r) / s.ln_den_lo for s in est.samples)
        rows.append(_row(basis(m), 0.0, _tol("BACKWARD_BASIS_ZERO", "basis", o), est, p,
                         {"(m+1) ln(1/r) envelope": env}))
    return rows


def _tail_m(o) -> int:
    return int(o.get("tail_m", 2))


def _backward_tail(o, schedule, model, workers):
    p = float(o.get("p", 2.0))
    t = ShiftOperator(BACKWARD, _weights(o), p)
    m = _tail_m(o)
    if m * p <= 1:
        raise HypothesisViolation("the tail vector needs m p > 1 to be summable")
    x = tail_vector(m)
    est = estimate_kx(t, x, p, schedule, model, max_workers=workers)
    return [_row(x, 1.0, _tol("BACKWARD_TAIL_ONE", "tail", o), est, p)]


def _xr_m(o, w) -> int:
    need = default_m(w)
    m = int(o.get("m", need))
    if m < need:
        raise HypothesisViolation(f"m must exceed 2 m0 + 2 (need m >= {need})")
    return m


def _backward_interval(o, schedule, model, workers):
    p = float(o.get("p", 2.0))
    w = _weights(o)
    t = ShiftOperator(BACKWARD, w, p)
    m = _xr_m(o, w)
    rows = []
    for r in o.get("r_values", (0.25, 0.5, 0.75, 1.0)):
        x = xr_family(float(r), m)
        est = estimate_kx(t, x, p, schedule, model, max_workers=workers)
        rows.append(_row(x, float(r), _tol("BACKWARD_FULL_INTERVAL", "xr", o), est, p))
    return rows


def _bilateral(o, schedule, model, workers):
    p = float(o.get("p", 2.0))
    w = _weights(o)
    t = ShiftOperator(BILATERAL, w, p)
    m = _xr_m(o, w)
    key = "BILATERAL_HALF_TO_ONE"
    targets = [(stack(zero(), basis(1)), 0.5, "case1"), (stack(basis(0), zero()), 0.5, "centre")]
    targets += [(stack(xr_family(float(r), m), zero()), (1 + float(r)) / 2, "xi")
                for r in o.get("r_values", (0.5, 1.0))]
    targets.append((stack(tail_vector(_tail_m(o)), zero()), 1.0, "tail"))
    rows = []
    for x, target, k in targets:
        est = estimate_kx(t, x, p, schedule, model, max_workers=workers)
        rows.append(_row(x, target, _tol(key, k, o), est, p))
    return rows


_RUNNERS = {
    "FORWARD_L1_DECREASING": _forward_l1,
    "FORWARD_STRICTLY_CYCLIC": _forward_cyclic,
    "BACKWARD_BASIS_ZERO": _backward_basis,
    "BACKWARD_TAIL_ONE": _backward_tail,
    "BACKWARD_FULL_INTERVAL": _backward_interval,
    "BILATERAL_HALF_TO_ONE": _bilateral,
}
