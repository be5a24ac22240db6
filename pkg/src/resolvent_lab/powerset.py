"""Estimating ``k_x = limsup_{z->0} ln||(z-T)^{-1}x|| / ln||(z-T)^{-1}||``.

At each radius of a :class:`RadiusSchedule` the ratio is enclosed by dividing
the numerator by the upper and lower operator-norm bounds. The limit is then
extrapolated by least squares on the interval midpoints with one of two
correction models:

``inverse_log``
    ``k + a / ln(1/r)``.
``r_log_r``
    ``k + a r ln(1/r) + b r + c r^2``, the second-order form of the
    corrections for factorial-type weights.
``dual``
    Both, keeping the one with the smaller residual.

Only the eventually monotone tail of the samples enters the fit: at the
largest radii the exponential growth has not yet overtaken the polynomial
factors and the ratio can move the wrong way.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import RadiusTooLarge
from .opnorm import NormEnclosure, cached_apply, enclosure
from .resolvent import dense_truncated_resolvent
from .shift_core import BILATERAL, PNorm, ShiftOperator
from .vectors import VectorSpec, parse_vector, stack, tail_vector, xr_family, zero

__all__ = [
    "RadiusSchedule",
    "RatioSample",
    "ExponentEstimate",
    "MODELS",
    "exponent_sample",
    "exponent_ratio",
    "exponent_ratio_theta",
    "estimate_kx",
    "fit_model",
    "monotone_suffix_start",
    "sweep_family",
    "family_template",
    "SweepRow",
]

MODELS = ("inverse_log", "r_log_r", "dual")

#: Convergence thresholds: fit residual (RMS), last interval width, range slack.
RESIDUAL_TOL = 1e-2
WIDTH_TOL = 0.02
RANGE_SLACK = 0.02


@dataclass(frozen=True)
class RadiusSchedule:
    """Radii ``r_start * ratio**i`` for ``i < count``."""

    r_start: float = 0.1
    ratio: float = 0.5
    count: int = 8

    def __post_init__(self):
        if not self.r_start > 0:
            raise ValueError("r_start must be positive")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 3:
            raise ValueError("count must be >= 3")

    def radii(self) -> np.ndarray:
        return self.r_start * self.ratio ** np.arange(self.count)

    @property
    def smallest(self) -> float:
        return float(self.radii()[-1])


@dataclass(frozen=True)
class RatioSample:
    """One radius: ``ratio_lo = ln_num / ln_den_hi`` and ``ratio_hi = ln_num / ln_den_lo``."""

    r: float
    ln_num: float
    ln_den_lo: float
    ln_den_hi: float
    ratio_lo: float
    ratio_hi: float
    probe: str = ""

    @property
    def ratio_mid(self) -> float:
        return 0.5 * (self.ratio_lo + self.ratio_hi)

    @property
    def width(self) -> float:
        return self.ratio_hi - self.ratio_lo


@dataclass
class ExponentEstimate:
    """Per-radius ratio intervals and the extrapolated exponent.

    ``status`` is ``converged`` when the chosen fit has residual at most
    :data:`RESIDUAL_TOL`, the last interval is narrower than :data:`WIDTH_TOL`
    and the extrapolated value lies in ``[-RANGE_SLACK, 1 + RANGE_SLACK]``.
    Out-of-range values are reported as they are, never clamped.
    """

    samples: list
    running_sup: float
    extrapolated: float
    model: str
    residual: float
    status: str
    fits: dict = field(default_factory=dict)
    models_agree: Optional[bool] = None
    dropped: list = field(default_factory=list)
    fit_start: int = 0
    vector: str = ""
    shift: str = ""
    p: float = 2.0

    @property
    def limsup_estimate(self) -> float:
        """``max(running_sup, extrapolated)``."""
        return max(self.running_sup, self.extrapolated)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["samples"] = [asdict(s) for s in self.samples]
        d["limsup_estimate"] = self.limsup_estimate
        return d


def _p(t: ShiftOperator, p) -> float:
    return t.p.p if p is None else PNorm.of(p).p


def exponent_sample(t: ShiftOperator, x: VectorSpec, z: float, p=None, probes=None, tol=None,
                    enc: Optional[NormEnclosure] = None) -> RatioSample:
    """Ratio interval at one radius; raises :class:`RadiusTooLarge` when a log is not positive."""
    pp = _p(t, p)
    num = cached_apply(t, x, z, pp, tol).norm.ln_value
    enc = enclosure(t, z, pp, probes, tol) if enc is None else enc
    lo, hi = enc.lower.ln_value, enc.upper.ln_value
    if num <= 0 or lo <= 0:
        raise RadiusTooLarge(f"logs not positive at r={z:g} (numerator {num:.3g}, lower {lo:.3g})")
    return RatioSample(float(z), num, lo, hi, num / hi, num / lo, enc.probe_achieving_lower)


def exponent_ratio(t: ShiftOperator, x: VectorSpec, z: float, p=None, probes=None, tol=None) -> tuple[float, float]:
    """``(ratio_lo, ratio_hi)`` at radius ``z``."""
    s = exponent_sample(t, x, z, p, probes, tol)
    return s.ratio_lo, s.ratio_hi


def exponent_ratio_theta(t: ShiftOperator, coefficients, r: float, p=None, n_theta: int = 32,
                         size: int = 400, tol=None) -> tuple[float, float]:
    """Ratio interval for a complex finitely supported vector, maximised over ``z = r e^{i theta}``.

    Heuristic sampler: the numerator is the largest dense-solve norm over a
    uniform angle grid, the denominator is the enclosure at ``|z| = r``
    (resolvent norms of weighted shifts depend only on ``|z|``). Plain
    floating point, so only radii with moderate magnitudes are usable.
    """
    if t.kind == BILATERAL:
        raise ValueError("theta grid supports unilateral shifts")
    pp = _p(t, p)
    coeffs = np.asarray(coefficients, dtype=complex)
    if coeffs.size > size:
        raise ValueError("vector longer than the truncation size")
    best = -math.inf
    for th in np.linspace(0.0, 2 * math.pi, n_theta, endpoint=False):
        z = complex(r * math.cos(th), r * math.sin(th))
        c = _dense_complex(t, size, z, coeffs)
        best = max(best, math.log(np.sum(np.abs(c) ** pp)) / pp)
    enc = enclosure(t, r, pp, None, tol)
    lo, hi = enc.lower.ln_value, enc.upper.ln_value
    if best <= 0 or lo <= 0:
        raise RadiusTooLarge(f"logs not positive at r={r:g}")
    return best / hi, best / lo


def _dense_complex(t: ShiftOperator, N: int, z: complex, coeffs: np.ndarray) -> np.ndarray:
    return dense_truncated_resolvent(t, N, z, coeffs)


def _design(model: str, r: np.ndarray) -> np.ndarray:
    L = np.log(1.0 / r)
    if model == "inverse_log":
        return np.column_stack([np.ones_like(r), 1.0 / L])
    if model == "r_log_r":
        return np.column_stack([np.ones_like(r), r * L, r, r * r])
    raise ValueError(f"unknown model {model!r}")


def fit_model(model: str, r, y) -> tuple[float, float]:
    """Least-squares ``(intercept, rms residual)``.

    Needs more points than parameters; otherwise returns ``(nan, inf)``.
    """
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    X = _design(model, r)
    if r.size <= X.shape[1]:
        return math.nan, math.inf
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = r.size - X.shape[1]
    rms = float(np.sqrt(np.sum(resid**2) / dof))
    return float(coef[0]), rms


def monotone_suffix_start(y, min_points: int) -> int:
    """First index of the longest monotone tail of ``y``, moved back to keep ``min_points``."""
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        return 0
    d = np.sign(np.diff(y))
    i = d.size - 1
    while i > 0 and (d[i - 1] == d[-1] or d[i - 1] == 0):
        i -= 1
    return max(0, min(i, y.size - min_points))


def _map(fn, items, max_workers: Optional[int]):
    if max_workers and max_workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def estimate_kx(t: ShiftOperator, x: Union[VectorSpec, str], p=None, schedule: Optional[RadiusSchedule] = None,
                model: str = "dual", probes=None, tol=None, max_workers: Optional[int] = None) -> ExponentEstimate:
    """Sample the ratio along ``schedule`` and extrapolate to ``r -> 0``.

    Radii where a log is not positive are dropped (listed in ``dropped``).
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    if isinstance(x, str):
        x = parse_vector(x)
    pp = _p(t, p)
    schedule = schedule or RadiusSchedule()

    def one(r):
        try:
            return exponent_sample(t, x, float(r), pp, probes, tol)
        except RadiusTooLarge:
            return float(r)

    out = _map(one, list(schedule.radii()), max_workers)
    samples = [s for s in out if isinstance(s, RatioSample)]
    dropped = [s for s in out if not isinstance(s, RatioSample)]
    running = max((s.ratio_lo for s in samples), default=math.nan)
    if len(samples) < 2:
        return ExponentEstimate(samples, running, math.nan, model, math.inf, "inconclusive",
                                dropped=dropped, vector=str(x), shift=t.spec(), p=pp)
    r = np.array([s.r for s in samples])
    y = np.array([s.ratio_mid for s in samples])
    if all(s.ratio_lo == s.ratio_hi == samples[0].ratio_lo for s in samples):
        # identical closed intervals at every radius: the ratio is an identity, nothing to fit
        c = samples[0].ratio_lo
        ok = -RANGE_SLACK <= c <= 1 + RANGE_SLACK
        return ExponentEstimate(samples, running, c, "exact", 0.0, "converged" if ok else "inconclusive",
                                {}, None, dropped, 0, str(x), t.spec(), pp)
    names = ("inverse_log", "r_log_r") if model == "dual" else (model,)
    start = monotone_suffix_start(y, min_points=5)
    fits = {m: fit_model(m, r[start:], y[start:]) for m in names}
    chosen = min(names, key=lambda m: fits[m][1])
    ext, res = fits[chosen]
    if not math.isfinite(res):
        ext = math.nan
    agree = None
    if model == "dual":
        (a, ra), (b, rb) = fits["inverse_log"], fits["r_log_r"]
        agree = bool(abs(a - b) <= 2 * max(ra, rb))
    ok = (res <= RESIDUAL_TOL and samples[-1].width < WIDTH_TOL
          and -RANGE_SLACK <= ext <= 1 + RANGE_SLACK)
    return ExponentEstimate(samples, running, ext, chosen, res, "converged" if ok else "inconclusive",
                            {m: {"extrapolated": v[0], "residual": v[1]} for m, v in fits.items()},
                            agree, dropped, start, str(x), t.spec(), pp)


def family_template(name: str, m: int = 5) -> Callable[[float], VectorSpec]:
    """``r -> vector`` for the named families ``xr`` and ``stack-xr``, or a format string with ``{r}``."""
    if name == "xr":
        return lambda r: xr_family(r, m)
    if name == "stack-xr":
        return lambda r: stack(xr_family(r, m), zero())
    if "{r}" in name:
        return lambda r: parse_vector(name.format(r=r))
    raise ValueError(f"unknown family {name!r}")


@dataclass(frozen=True)
class SweepRow:
    r: float
    estimate: ExponentEstimate


def sweep_family(t: ShiftOperator, family: Union[str, Callable[[float], VectorSpec]], r_values: Sequence[float],
                 p=None, schedule: Optional[RadiusSchedule] = None, m: int = 5, model: str = "dual",
                 probes=None, tol=None, max_workers: Optional[int] = None,
                 monotone_slack: float = 0.03) -> tuple[list, bool]:
    """One estimate per ``r``.

    Returns ``(rows, monotone)`` where ``monotone`` says the extrapolated
    values are nondecreasing in ``r`` up to ``monotone_slack``.
    """
    make = family_template(family, m) if isinstance(family, str) else family
    rows = [SweepRow(float(r), estimate_kx(t, make(float(r)), p, schedule, model, probes, tol, max_workers))
            for r in r_values]
    ordered = sorted(rows, key=lambda row: row.r)
    ext = [row.estimate.extrapolated for row in ordered]
    monotone = all(b >= a - monotone_slack for a, b in zip(ext, ext[1:]))
    return rows, monotone
