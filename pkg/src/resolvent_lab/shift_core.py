"""Weight sequences, weighted shifts and the norms of their powers.

Weights are rule-generated and stored as natural logs. Only nonnegative real
weights are supported: a weighted shift is isometrically equivalent to the
shift with weights ``|w_n|``, so every norm computed here is unchanged by
dropping phases.

Index conventions
-----------------
* forward unilateral: ``T e_n = w_n e_{n+1}`` for ``n >= 0``;
* backward unilateral: ``T e_0 = 0``, ``T e_n = w_n e_{n-1}`` for ``n >= 1``;
* bilateral block: a backward part ``B`` on ``e_0, e_{-1}, ...`` and a forward
  part ``A`` on ``e_1, e_2, ...``, both with weights ``w_1, w_2, ...``, joined
  by the rank-one map ``e_0 -> e_1``.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import HypothesisViolation, NonComputableSup, SpecParseError
from .logdomain import LogMagnitude

__all__ = [
    "WeightSequence",
    "PNorm",
    "ShiftOperator",
    "FORWARD",
    "BACKWARD",
    "BILATERAL",
    "harmonic",
    "band",
    "recfact",
    "explicit",
    "parse_weights",
    "parse_shift",
    "beta_product",
    "log_beta_array",
    "power_norm",
    "log_power_norms",
    "quasinilpotence_report",
    "QuasinilpotenceReport",
]

FORWARD = "forward"
BACKWARD = "backward"
BILATERAL = "bilateral"
_KIND_ALIASES = {
    "forward": FORWARD,
    "forward_unilateral": FORWARD,
    "backward": BACKWARD,
    "backward_unilateral": BACKWARD,
    "bilateral": BILATERAL,
    "bilateral_block": BILATERAL,
}

DEFAULT_HORIZON = 10**6
_HARD_HORIZON = 10**7
_BAND_RULES = ("lower", "upper", "mid", "steps")


class WeightSequence:
    """Positive weights ``w_n`` generated by a rule.

    Rules
    -----
    ``harmonic(c)``
        ``w_n = 1/(n + c)``.
    ``band(m0, rule)``
        Any decreasing sequence with ``1/(n+2 m0) <= w_{n+m0} <= 1/n`` for
        ``n >= 1``; ``rule`` picks the lower edge, upper edge, ``mid``
        (``1/(n+m0)``) or ``steps`` (piecewise constant, blocks of ``2 m0``).
        Indices ``j <= m0`` repeat the first in-band value.
    ``recfact(s)``
        ``w_n = n!/(n+s)!`` (gamma functions for real ``s``); ``s = 1`` is
        ``harmonic(1)``.
    ``explicit(prefix, tail)``
        ``w_n = prefix[n]`` for ``n < len(prefix)``, then the tail rule.

    Log prefix sums are memoized and grown on demand up to ``horizon``.
    """

    def __init__(self, rule: str, params: dict, claimed_monotone: Optional[bool] = None,
                 horizon: int = DEFAULT_HORIZON):
        self.rule = rule
        self.params = dict(params)
        self.horizon = int(horizon)
        self._lock = threading.Lock()
        self._lw = np.empty(0)
        self._cum0 = np.zeros(1)
        self._cum1 = np.zeros(1)
        self._validate()
        actual = self._rule_monotone()
        if claimed_monotone is None:
            claimed_monotone = actual
        elif claimed_monotone and not actual:
            raise HypothesisViolation(f"{self.spec()} is not monotone decreasing")
        self.claimed_monotone = bool(claimed_monotone)

    # construction helpers -------------------------------------------------
    def _validate(self):
        r, p = self.rule, self.params
        if r == "harmonic":
            p["c"] = float(p.get("c", 1.0))
        elif r == "band":
            p["m0"] = float(p.get("m0", 1.0))
            p["rule"] = str(p.get("rule", "mid"))
            if p["m0"] <= 0:
                raise SpecParseError("band needs m0 > 0")
            if p["rule"] not in _BAND_RULES:
                raise SpecParseError(f"band rule must be one of {_BAND_RULES}")
            if p["rule"] == "steps" and abs(2 * p["m0"] - round(2 * p["m0"])) > 1e-12:
                raise SpecParseError("band steps rule needs 2*m0 to be an integer")
        elif r == "recfact":
            p["s"] = float(p.get("s", 1.0))
            if p["s"] <= 0:
                raise SpecParseError("recfact needs s > 0")
        elif r == "explicit":
            prefix = tuple(float(v) for v in p.get("prefix", ()))
            if not prefix or min(prefix) <= 0:
                raise SpecParseError("explicit prefix must hold positive weights")
            tail = p.get("tail")
            if not isinstance(tail, WeightSequence):
                raise SpecParseError("explicit weights need a tail rule")
            if not tail._rule_monotone():
                raise SpecParseError("explicit tail rule must be monotone")
            p["prefix"] = prefix
        elif r == "shifted":
            if not isinstance(p.get("base"), WeightSequence):
                raise SpecParseError("shifted weights need a base sequence")
            p["offset"] = int(p.get("offset", 1))
        else:
            raise SpecParseError(f"unknown weight rule {r!r}")

    def _rule_monotone(self) -> bool:
        if self.rule in ("harmonic", "band", "recfact"):
            return True
        if self.rule == "shifted":
            return self.params["base"]._rule_monotone()
        prefix = self.params["prefix"]
        tail = self.params["tail"]
        L = len(prefix)
        ok = all(prefix[i + 1] <= prefix[i] for i in range(L - 1))
        w_L = float(np.exp(tail._raw_log_weights(np.array([L]))[0]))
        return ok and prefix[-1] >= w_L

    # raw evaluation --------------------------------------------------------
    def _raw_log_weights(self, idx: np.ndarray) -> np.ndarray:
        """``ln w_n`` for integer array ``idx``; NaN where the rule is undefined."""
        idx = np.asarray(idx, dtype=float)
        r, p = self.rule, self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if r == "harmonic":
                d = idx + p["c"]
                return np.where(d > 0, -np.log(np.where(d > 0, d, 1.0)), np.nan)
            if r == "band":
                m0, sub = p["m0"], p["rule"]
                n = np.maximum(idx, _band_first(m0)) - m0
                if sub == "lower":
                    v = -np.log(n + 2 * m0)
                elif sub == "upper":
                    v = -np.log(n)
                elif sub == "mid":
                    v = -np.log(n + m0)
                else:
                    L = round(2 * m0)
                    v = -np.log(L * np.ceil(n / L))
                return v
            if r == "recfact":
                s = p["s"]
                return gammaln(idx + 1) - gammaln(idx + s + 1)
            if r == "shifted":
                return p["base"]._raw_log_weights(idx + p["offset"])
            prefix = np.log(np.asarray(p["prefix"]))
            L = len(prefix)
            out = p["tail"]._raw_log_weights(idx)
            inside = idx < L
            if np.any(inside):
                out = np.array(out, dtype=float)
                out[inside] = prefix[idx[inside].astype(int)]
            return out

    def _ensure(self, n: int):
        """Grow the memo so that indices ``0..n`` are available."""
        if n < self._lw.size:
            return
        with self._lock:
            if n < self._lw.size:
                return
            if n > max(self.horizon, _HARD_HORIZON):
                raise NonComputableSup(f"weight index {n} beyond the memo horizon")
            size = max(64, 2 * self._lw.size)
            while size <= n:
                size *= 2
            lw = self._raw_log_weights(np.arange(size))
            cum0 = np.concatenate(([0.0], np.cumsum(lw)))
            lw1 = lw.copy()
            lw1[0] = 0.0
            cum1 = np.concatenate(([0.0], np.cumsum(lw1[1:])))
            self._lw, self._cum0, self._cum1 = lw, cum0, cum1

    # public views ----------------------------------------------------------
    def log_weights(self, start: int, stop: int) -> np.ndarray:
        """``ln w_n`` for ``start <= n < stop``."""
        self._ensure(stop)
        return self._lw[start:stop]

    def weight(self, n: int) -> float:
        return float(np.exp(self.log_weights(n, n + 1)[0]))

    def log_products(self, start: int, count: int) -> np.ndarray:
        """``ln prod_{j=start}^{start+k-1} w_j`` for ``k = 0..count`` (start 0 or 1)."""
        if start not in (0, 1):
            raise ValueError("products start at index 0 (forward) or 1 (backward)")
        self._ensure(start + count + 1)
        cum = self._cum0 if start == 0 else self._cum1
        out = cum[: count + 1]
        if np.isnan(out).any():
            raise NonComputableSup(f"{self.spec()} is undefined inside the product range")
        return out.copy()

    def log_window(self, k: int, n: int) -> float:
        """``ln prod_{j=k}^{k+n-1} w_j``."""
        self._ensure(k + n + 1)
        if k == 0:
            v = self._cum0[n]
        else:
            v = self._cum1[k + n - 1] - self._cum1[k - 1]
        if math.isnan(v):
            raise NonComputableSup(f"{self.spec()} is undefined inside window ({k}, {n})")
        return float(v)

    def log_tail_sup(self, idx) -> np.ndarray:
        """``ln sup_{j >= k} w_j`` for each ``k`` in ``idx``."""
        idx = np.atleast_1d(np.asarray(idx, dtype=int))
        if idx.size == 0:
            return np.empty(0)
        base = self.log_weights(0, int(idx.max()) + 1)[idx]
        if self.rule != "explicit" or self.claimed_monotone:
            return base
        prefix = np.log(np.asarray(self.params["prefix"]))
        L = prefix.size
        w_L = self.params["tail"]._raw_log_weights(np.array([L]))[0]
        suffix_max = np.maximum.accumulate(prefix[::-1])[::-1]
        out = base.copy()
        inside = idx < L
        out[inside] = np.maximum(suffix_max[idx[inside]], w_L)
        return out

    @property
    def upper_envelope(self) -> Optional[tuple[float, int]]:
        """``(a, j0)`` with ``w_j <= 1/(j - a)`` for all ``j >= j0`` (and ``j0 > a``)."""
        r, p = self.rule, self.params
        if r == "harmonic":
            return -p["c"], max(0, math.floor(-p["c"]) + 1)
        if r == "band":
            return p["m0"], _band_first(p["m0"])
        if r == "recfact":
            return (-1.0, 0) if p["s"] >= 1 else None
        if r == "shifted":
            env = p["base"].upper_envelope
            if env is None:
                return None
            return env[0] - p["offset"], max(0, env[1] - p["offset"])
        env = p["tail"].upper_envelope
        if env is None:
            return None
        return env[0], max(env[1], len(p["prefix"]))

    @property
    def lower_envelope(self) -> Optional[tuple[float, int]]:
        """``(b, j0)`` with ``w_j >= 1/(j + b)`` for all ``j >= j0``."""
        r, p = self.rule, self.params
        if r == "harmonic":
            return p["c"], max(0, math.floor(-p["c"]) + 1)
        if r == "band":
            return p["m0"], _band_first(p["m0"])
        if r == "recfact":
            return (1.0, 0) if p["s"] <= 1 else None
        if r == "shifted":
            env = p["base"].lower_envelope
            if env is None:
                return None
            return env[0] + p["offset"], max(0, env[1] - p["offset"])
        env = p["tail"].lower_envelope
        if env is None:
            return None
        return env[0], max(env[1], len(p["prefix"]))

    @property
    def band_m0(self) -> Optional[float]:
        """A band parameter ``m0`` for which the weights sit in the band, or None."""
        r, p = self.rule, self.params
        if r == "band":
            return p["m0"]
        if r == "harmonic":
            c = p["c"]
            return float(max(1, math.ceil(c))) if c > -1 else None
        if r == "recfact":
            return 1.0 if p["s"] == 1 else None
        return self._numeric_band_m0()

    def _numeric_band_m0(self, horizon: int = 4000) -> Optional[float]:
        if not self.claimed_monotone:
            return None
        tail = self.params["tail"] if self.rule == "explicit" else None
        if tail is None or tail.band_m0 is None:
            return None
        n = np.arange(1, horizon + 1, dtype=float)
        for m0 in range(int(tail.band_m0), len(self.params["prefix"]) + int(tail.band_m0) + 2):
            lw = self.log_weights(m0 + 1, m0 + 1 + horizon)
            if np.all(lw <= -np.log(n) + 1e-15) and np.all(lw >= -np.log(n + 2 * m0) - 1e-15):
                return float(m0)
        return None

    def verify_monotone(self, horizon: Optional[int] = None, start: int = 0) -> bool:
        """Check ``w_{n+1} <= w_n`` for ``start <= n < horizon``."""
        horizon = self.horizon if horizon is None else horizon
        lw = self.log_weights(start, horizon + 1)
        return bool(np.all(np.diff(lw) <= 1e-15))

    def shifted(self, offset: int = 1) -> "WeightSequence":
        """The sequence ``n -> w_{n+offset}``."""
        return WeightSequence("shifted", {"base": self, "offset": offset}, horizon=self.horizon)

    def spec(self) -> str:
        r, p = self.rule, self.params
        if r == "harmonic":
            return f"harmonic:c={_fmt(p['c'])}"
        if r == "band":
            return f"band:m0={_fmt(p['m0'])},rule={p['rule']}"
        if r == "recfact":
            return f"recfact:s={_fmt(p['s'])}"
        if r == "shifted":
            return f"shifted:offset={p['offset']};base={p['base'].spec()}"
        prefix = ",".join(_fmt(v) for v in p["prefix"])
        return f"explicit:[{prefix}];tail={p['tail'].spec()}"

    def __repr__(self) -> str:
        return f"WeightSequence({self.spec()!r})"


def _band_first(m0: float) -> int:
    """First index ``j`` with ``j - m0 >= 1``."""
    return math.ceil(m0 + 1)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def harmonic(c: float = 1.0) -> WeightSequence:
    return WeightSequence("harmonic", {"c": c})


def band(m0: float = 1.0, rule: str = "mid") -> WeightSequence:
    return WeightSequence("band", {"m0": m0, "rule": rule})


def recfact(s: float = 1.0) -> WeightSequence:
    return WeightSequence("recfact", {"s": s})


def explicit(prefix, tail: WeightSequence, claimed_monotone: Optional[bool] = None) -> WeightSequence:
    return WeightSequence("explicit", {"prefix": tuple(prefix), "tail": tail}, claimed_monotone)


def _parse_kv(text: str) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise SpecParseError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_weights(text: str) -> WeightSequence:
    """Parse ``harmonic:c=1``, ``band:m0=2,rule=steps``, ``recfact:s=2`` or
    ``explicit:[1,0.5];tail=harmonic:c=2``."""
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip()
    try:
        if name == "harmonic":
            return harmonic(float(_parse_kv(rest).get("c", 1)))
        if name == "band":
            kv = _parse_kv(rest)
            return band(float(kv.get("m0", 1)), kv.get("rule", "mid"))
        if name == "recfact":
            return recfact(float(_parse_kv(rest).get("s", 1)))
        if name == "explicit":
            m = re.fullmatch(r"\s*\[([^\]]*)\]\s*;\s*tail\s*=\s*(.+)", rest)
            if not m:
                raise SpecParseError(f"bad explicit weights {text!r}")
            prefix = [float(v) for v in m.group(1).split(",") if v.strip()]
            return explicit(prefix, parse_weights(m.group(2)))
    except ValueError as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise SpecParseError(f"bad weight spec {text!r}: {exc}") from exc
    raise SpecParseError(f"unknown weight rule in {text!r}")


@dataclass(frozen=True)
class PNorm:
    """An exponent ``1 <= p < inf`` and its dual ``q`` (``inf`` when ``p = 1``)."""

    p: float

    def __post_init__(self):
        if not (1.0 <= self.p < math.inf):
            raise ValueError("p must satisfy 1 <= p < inf")

    @property
    def q(self) -> float:
        return math.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    @classmethod
    def of(cls, p) -> "PNorm":
        return p if isinstance(p, PNorm) else cls(float(p))


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    """A weighted shift of one of the three supported kinds on ``l^p``."""

    kind: str
    weights: WeightSequence
    p: PNorm = field(default_factory=lambda: PNorm(2.0))

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind)
        if kind is None:
            raise SpecParseError(f"unknown shift kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "p", PNorm.of(self.p))
        if kind == BILATERAL and not self.weights.claimed_monotone:
            raise HypothesisViolation("the bilateral block shift needs decreasing weights")
        if np.isnan(self.weights.log_weights(self.start, self.start + 64)).any():
            raise NonComputableSup(f"{self.weights.spec()} is undefined at an index a {kind} shift uses")

    @property
    def start(self) -> int:
        """Index of the first weight used (0 forward, 1 otherwise)."""
        return 0 if self.kind == FORWARD else 1

    def with_p(self, p) -> "ShiftOperator":
        p = PNorm.of(p)
        return self if p == self.p else ShiftOperator(self.kind, self.weights, p)

    def block_a(self) -> "ShiftOperator":
        """The forward part ``A`` of a bilateral shift, relabelled to start at 0."""
        return ShiftOperator(FORWARD, self.weights.shifted(1), self.p)

    def block_b(self) -> "ShiftOperator":
        return ShiftOperator(BACKWARD, self.weights, self.p)

    def spec(self) -> str:
        return f"{self.kind}:{self.weights.spec()}"

    def __repr__(self) -> str:
        return f"ShiftOperator({self.spec()!r}, p={_fmt(self.p.p)})"


def parse_shift(text: str, p=2.0) -> ShiftOperator:
    """Parse ``forward:harmonic:c=1`` style shift specs."""
    kind, sep, rest = text.strip().partition(":")
    if not sep or kind not in _KIND_ALIASES:
        raise SpecParseError(f"shift spec must start with forward/backward/bilateral: {text!r}")
    return ShiftOperator(kind, parse_weights(rest), PNorm.of(p))


def _convention_start(convention: str) -> int:
    if convention == FORWARD:
        return 0
    if convention == BACKWARD:
        return 1
    raise ValueError("convention must be 'forward' or 'backward'")


def beta_product(w: WeightSequence, n: int, convention: str = FORWARD) -> LogMagnitude:
    """``w_0 ... w_{n-1}`` (forward) or ``w_1 ... w_n`` (backward); 1 for ``n = 0``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return LogMagnitude.one()
    return LogMagnitude(float(w.log_products(_convention_start(convention), n)[n]))


def log_beta_array(w: WeightSequence, n_max: int, convention: str = FORWARD) -> np.ndarray:
    """``ln beta_k`` for ``k = 0..n_max``."""
    return w.log_products(_convention_start(convention), n_max)


def log_power_norms(t: ShiftOperator, n_max: int) -> np.ndarray:
    """``ln ||T^k||`` for ``k = 0..n_max``.

    For decreasing weights the supremum over windows is attained by the first
    window. For an explicit prefix followed by a decreasing tail, windows
    starting at or past the prefix end are dominated by the one starting
    there, so only finitely many windows are scanned.
    """
    w = t.weights
    if t.kind == BILATERAL:
        return np.array([_bilateral_power_norm(t, k) for k in range(n_max + 1)])
    s = t.start
    first = w.log_products(s, n_max)
    if w.claimed_monotone:
        return first
    if w.rule != "explicit":
        raise NonComputableSup(f"no eventual-monotonicity certificate for {w.spec()}")
    L = len(w.params["prefix"])
    best = first
    k_idx = np.arange(n_max + 1)
    w._ensure(L + n_max + 2)
    cum = w._cum0 if s == 0 else w._cum1
    for k in range(s + 1, L + 1):
        # window starting at k of length n
        if s == 0:
            win = cum[k + k_idx] - cum[k]
        else:
            win = cum[k - 1 + k_idx] - cum[k - 1]
        best = np.maximum(best, win)
    return best


def _bilateral_power_norm(t: ShiftOperator, n: int) -> float:
    if n == 0:
        return 0.0
    P = t.weights.log_products(1, n)
    # windows through the centre weight 1 take a weights on one side, n-1-a on the other
    centred = max(P[a] + P[n - 1 - a] for a in range(n))
    return float(max(P[n], centred))


def power_norm(t: ShiftOperator, n: int) -> LogMagnitude:
    """``||T^n||`` as the supremum of length-``n`` window products."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return LogMagnitude(float(log_power_norms(t, n)[n]))


@dataclass(frozen=True)
class QuasinilpotenceReport:
    """``(n, (1/n) ln ||T^n||)`` samples and two diagnostics.

    ``decreasing`` says the log-roots decrease over the tested range and
    ``below_threshold`` that the last one is below ``ln(threshold)``. This is
    a diagnostic, not a certificate of quasinilpotence.
    """

    values: tuple[tuple[int, float], ...]
    decreasing: bool
    below_threshold: bool
    threshold: float


def quasinilpotence_report(t: ShiftOperator, n_max: int, threshold: float = 0.5) -> QuasinilpotenceReport:
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    norms = log_power_norms(t, n_max)
    vals = tuple((n, float(norms[n] / n)) for n in range(1, n_max + 1))
    roots = np.array([v for _, v in vals])
    decreasing = bool(np.all(np.diff(roots) <= 1e-15))
    return QuasinilpotenceReport(vals, decreasing, bool(roots[-1] < math.log(threshold)), threshold)
