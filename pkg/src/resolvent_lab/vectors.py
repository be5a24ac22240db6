"""Vector families acted on by the resolvents, and their string specs."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import NotSummable, SpecParseError
from .shift_core import WeightSequence

__all__ = [
    "VectorSpec",
    "basis",
    "finite",
    "tail_vector",
    "xr_family",
    "stack",
    "zero",
    "parse_vector",
    "vector_log_coefficients",
    "vector_norm_bounds",
]

_FAMILIES = ("basis", "finite", "tail", "xr", "stack", "zero")


@dataclass(frozen=True)
class VectorSpec:
    """A vector described by family and parameters.

    ``basis(n)``
        ``e_n``.
    ``finite(items)``
        ``sum a_i e_{n_i}`` over ``(n_i, a_i)`` pairs.
    ``tail_vector(m)``
        Coefficients ``prod_{j=1}^m w_{n+j}``.
    ``xr_family(r, m)``
        ``a_0 = 1`` and ``a_n = r^n / ((n+m)! w_1 ... w_n)``.
    ``stack(top, bottom)``
        A bilateral vector: ``top`` lives on ``e_0, e_{-1}, ...`` (its index
        ``n`` is ``e_{-n}``), ``bottom`` on ``e_1, e_2, ...`` with its own
        indices, so ``bottom`` may not use index 0.
    """

    family: str
    params: tuple = ()

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise SpecParseError(f"unknown vector family {self.family!r}")

    @property
    def is_zero(self) -> bool:
        if self.family == "zero":
            return True
        if self.family == "finite":
            return all(a == 0 for _, a in self.params)
        return False

    @property
    def is_finite(self) -> bool:
        return self.family in ("basis", "finite", "zero")

    def items(self) -> list[tuple[int, float]]:
        """Sorted nonzero ``(index, coefficient)`` pairs of a finitely supported vector."""
        if self.family == "basis":
            return [(int(self.params[0]), 1.0)]
        if self.family == "finite":
            acc: dict[int, float] = {}
            for n, a in self.params:
                acc[int(n)] = acc.get(int(n), 0.0) + float(a)
            return sorted((n, a) for n, a in acc.items() if a != 0.0)
        if self.family == "zero":
            return []
        raise TypeError(f"{self.family} vectors are not finitely supported")

    @property
    def top(self) -> "VectorSpec":
        return self.params[0]

    @property
    def bottom(self) -> "VectorSpec":
        return self.params[1]

    def label(self) -> str:
        f, p = self.family, self.params
        if f == "basis":
            return f"e:{p[0]}"
        if f == "finite":
            inner = ",".join(f"({n},{_num(a)})" for n, a in p)
            return f"finite:[{inner}]"
        if f == "tail":
            return f"tail:m={p[0]}"
        if f == "xr":
            return f"xr:r={_num(p[0])},m={p[1]}"
        if f == "zero":
            return "zero"
        return f"stack:top={p[0].label()};bottom={p[1].label()}"

    def __str__(self) -> str:
        return self.label()


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def basis(n: int) -> VectorSpec:
    if n < 0:
        raise ValueError("basis index must be >= 0")
    return VectorSpec("basis", (int(n),))


def finite(items) -> VectorSpec:
    items = tuple((int(n), float(a)) for n, a in items)
    if any(n < 0 for n, _ in items):
        raise ValueError("indices must be >= 0")
    return VectorSpec("finite", items)


def tail_vector(m: int) -> VectorSpec:
    if m < 1:
        raise ValueError("tail vector needs m >= 1")
    return VectorSpec("tail", (int(m),))


def xr_family(r: float, m: int) -> VectorSpec:
    if not (0 < r <= 1):
        raise ValueError("xr family needs 0 < r <= 1")
    if m < 1:
        raise ValueError("xr family needs m >= 1")
    return VectorSpec("xr", (float(r), int(m)))


def stack(top: VectorSpec, bottom: VectorSpec) -> VectorSpec:
    if top.family == "stack" or bottom.family == "stack":
        raise ValueError("stacks do not nest")
    if not bottom.is_finite:
        raise ValueError("the bottom (forward) part of a stack must be finitely supported")
    if any(n == 0 for n, _ in bottom.items()):
        raise ValueError("bottom part indices start at 1")
    return VectorSpec("stack", (top, bottom))


def zero() -> VectorSpec:
    return VectorSpec("zero", ())


def parse_vector(text: str) -> VectorSpec:
    """Parse ``e:3``, ``xr:r=0.5,m=5``, ``tail:m=4``, ``zero``,
    ``finite:[(0,1),(2,0.5)]`` or ``stack:top=xr:r=0.5,m=5;bottom=zero``."""
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip()
    try:
        if name in ("e", "basis"):
            return basis(int(rest))
        if name == "zero":
            return zero()
        if name == "tail":
            return tail_vector(int(_kv(rest)["m"]))
        if name == "xr":
            kv = _kv(rest)
            return xr_family(float(kv["r"]), int(kv["m"]))
        if name == "finite":
            pairs = re.findall(r"\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)", rest)
            if not pairs:
                raise SpecParseError(f"no (index, value) pairs in {text!r}")
            return finite((int(n), float(a)) for n, a in pairs)
        if name == "stack":
            m = re.fullmatch(r"\s*top\s*=\s*(.+?)\s*;\s*bottom\s*=\s*(.+)", rest)
            if not m:
                raise SpecParseError(f"bad stack spec {text!r}")
            return stack(parse_vector(m.group(1)), parse_vector(m.group(2)))
    except (KeyError, ValueError) as exc:
        if isinstance(exc, SpecParseError):
            raise
        raise SpecParseError(f"bad vector spec {text!r}: {exc}") from exc
    raise SpecParseError(f"unknown vector family in {text!r}")


def _kv(text: str) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        k, _, v = item.partition("=")
        out[k.strip()] = v.strip()
    return out


def vector_log_coefficients(x: VectorSpec, weights: WeightSequence, n_max: int) -> np.ndarray:
    """``ln |x_n|`` for ``n = 0..n_max`` (unilateral families only)."""
    n = np.arange(n_max + 1)
    if x.family == "xr":
        r, m = x.params
        lP = weights.log_products(1, n_max)
        out = n * math.log(r) - gammaln(n + m + 1) - lP
        out[0] = 0.0
        return out
    if x.family == "tail":
        (m,) = x.params
        lP = weights.log_products(1, n_max + m)
        return lP[n + m] - lP[n]
    out = np.full(n_max + 1, -np.inf)
    for k, a in x.items():
        if k <= n_max:
            out[k] = math.log(abs(a))
    return out


def log_vector_tail(x: VectorSpec, weights: WeightSequence, p: float, K: np.ndarray) -> np.ndarray:
    """Upper bounds on ``ln sum_{n>K} |x_n|^p`` for each ``K`` (``-inf`` for finite support).

    ``xr`` uses the lower envelope ``w_j >= 1/(j+b)``: the coefficient ratio
    is then at most ``r (n+1+b)/(n+m+1)``, giving a geometric bound for
    ``r < 1`` and a power-law bound when ``p (m-b) > 1``. ``tail`` uses the
    upper envelope ``w_j <= 1/(j-a)`` and the integral of ``(n+1-a)^(-mp)``.
    Entries where no certificate applies are ``+inf``.
    """
    K = np.asarray(K, dtype=int)
    if x.is_finite:
        items = x.items()
        top = items[-1][0] if items else -1
        return np.where(K >= top, -np.inf, np.inf)
    if x.family == "xr":
        r, m = x.params
        env = weights.lower_envelope
        if env is None:
            return np.full(K.shape, np.inf)
        b, j0 = env
        la = vector_log_coefficients(x, weights, int(K.max()))[K]
        bounds = []
        if b <= m and r < 1:
            bounds.append(np.full(K.shape, p * math.log(r) - math.log1p(-r**p)))
        s = p * (m - b)
        if b <= m and s > 1:
            bounds.append(np.log(K + 1.0 + m) - math.log(s - 1))
        if not bounds:
            return np.full(K.shape, np.inf)
        lb = np.minimum.reduce(bounds) if len(bounds) > 1 else bounds[0]
        ok = (K >= max(j0 - 1, 1))
        return np.where(ok, p * la + lb, np.inf)
    if x.family == "tail":
        (m,) = x.params
        env = weights.upper_envelope
        if env is None or m * p <= 1:
            return np.full(K.shape, np.inf)
        a, j0 = env
        base = K + 1.0 - a
        ok = (K + 1 >= j0) & (base > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (1 - m * p) * np.log(np.where(base > 0, base, 1.0)) - math.log(m * p - 1)
        return np.where(ok, val, np.inf)
    raise TypeError(f"no tail bound for {x.family} vectors")


def vector_norm_bounds(x: VectorSpec, weights: Optional[WeightSequence], p: float,
                       tol: float = 1e-12, n_cap: int = 200_000) -> tuple[float, float]:
    """``(ln lower, ln upper)`` for ``||x||_p``; a stack adds both parts' p-th powers."""
    if x.family == "stack":
        lo_t, hi_t = vector_norm_bounds(x.top, weights, p, tol, n_cap)
        lo_b, hi_b = vector_norm_bounds(x.bottom, weights, p, tol, n_cap)
        lo = np.logaddexp(p * lo_t, p * lo_b) / p
        hi = np.logaddexp(p * hi_t, p * hi_b) / p
        return float(lo), float(hi)
    if x.is_finite:
        items = x.items()
        if not items:
            return -math.inf, -math.inf
        v = math.log(sum(abs(a) ** p for _, a in items)) / p
        return v, v
    n = 64
    while True:
        la = vector_log_coefficients(x, weights, n)
        S = np.logaddexp.accumulate(p * la)
        tail = log_vector_tail(x, weights, p, np.arange(n + 1))
        good = np.nonzero(tail <= math.log(tol) + S)[0]
        if good.size:
            return _widen(S, tail, int(good[0]), p)
        if n >= n_cap:
            finite_tail = np.isfinite(tail)
            if not finite_tail.any():
                raise NotSummable(f"{x.label()} has no summability certificate for {weights.spec()}")
            return _widen(S, tail, n, p)
        n *= 4


def _widen(S: np.ndarray, tail: np.ndarray, k: int, p: float) -> tuple[float, float]:
    # the running log-sum has rounding error of order (k+1) eps, relative
    slack = math.log1p(4.0 * (k + 1) * np.finfo(float).eps)
    return float((S[k] - slack) / p), float((np.logaddexp(S[k], tail[k]) + slack) / p)
