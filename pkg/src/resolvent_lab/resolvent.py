"""Resolvent action ``(z - T)^{-1} x`` for real ``z > 0`` and the three shift kinds.

All coefficients are produced as logarithms. Every norm comes with a bound on
the omitted mass: an evaluation reports a lower value ``norm`` (partial sum)
and ``truncation_error`` so that the true ``||(z-T)^{-1} x||_p^p`` lies in
``[norm^p, norm^p + truncation_error]``.

Forward shift
    ``c_k = (beta_k / z^k) sum_{n<=k} x_n beta_n^{-1} z^{n-1}``. Past the support
    of ``x`` consecutive coefficients have ratio ``w_k / z``, so the omitted
    tail is geometric once ``sup_{j>=k} w_j <= z/2``.
Backward shift
    With ``P(j) = w_1 ... w_j`` and ``y_j = P(j) x_j`` the ``n``-th coefficient
    is ``H(n) / P(n)`` where ``H(n) = z^{n-1} sum_{j>=n} y_j z^{-j}``; a reverse
    cumulative log-sum gives every ``H(n)`` at once. For infinite families the
    sum is started from both ends of a geometric bracket and the spread is
    counted in the error.
Bilateral block
    ``(z-T)^{-1} [x1; x2] = [(z-B)^{-1} x1; (z-A)^{-1}(x2 + phi e_1)]`` with
    ``phi = f_0((z-B)^{-1} x1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import BOrderViolation, HypothesisViolation, NotSummable, OverflowRisk, TruncationBudgetExceeded
from .logdomain import (
    LogMagnitude,
    condition_of_sub,
    cumlogsumexp,
    log_add,
    log_diff_array,
    log_sub,
    log_sub_checked,
    logsumexp,
    revcumlogsumexp,
)
from .shift_core import BACKWARD, BILATERAL, FORWARD, PNorm, ShiftOperator
from .vectors import VectorSpec, basis, log_vector_tail, vector_log_coefficients

__all__ = [
    "ResolventEvaluation",
    "TruncationPolicy",
    "DEFAULT_POLICY",
    "resolvent_apply",
    "forward_resolvent_apply",
    "forward_resolvent_basis_norm",
    "forward_basis_identity",
    "backward_resolvent_apply",
    "bilateral_resolvent_apply",
    "closed_form_f0",
    "f0_series",
    "tail_vector_f0",
    "dense_truncated_resolvent",
    "backward_basis_polynomial",
]

NEG_INF = -math.inf


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rule for series.

    ``tol`` is relative, on p-th powers. If ``k_max`` terms do not reach it,
    the evaluation is still accepted when the certified tail is below
    ``cap_tol`` (recorded in ``truncation_error``); otherwise it raises
    :class:`TruncationBudgetExceeded`.
    """

    tol: float = 1e-12
    k_max: int = 200_000
    cap_tol: float = 1e-6


DEFAULT_POLICY = TruncationPolicy()


def _policy(tol) -> TruncationPolicy:
    if tol is None:
        return DEFAULT_POLICY
    if isinstance(tol, TruncationPolicy):
        return tol
    return TruncationPolicy(tol=float(tol))


@dataclass(frozen=True)
class ResolventEvaluation:
    """Norm of a resolvent applied to a vector, with its truncation bound."""

    norm: LogMagnitude
    truncation_error: LogMagnitude
    terms_used: int
    p: float
    f0_value: Optional[LogMagnitude] = None
    ln_coefficients: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    ln_coefficients_bottom: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def norm_upper(self) -> LogMagnitude:
        """Upper bound ``(norm^p + truncation_error)^(1/p)``."""
        if math.isinf(self.p):
            return self.norm
        return (log_add(self.norm ** self.p, self.truncation_error)) ** (1.0 / self.p)

    @property
    def relative_error(self) -> float:
        """``truncation_error / norm^p``."""
        if self.truncation_error.is_zero:
            return 0.0
        if self.norm.is_zero:
            return math.inf
        return math.exp(self.truncation_error.ln_value - self.p * self.norm.ln_value)


# ---------------------------------------------------------------------------
# forward shift


def _signed_items(x: VectorSpec) -> list[tuple[int, float, float]]:
    return [(n, math.log(abs(a)), math.copysign(1.0, a)) for n, a in x.items()]


def _forward_log_coefficients(t: ShiftOperator, items, z: float, K: int):
    """``ln |c_k|`` for ``k = 0..K`` given signed log items ``(n, ln|a|, sign)``."""
    lnz = math.log(z)
    lb = t.weights.log_products(0, K)
    pos = np.full(K + 1, NEG_INF)
    neg = np.full(K + 1, NEG_INF)
    for n, la, sgn in items:
        if n > K:
            continue
        v = la - lb[n] + (n - 1) * lnz
        if sgn > 0:
            pos[n] = np.logaddexp(pos[n], v)
        else:
            neg[n] = np.logaddexp(neg[n], v)
    inner_pos = cumlogsumexp(pos)
    if np.all(neg == NEG_INF):
        inner = inner_pos
    else:
        inner, _ = log_diff_array(inner_pos, cumlogsumexp(neg))
    k = np.arange(K + 1)
    with np.errstate(invalid="ignore"):
        out = lb - k * lnz + inner
    return np.where(inner == NEG_INF, NEG_INF, out)


def _forward_from_items(t: ShiftOperator, items, z: float, p: float, policy: TruncationPolicy):
    if z <= 0:
        raise ValueError("z must be positive")
    if not items:
        return ResolventEvaluation(LogMagnitude.zero(), LogMagnitude.zero(), 0, p)
    n_max = max(n for n, _, _ in items)
    lnz = math.log(z)
    K = max(n_max + 32, int(4.0 / z) + 32)
    while True:
        K = min(K, policy.k_max)
        c = _forward_log_coefficients(t, items, z, K)
        k = np.arange(K + 1)
        log_rho = t.weights.log_tail_sup(k) - lnz
        if math.isinf(p):
            ok = np.nonzero((k >= n_max) & (log_rho <= 0.0))[0]
            if ok.size:
                Kc = int(ok[0])
                norm = float(np.max(c[: Kc + 1]))
                return ResolventEvaluation(LogMagnitude(norm), LogMagnitude.zero(), Kc + 1, p,
                                           ln_coefficients=c[: Kc + 1])
        else:
            S = cumlogsumexp(p * c)
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                tail = p * c + p * log_rho - np.log1p(-np.exp(p * log_rho))
            ready = (k >= n_max) & (log_rho <= -math.log(2.0))
            ok = np.nonzero(ready & (tail <= math.log(policy.tol) + S))[0]
            if ok.size:
                Kc = int(ok[0])
                return ResolventEvaluation(LogMagnitude(float(S[Kc] / p)), LogMagnitude(float(tail[Kc])),
                                           Kc + 1, p, ln_coefficients=c[: Kc + 1])
            if K >= policy.k_max:
                if ready[-1] and tail[-1] <= math.log(policy.cap_tol) + S[-1]:
                    return ResolventEvaluation(LogMagnitude(float(S[-1] / p)), LogMagnitude(float(tail[-1])),
                                               K + 1, p, ln_coefficients=c)
                raise TruncationBudgetExceeded(
                    f"forward series at z={z:g} needs more than {policy.k_max} terms")
        if K >= policy.k_max:
            raise TruncationBudgetExceeded(f"forward series at z={z:g} needs more than {policy.k_max} terms")
        K *= 2


def forward_resolvent_apply(t: ShiftOperator, x: VectorSpec, z: float, tol=None, p=None) -> ResolventEvaluation:
    """``||(z - T)^{-1} x||_p`` for a forward shift and a finitely supported ``x``."""
    if t.kind != FORWARD:
        raise HypothesisViolation("forward_resolvent_apply needs a forward shift")
    if not x.is_finite:
        raise HypothesisViolation("forward resolvents are evaluated on finitely supported vectors")
    pp = t.p.p if p is None else _p_value(p)
    return _forward_from_items(t, _signed_items(x), z, pp, _policy(tol))


def _p_value(p) -> float:
    if isinstance(p, PNorm):
        return p.p
    return float(p)


def forward_resolvent_basis_norm(t: ShiftOperator, n: int, z: float, p=None, tol=None) -> ResolventEvaluation:
    """``||(z - T)^{-1} e_n||_p``; ``p`` may be ``inf`` (largest coefficient)."""
    return forward_resolvent_apply(t, basis(n), z, tol, p)


def forward_basis_identity(t: ShiftOperator, n: int, z: float, p=None, tol=None) -> LogMagnitude:
    """The same norm through ``||R e_n||^p = beta_n^{-p} z^{pn} (||R e_0||^p - sum_{k<n} beta_k^p z^{-p(k+1)})``.

    The subtraction is done with :func:`log_sub`, so it warns on cancellation.
    """
    pp = t.p.p if p is None else _p_value(p)
    e0 = forward_resolvent_basis_norm(t, 0, z, pp, tol)
    if n == 0:
        return e0.norm
    lb = t.weights.log_products(0, n)
    lnz = math.log(z)
    head = logsumexp(pp * (lb[:n] - (np.arange(n) + 1) * lnz))
    diff = log_sub(e0.norm ** pp, LogMagnitude(head))
    if diff.is_zero:
        return diff
    return LogMagnitude((diff.ln_value - pp * lb[n] + pp * n * lnz) / pp)


# ---------------------------------------------------------------------------
# backward shift


class _Family:
    """Per-family ingredients of the backward recurrence."""

    def __init__(self, x: VectorSpec, t: ShiftOperator, p: float):
        self.x, self.w, self.p = x, t.weights, p
        self.finite = x.is_finite
        if x.family == "xr":
            self.r, self.m = x.params
        elif x.family == "tail":
            (self.m,) = x.params

    def ln_y(self, N: int) -> np.ndarray:
        """``ln (P(j) x_j)`` for ``j = 0..N``."""
        j = np.arange(N + 1)
        if self.x.family == "xr":
            out = j * math.log(self.r) - gammaln(j + self.m + 1)
            out[0] = 0.0
            return out
        if self.x.family == "tail":
            return self.w.log_products(1, N + self.m)[j + self.m]
        lP = self.w.log_products(1, N)
        return vector_log_coefficients(self.x, self.w, N) + lP

    def log_rho(self, j: np.ndarray) -> np.ndarray:
        """``ln sup_{i>=j} y_{i+1}/y_i``; valid for ``j >= 1``."""
        j = np.asarray(j)
        if self.x.family == "xr":
            return math.log(self.r) - np.log(j + self.m + 1.0)
        return self.w.log_tail_sup(j + self.m + 1)

    def first_ready(self, z: float) -> int:
        """Smallest ``N >= 1`` with ``rho_N <= z/2`` (doubling search)."""
        target = math.log(z / 2)
        if self.x.family == "xr":
            return max(1, math.ceil(2 * self.r / z - self.m - 1))
        N = 16
        while True:
            j = np.arange(1, N + 1)
            ok = np.nonzero(self.log_rho(j) <= target)[0]
            if ok.size:
                return int(j[ok[0]])
            N *= 2
            if N > 10**7:
                raise NotSummable("weights do not fall below z/2")


def backward_resolvent_apply(t: ShiftOperator, x: VectorSpec, z: float, tol=None, p=None) -> ResolventEvaluation:
    """``||(z - T)^{-1} x||_p`` for a backward shift.

    Finitely supported ``x`` gives an exact finite sum. ``xr`` and ``tail``
    vectors use the backward recurrence with a certified bound on the
    coefficients past the truncation index (``f_n <= x_n / (z - rho_n)``).
    """
    if t.kind != BACKWARD:
        raise HypothesisViolation("backward_resolvent_apply needs a backward shift")
    if z <= 0:
        raise ValueError("z must be positive")
    pp = t.p.p if p is None else _p_value(p)
    policy = _policy(tol)
    if x.is_zero:
        return ResolventEvaluation(LogMagnitude.zero(), LogMagnitude.zero(), 0, pp, LogMagnitude.zero())
    fam = _Family(x, t, pp)
    lnz = math.log(z)
    if fam.finite:
        N = x.items()[-1][0]
        lws = fam.ln_y(N) - np.arange(N + 1) * lnz
        lnH = (np.arange(N + 1) - 1) * lnz + revcumlogsumexp(lws)
        lnf = lnH - t.weights.log_products(1, N)
        norm = logsumexp(pp * lnf) / pp
        return ResolventEvaluation(LogMagnitude(norm), LogMagnitude.zero(), N + 1, pp,
                                   LogMagnitude(float(lnf[0])), ln_coefficients=lnf)

    N = max(2 * fam.first_ready(z), 64)
    while True:
        N = min(N, policy.k_max)
        j = np.arange(N + 1)
        lws = fam.ln_y(N) - j * lnz
        lrho_N = float(fam.log_rho(np.array([N]))[0])
        start_lo = lws[N]
        start_hi = lws[N] - math.log1p(-math.exp(lrho_N - lnz))
        body = lws[:N]
        rev_lo = revcumlogsumexp(np.append(body, start_lo))
        rev_hi = revcumlogsumexp(np.append(body, start_hi))
        lP = t.weights.log_products(1, N)
        lnf_lo = (j - 1) * lnz + rev_lo - lP
        lnf_hi = (j - 1) * lnz + rev_hi - lP
        S_lo = cumlogsumexp(pp * lnf_lo)
        S_hi = cumlogsumexp(pp * lnf_hi)
        spread, _ = log_diff_array(S_hi, S_lo)
        lrho = fam.log_rho(np.maximum(j, 1))
        with np.errstate(invalid="ignore", divide="ignore"):
            tail = -pp * (lnz + np.log(-np.expm1(lrho - lnz))) + log_vector_tail(x, t.weights, pp, j)
        tail = np.where((j >= 1) & (lrho <= lnz - math.log(2.0)), tail, np.inf)
        err = np.logaddexp(tail, spread)
        ok = np.nonzero(err <= math.log(policy.tol) + S_lo)[0]
        if ok.size:
            K = int(ok[0])
            return ResolventEvaluation(LogMagnitude(float(S_lo[K] / pp)), LogMagnitude(float(err[K])), K + 1, pp,
                                       LogMagnitude(float(lnf_lo[0])), ln_coefficients=lnf_lo[: K + 1])
        if N >= policy.k_max:
            finite_err = np.isfinite(err)
            if finite_err.any():
                K = int(np.argmin(np.where(finite_err, err - S_lo, np.inf)))
                if err[K] <= math.log(policy.cap_tol) + S_lo[K]:
                    return ResolventEvaluation(LogMagnitude(float(S_lo[K] / pp)), LogMagnitude(float(err[K])),
                                               K + 1, pp, LogMagnitude(float(lnf_lo[0])),
                                               ln_coefficients=lnf_lo[: K + 1])
            if not np.isfinite(log_vector_tail(x, t.weights, pp, j[-1:])).any():
                raise NotSummable(f"no l^{pp:g} tail certificate for {x.label()} with {t.weights.spec()}")
            raise TruncationBudgetExceeded(f"backward series at z={z:g} needs more than {policy.k_max} terms")
        N *= 2


# ---------------------------------------------------------------------------
# first coordinate in closed form


def f0_series(r: float, m: int, z: float, tol: float = 1e-16) -> LogMagnitude:
    """``f_0((z-T)^{-1} x_r) = (1/z)(1 + sum_{k>=1} (r/z)^k / (k+m)!)`` summed term by term."""
    if z <= 0:
        raise ValueError("z must be positive")
    lt = math.log(r / z)
    K = int(2 * r / z) + 64
    while True:
        k = np.arange(1, K + 1)
        terms = k * lt - gammaln(k + m + 1)
        S = np.logaddexp(0.0, logsumexp(terms))
        ratio = r / z / (K + m + 1)
        if ratio <= 0.5 and terms[-1] - math.log1p(-ratio) + math.log(ratio) <= math.log(tol) + S:
            return LogMagnitude(S - math.log(z))
        K *= 2


def closed_form_f0(r: float, m: int, z: float, fallback: bool = True) -> LogMagnitude:
    """``1/z + (z^{m-1}/r^m)(e^{r/z} - sum_{n<=m} (r/z)^n/n!)`` in log form.

    Falls back to :func:`f0_series` when the subtraction is ill-conditioned,
    unless ``fallback`` is false.
    """
    if z <= 0 or not (0 < r <= 1) or m < 1:
        raise ValueError("need z > 0, 0 < r <= 1, m >= 1")
    lt = math.log(r / z)
    n = np.arange(m + 1)
    a = LogMagnitude(r / z)
    b = LogMagnitude(logsumexp(n * lt - gammaln(n + 1)))
    if b >= a:
        if fallback:
            return f0_series(r, m, z)
        raise BOrderViolation("exponential and its Taylor polynomial coincide in floating point")
    diff, cancelled = log_sub_checked(a, b)
    second = LogMagnitude((m - 1) * math.log(z) - m * math.log(r)) * diff
    total = log_add(LogMagnitude(-math.log(z)), second)
    share = math.exp(second.ln_value - total.ln_value)
    if fallback and (cancelled or 8 * 2.2e-16 * condition_of_sub(a, b) * share > 1e-12):
        return f0_series(r, m, z)
    return total


def tail_vector_f0(t: ShiftOperator, m: int, z: float, tol=None) -> LogMagnitude:
    """``alpha_0/z + z^m sum_{k>m} P(k)/z^{k+1}`` for the tail vector of a backward shift."""
    if t.kind != BACKWARD:
        raise HypothesisViolation("tail_vector_f0 needs a backward shift")
    policy = _policy(tol)
    lnz = math.log(z)
    K = max(m + 64, int(4.0 / z) + m + 64)
    while True:
        K = min(K, policy.k_max)
        lP = t.weights.log_products(1, K)
        k = np.arange(m + 1, K + 1)
        terms = lP[k] - (k + 1) * lnz
        S = np.logaddexp(lP[m] - lnz, m * lnz + cumlogsumexp(terms))
        lrho = t.weights.log_tail_sup(k + 1) - lnz
        with np.errstate(invalid="ignore", divide="ignore"):
            tail = m * lnz + terms + lrho - np.log1p(-np.exp(lrho))
        ok = np.nonzero((lrho <= -math.log(2.0)) & (tail <= math.log(policy.tol) + S))[0]
        if ok.size:
            return LogMagnitude(float(S[ok[0]]))
        if K >= policy.k_max:
            raise TruncationBudgetExceeded(f"tail vector f0 at z={z:g} needs more than {policy.k_max} terms")
        K *= 2


def backward_basis_polynomial(t: ShiftOperator, m: int, z: float, p=None) -> LogMagnitude:
    """``||(z-T)^{-1} e_m||_p`` from ``z^{-p} + sum_{i=1}^m (w_m ... w_{m-i+1} / z^{i+1})^p``."""
    pp = t.p.p if p is None else _p_value(p)
    lnz = math.log(z)
    lw = t.weights.log_weights(1, m + 1)[::-1]  # w_m, w_{m-1}, ..., w_1
    prods = np.concatenate(([0.0], np.cumsum(lw)))
    i = np.arange(m + 1)
    return LogMagnitude(logsumexp(pp * (prods - (i + 1) * lnz)) / pp)


# ---------------------------------------------------------------------------
# bilateral block shift


def bilateral_resolvent_apply(t: ShiftOperator, x: VectorSpec, z: float, tol=None, p=None) -> ResolventEvaluation:
    """Norm of ``(z-T)^{-1} x`` for the bilateral block shift and ``x = stack(top, bottom)``.

    ``f0_value`` holds ``phi = f_0((z-B)^{-1} top)``, the coefficient that
    couples the backward block into the forward one.
    """
    if t.kind != BILATERAL:
        raise HypothesisViolation("bilateral_resolvent_apply needs the bilateral block shift")
    if x.family != "stack":
        raise HypothesisViolation("bilateral vectors are stacks")
    pp = t.p.p if p is None else _p_value(p)
    B, A = t.block_b(), t.block_a()
    top, bottom = x.top, x.bottom
    if top.is_zero:
        top_eval = ResolventEvaluation(LogMagnitude.zero(), LogMagnitude.zero(), 0, pp, LogMagnitude.zero())
        phi_lo = phi_hi = NEG_INF
    else:
        top_eval = backward_resolvent_apply(B, top, z, tol, pp)
        phi_lo = top_eval.f0_value.ln_value
        phi_hi = phi_lo
        if not top_eval.truncation_error.is_zero:
            # f_0 is one of the summed coordinates, so its p-th power gap is covered by the error
            phi_hi = float(np.logaddexp(pp * phi_lo, top_eval.truncation_error.ln_value) / pp)
    items = [(n - 1, math.log(abs(a)), math.copysign(1.0, a)) for n, a in bottom.items()]
    if phi_lo != NEG_INF:
        if items:
            items.append((0, phi_lo, 1.0))
            bot = _forward_from_items(A, items, z, pp, _policy(tol))
            bot_err = bot.truncation_error
            ln_bottom = bot.ln_coefficients
            bot_norm = bot.norm
        else:
            u = _forward_from_items(A, [(0, 0.0, 1.0)], z, pp, _policy(tol))
            bot_norm = LogMagnitude(phi_lo) * u.norm
            # phi_hi^p (|u|^p + err_u) - phi_lo^p |u|^p, with phi_hi^p - phi_lo^p <= top error
            bot_err = log_add(LogMagnitude(pp * phi_hi) * u.truncation_error,
                              top_eval.truncation_error * u.norm ** pp)
            ln_bottom = phi_lo + u.ln_coefficients
    else:
        bot = _forward_from_items(A, items, z, pp, _policy(tol))
        bot_norm, bot_err, ln_bottom = bot.norm, bot.truncation_error, bot.ln_coefficients
    norm = log_add(top_eval.norm ** pp, bot_norm ** pp) ** (1.0 / pp)
    err = log_add(top_eval.truncation_error, bot_err)
    return ResolventEvaluation(norm, err, top_eval.terms_used + ln_bottom.size, pp,
                               top_eval.f0_value, top_eval.ln_coefficients, ln_bottom)


def resolvent_apply(t: ShiftOperator, x: VectorSpec, z: float, tol=None, p=None) -> ResolventEvaluation:
    """Dispatch on the shift kind."""
    if t.kind == FORWARD:
        return forward_resolvent_apply(t, x, z, tol, p)
    if t.kind == BACKWARD:
        return backward_resolvent_apply(t, x, z, tol, p)
    return bilateral_resolvent_apply(t, x, z, tol, p)


# ---------------------------------------------------------------------------
# dense oracle

_OVERFLOW_LN = 600.0


def _plain_coefficients(x, weights, N: int) -> np.ndarray:
    if not isinstance(x, VectorSpec):
        arr = np.asarray(x)
        out = np.zeros(N + 1, dtype=arr.dtype if np.iscomplexobj(arr) else float)
        out[: min(arr.size, N + 1)] = arr[: N + 1]
        return out
    out = np.zeros(N + 1)
    if x.is_finite:
        for n, a in x.items():
            if n <= N:
                out[n] = a
        return out
    with np.errstate(over="ignore"):
        return np.exp(vector_log_coefficients(x, weights, N))


def dense_truncated_resolvent(t: ShiftOperator, N: int, z: complex, x):
    """Solve the ``(N+1)``-dimensional truncation of ``(z - T) c = x`` by substitution.

    Plain floating point, independent of the log-domain series. Unilateral
    shifts return ``c_0..c_N``; the bilateral shift returns ``(top, bottom)``
    with ``top[n]`` the coefficient of ``e_{-n}`` (``n = 0..N``) and
    ``bottom[i-1]`` that of ``e_i`` (``i = 1..N``). ``z`` may be complex, and
    for unilateral shifts ``x`` may be a plain (complex) coefficient array.
    """
    if z == 0:
        raise ValueError("z must be nonzero")
    limit = math.exp(_OVERFLOW_LN)
    w = t.weights
    dtype = complex if isinstance(z, complex) or (not isinstance(x, VectorSpec) and np.iscomplexobj(x)) else float

    def check(v):
        if not np.isfinite(v) or abs(v) > limit:
            raise OverflowRisk("resolvent coefficients exceed the plain floating point range")
        return v

    if t.kind == FORWARD:
        wts = np.exp(w.log_weights(0, N + 1))
        xs = _plain_coefficients(x, w, N)
        c = np.zeros(N + 1, dtype=dtype)
        c[0] = check(xs[0] / z)
        for k in range(1, N + 1):
            c[k] = check((xs[k] + wts[k - 1] * c[k - 1]) / z)
        return c
    if t.kind == BACKWARD:
        wts = np.exp(w.log_weights(0, N + 2))
        xs = _plain_coefficients(x, w, N)
        c = np.zeros(N + 1, dtype=dtype)
        c[N] = check(xs[N] / z)
        for k in range(N - 1, -1, -1):
            c[k] = check((xs[k] + wts[k + 1] * c[k + 1]) / z)
        return c
    # bilateral: a forward shift on indices -N..N with weight 1 at index 0
    wts = np.exp(w.log_weights(0, N + 1))
    omega = np.concatenate((wts[N:0:-1], [1.0], wts[1:N + 1]))  # index i -> position i + N
    top = _plain_coefficients(x.top, w, N)
    xs = np.zeros(2 * N + 1)
    xs[: N + 1] = top[::-1]
    for i, a in x.bottom.items():
        if i <= N:
            xs[N + i] = a
    c = np.zeros(2 * N + 1, dtype=dtype)
    c[0] = check(xs[0] / z)
    for pos in range(1, 2 * N + 1):
        c[pos] = check((xs[pos] + omega[pos - 1] * c[pos - 1]) / z)
    return c[N::-1].copy(), c[N + 1:].copy()
