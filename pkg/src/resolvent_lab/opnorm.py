"""Two-sided bounds on ``ln ||(z - T)^{-1}||``.

The upper bound is the Neumann majorant ``sum_k ||T^k|| / z^{k+1}``; the lower
bound is the best probe ratio ``||(z-T)^{-1} x|| / ||x||``. For the bilateral
block shift both sides are assembled from the blocks, with the coupling block
``(z-A)^{-1} e_1 (x) f_0 (z-B)^{-1}`` evaluated exactly as a rank-one operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import HypothesisViolation, NotSummable, TruncationBudgetExceeded
from .logdomain import LogMagnitude, cumlogsumexp, log_add
from .resolvent import (
    DEFAULT_POLICY,
    ResolventEvaluation,
    TruncationPolicy,
    _policy,
    forward_resolvent_basis_norm,
    resolvent_apply,
)
from .shift_core import BACKWARD, BILATERAL, FORWARD, PNorm, ShiftOperator, log_power_norms
from .vectors import VectorSpec, basis, stack, vector_norm_bounds, xr_family, zero

__all__ = [
    "NormEnclosure",
    "opnorm_upper",
    "opnorm_lower",
    "bilateral_enclosure",
    "enclosure",
    "default_probes",
    "RANK_ONE_PROBE",
    "cached_apply",
]

#: Label of the bilateral lower bound from the coupling block.
RANK_ONE_PROBE = "rank-one-block"


@dataclass(frozen=True)
class NormEnclosure:
    """``lower <= ||(z-T)^{-1}|| <= upper`` and the probe that gave ``lower``."""

    lower: LogMagnitude
    upper: LogMagnitude
    probe_achieving_lower: str

    def __post_init__(self):
        if self.lower.ln_value > self.upper.ln_value * (1 + 1e-13) + 1e-13:
            raise ValueError(f"enclosure out of order: {self.lower} > {self.upper}")

    @property
    def width(self) -> float:
        """``ln upper - ln lower``."""
        return self.upper.ln_value - self.lower.ln_value

    @property
    def tightness(self) -> float:
        """``ln lower / ln upper``."""
        return self.lower.ln_value / self.upper.ln_value


def _is_l1_identity(t: ShiftOperator, p: float) -> bool:
    return t.kind == FORWARD and p == 1.0 and bool(t.weights.claimed_monotone)


@lru_cache(maxsize=8192)
def _cached_apply(t: ShiftOperator, x: VectorSpec, z: float, p: float, policy: TruncationPolicy) -> ResolventEvaluation:
    return resolvent_apply(t, x, z, policy, p)


def cached_apply(t: ShiftOperator, x: VectorSpec, z: float, p=None, tol=None) -> ResolventEvaluation:
    """Memoised :func:`resolvent_apply` (evaluations are pure)."""
    pp = t.p.p if p is None else PNorm.of(p).p
    return _cached_apply(t, x, float(z), pp, _policy(tol))


def _neumann(t: ShiftOperator, z: float, policy: TruncationPolicy) -> LogMagnitude:
    """``sum_k ||T^k|| z^{-k-1}`` for a unilateral shift, plus its geometric tail.

    Past ``K`` every window of length ``K + j`` splits into one of length ``K``
    and ``j`` weights with index ``>= K + start``, which bounds the tail by a
    geometric series with ratio ``sup_{i >= K+start} w_i / z``.
    """
    lnz = math.log(z)
    K = int(4.0 / z) + 64
    while True:
        K = min(K, policy.k_max)
        lpn = log_power_norms(t, K)
        k = np.arange(K + 1)
        terms = lpn - (k + 1) * lnz
        S = cumlogsumexp(terms)
        lrho = t.weights.log_tail_sup(k + t.start) - lnz
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            tail = terms + lrho - np.log1p(-np.exp(lrho))
        ready = lrho <= -math.log(2.0)
        ok = np.nonzero(ready & (tail <= math.log(policy.tol) + S))[0]
        if ok.size:
            i = int(ok[0])
            return LogMagnitude(float(np.logaddexp(S[i], tail[i])))
        if K >= policy.k_max:
            if ready[-1] and tail[-1] <= math.log(policy.cap_tol) + S[-1]:
                return LogMagnitude(float(np.logaddexp(S[-1], tail[-1])))
            raise TruncationBudgetExceeded(f"Neumann series at z={z:g} needs more than {policy.k_max} terms")
        K *= 2


def _rank_one(t: ShiftOperator, z: float, p: float, policy: TruncationPolicy):
    """``(||u||_p, ||f_0 (z-B)^{-1}||_q)`` as evaluations, ``u = (z-A)^{-1} e_1``.

    The functional ``x -> f_0((z-B)^{-1} x)`` has coefficients ``P(j) / z^{j+1}``,
    which is the forward resolvent of ``e_0`` for ``A``; its dual norm is that
    sequence in ``l^q``.
    """
    A = t.block_a()
    q = PNorm(p).q
    u = _cached_apply(A, basis(0), z, p, policy)
    g = forward_resolvent_basis_norm(A, 0, z, q, policy)
    return u, g


def opnorm_upper(t: ShiftOperator, z: float, tol=None, p=None) -> LogMagnitude:
    """Upper bound on ``||(z - T)^{-1}||``.

    Forward shifts on ``l^1`` with decreasing weights return ``||(z-T)^{-1} e_0||_1``,
    which equals the operator norm. Bilateral shifts add the larger Neumann
    bound of the two diagonal blocks to the norm of the coupling block.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    pp = t.p.p if p is None else PNorm.of(p).p
    policy = _policy(tol)
    if _is_l1_identity(t, pp):
        return _cached_apply(t, basis(0), float(z), pp, policy).norm
    if t.kind == BILATERAL:
        return _bilateral_upper(t, z, pp, policy)
    return _neumann(t, z, policy)


def _bilateral_upper(t: ShiftOperator, z: float, p: float, policy: TruncationPolicy) -> LogMagnitude:
    u, g = _rank_one(t, z, p, policy)
    coupling = u.norm_upper * g.norm_upper
    # the diagonal blocks act on complementary coordinates, so their norms combine by max
    diagonal = max(_neumann(t.block_a(), z, policy), _neumann(t.block_b(), z, policy))
    return log_add(diagonal, coupling)


def default_probes(t: ShiftOperator, p=None) -> list:
    """Default lower-bound probes.

    Forward: ``e_0``. Backward: ``e_0`` and ``x_1`` with the two smallest
    ``m`` for which it is ``p``-summable (``m > b + 1/p`` when
    ``w_j >= 1/(j+b)``); smaller ``m`` gives a tighter bound. Bilateral: the
    coupling block and ``stack(xi_1, 0)``.
    """
    pp = t.p.p if p is None else PNorm.of(p).p
    if t.kind == FORWARD:
        return [basis(0)]
    env = t.weights.lower_envelope
    m = int(math.floor(env[0] + 1.0 / pp)) + 1 if env is not None else 3
    m = max(m, 1)
    if t.kind == BACKWARD:
        return [basis(0), xr_family(1.0, m), xr_family(1.0, m + 1)]
    return [RANK_ONE_PROBE, stack(xr_family(1.0, m), zero())]


def _probe_value(t: ShiftOperator, x, z: float, p: float, policy: TruncationPolicy) -> float:
    if x == RANK_ONE_PROBE:
        u, g = _rank_one(t, z, p, policy)
        return u.norm.ln_value + g.norm.ln_value
    ev = _cached_apply(t, x, z, p, policy)
    _, hi = _cached_norm(x, t.weights, p)
    return ev.norm.ln_value - hi


@lru_cache(maxsize=1024)
def _cached_norm(x: VectorSpec, weights, p: float):
    return vector_norm_bounds(x, weights, p)


def opnorm_lower(t: ShiftOperator, z: float, p=None, probes: Optional[Sequence] = None, tol=None):
    """``(lower bound, probe label)`` with ``lower = max_x ln ||(z-T)^{-1}x|| - ln ||x||``.

    Probes that cannot be normed (no summability certificate, or a series
    that does not settle within the term budget) are skipped.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    pp = t.p.p if p is None else PNorm.of(p).p
    policy = _policy(tol)
    probes = default_probes(t, pp) if probes is None else list(probes)
    if not probes:
        raise ValueError("need at least one probe")
    best, label = -math.inf, None
    for x in probes:
        if t.kind == BILATERAL and isinstance(x, VectorSpec) and x.family != "stack":
            raise HypothesisViolation("bilateral probes are stacks")
        try:
            v = _probe_value(t, x, float(z), pp, policy)
        except (NotSummable, TruncationBudgetExceeded):
            continue
        if v > best:
            best, label = v, str(x)
    if label is None:
        raise NotSummable("no usable probe")
    return LogMagnitude(best), label


def bilateral_enclosure(t: ShiftOperator, z: float, p=None, tol=None) -> NormEnclosure:
    """Enclosure from the coupling block: ``||u||_p ||f_0 (z-B)^{-1}||_q`` below, block bounds above."""
    if t.kind != BILATERAL:
        raise HypothesisViolation("bilateral_enclosure needs the bilateral block shift")
    pp = t.p.p if p is None else PNorm.of(p).p
    policy = _policy(tol)
    u, g = _rank_one(t, float(z), pp, policy)
    lower = u.norm * g.norm
    return NormEnclosure(lower, _bilateral_upper(t, float(z), pp, policy), RANK_ONE_PROBE)


def enclosure(t: ShiftOperator, z: float, p=None, probes: Optional[Sequence] = None, tol=None) -> NormEnclosure:
    """:class:`NormEnclosure` for any shift kind."""
    pp = t.p.p if p is None else PNorm.of(p).p
    if t.kind == BILATERAL and probes is None:
        return bilateral_enclosure(t, z, pp, tol)
    lower, label = opnorm_lower(t, z, pp, probes, tol)
    upper = opnorm_upper(t, z, tol, pp)
    return NormEnclosure(lower, upper, label)
