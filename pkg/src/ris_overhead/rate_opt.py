"""Global maximisation of the overhead-aware rate over (p, p_F, B, B_F).

The rate is ``R = (beta - d / z(p_F, B_F)) * g1(p, B)`` with
``g1 = B log2(1 + p c / B)`` and ``z = B_F log2(1 + a p_F / B_F)``. Its
logarithm is jointly concave, both sum constraints are active at the
optimum, and each one-dimensional slice has a unique stationary point that
is found by bisection on the sign of the derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleError
from .numerics import bisect_root
from .overhead import (
    OverheadSummary,
    ResourceAllocation,
    feedback_rate,
    min_feedback_power,
)

__all__ = [
    "RateResult",
    "g1",
    "g2",
    "g2_hessian",
    "evaluate_rate",
    "log_rate",
    "power_stationarity",
    "bandwidth_stationarity",
    "min_feedback_bandwidth",
    "solve_power_fixed_bandwidth",
    "solve_bandwidth_fixed_power",
    "solve_rate",
]

_LN2 = math.log(2.0)
ROOT_RTOL = 1e-10


@dataclass(frozen=True)
class RateResult:
    alloc: ResourceAllocation
    rate: float
    spectral_efficiency: float
    iterations: int = 0


def g1(p, b, c):
    """``B log2(1 + p c / B)``, extended by 0 at ``B = 0``."""
    p = np.asarray(p, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = b * np.log1p(p * c / b) / _LN2
    out = np.where(b > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def g2(p_f, b_f, a):
    """``1 / (B_F log2(1 + a p_F / B_F))``; jointly convex."""
    return 1.0 / feedback_rate(a, p_f, b_f)


def g2_hessian(p_f: float, b_f: float, a: float) -> np.ndarray:
    """Hessian of :func:`g2` in ``(p_F, B_F)`` from the analytic derivatives of ``z``."""
    z = feedback_rate(a, p_f, b_f)
    s = b_f + a * p_f
    zp = a * b_f / (s * _LN2)
    zb = math.log2(1.0 + a * p_f / b_f) - a * p_f / (s * _LN2)
    zpp = -a * a * b_f / (s * s * _LN2)
    zbb = -a * a * p_f**2 / (b_f * s * s * _LN2)
    zpb = a * a * p_f / (s * s * _LN2)
    # d^2 (1/z) = 2 dz dz^T / z^3 - d^2 z / z^2
    grad = np.array([zp, zb])
    hz = np.array([[zpp, zpb], [zpb, zbb]])
    return 2.0 * np.outer(grad, grad) / z**3 - hz / z**2


def _prefactor(summary: OverheadSummary, p_f, b_f):
    if not summary.feedback_enabled or summary.d == 0:
        return summary.beta
    z = feedback_rate(summary.a, p_f, b_f)
    with np.errstate(divide="ignore"):
        return summary.beta - summary.d / z


def evaluate_rate(summary: OverheadSummary, alloc: ResourceAllocation, check: bool = True) -> float:
    """Achievable rate in bits/s for an allocation."""
    pr = summary.params
    if check:
        tol = 1e-9
        if min(alloc.p, alloc.p_f, alloc.b, alloc.b_f) < 0:
            raise InfeasibleError("negative power or bandwidth")
        if alloc.p + alloc.p_f > pr.p_max * (1 + tol) or alloc.b + alloc.b_f > pr.b_max * (1 + tol):
            raise InfeasibleError("power or bandwidth budget exceeded")
    pre = _prefactor(summary, alloc.p_f, alloc.b_f)
    if check and pre < -1e-12 * summary.beta:
        raise InfeasibleError("feedback does not fit in the slot")
    return float(max(pre, 0.0) * g1(alloc.p, alloc.b, summary.c))


def log_rate(summary: OverheadSummary, p, b):
    """``log R`` with the sum constraints active (``-inf`` where infeasible)."""
    pr = summary.params
    pre = _prefactor(summary, pr.p_max - np.asarray(p), pr.b_max - np.asarray(b))
    val = np.asarray(pre) * g1(p, b, summary.c)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(val > 0, np.log(np.where(val > 0, val, 1.0)), -np.inf)
    return float(out) if out.ndim == 0 else out


def _feedback_log_slope(summary: OverheadSummary, z: float, dz: float) -> float:
    """Derivative of ``log(beta - d/z)`` given ``z`` and its derivative."""
    return summary.d * dz / (z * (summary.beta * z - summary.d))


def power_stationarity(summary: OverheadSummary, p: float, b: float, b_f: float) -> float:
    """``d/dp`` of ``log R`` along ``p_F = P_max - p``; strictly decreasing in ``p``."""
    a, c = summary.a, summary.c
    p_f = summary.params.p_max - p
    data = c / ((b + p * c) * math.log1p(p * c / b))
    if not summary.feedback_enabled or summary.d == 0:
        return data
    z = feedback_rate(a, p_f, b_f)
    dz = a * b_f / ((b_f + a * p_f) * _LN2)
    return data - _feedback_log_slope(summary, z, dz)


def bandwidth_stationarity(summary: OverheadSummary, b: float, p: float, p_f: float) -> float:
    """``d/dB`` of ``log R`` along ``B_F = B_max - B``; strictly decreasing in ``B``."""
    a, c = summary.a, summary.c
    b_f = summary.params.b_max - b
    x = p * c / b
    data = (math.log1p(x) - x / (1.0 + x)) / (b * math.log1p(x))
    if not summary.feedback_enabled or summary.d == 0:
        return data
    z = feedback_rate(a, p_f, b_f)
    dz = math.log2(1.0 + a * p_f / b_f) - a * p_f / ((b_f + a * p_f) * _LN2)
    return data - _feedback_log_slope(summary, z, dz)


def min_feedback_bandwidth(summary: OverheadSummary, p_f: float) -> float:
    """Smallest ``B_F`` whose feedback throughput at power ``p_F`` reaches ``d/beta``.

    Raises :class:`InfeasibleError` when even ``B_F = B_max`` is not enough.
    """
    target = summary.y_min
    b_max = summary.params.b_max
    if target <= 0:
        return 0.0
    if p_f <= 0 or feedback_rate(summary.a, p_f, b_max) <= target:
        raise InfeasibleError("feedback power too small for any bandwidth split")
    f = lambda bf: feedback_rate(summary.a, p_f, bf) - target
    lo = b_max
    while f(lo) > 0 and lo > 1e-300:
        lo *= 0.5
    if lo >= b_max:
        return b_max
    return bisect_root(f, lo, min(2 * lo, b_max), ROOT_RTOL * lo, keep="positive")


def _ratecore(summary, p, b):
    pr = summary.params
    if summary.feedback_enabled and summary.d > 0:
        p_f, b_f = pr.p_max - p, pr.b_max - b
        y = feedback_rate(summary.a, p_f, b_f)
    else:
        p_f = b_f = y = 0.0
    alloc = ResourceAllocation(p=p, p_f=p_f, b=b, b_f=b_f, y=y)
    rate = evaluate_rate(summary, alloc)
    return alloc, rate


def _decreasing_root(fun, lo: float, hi: float) -> float:
    """Zero of a strictly decreasing function on the open interval ``(lo, hi)``.

    Falls back to an endpoint when the sign does not change numerically.
    """
    width = hi - lo
    eps = 1e-15 * max(abs(hi), abs(lo), width)
    a, b = lo + eps, hi - eps
    fa, fb = fun(a), fun(b)
    if fb >= 0 or math.isnan(fb):
        return b if not math.isnan(fb) else a
    if fa <= 0:
        return a
    return bisect_root(fun, a, b, ROOT_RTOL * width)


def solve_power_fixed_bandwidth(summary: OverheadSummary, b: float, b_f: float | None = None) -> RateResult:
    """Optimal data power for a fixed bandwidth split ``(B, B_F)``.

    The stationary point of the log-rate is the unique root of
    :func:`power_stationarity`; it is clipped to the largest data power
    that still leaves the feedback-feasibility floor
    ``(B_F/a)(2^{d/(B_F beta)} - 1)`` for ``p_F``.
    """
    pr = summary.params
    if b_f is None:
        b_f = pr.b_max - b
    if not summary.feedback_enabled or summary.d == 0:
        p_star = pr.p_max
    else:
        p_f_floor = min_feedback_power(summary.a, summary.y_min, b_f)
        p_hi = pr.p_max - p_f_floor
        if not p_hi > 0:
            raise InfeasibleError("no data power fits next to the feedback requirement")
        p_star = _decreasing_root(lambda p: power_stationarity(summary, p, b, b_f), 0.0, p_hi)
    p_f = pr.p_max - p_star if summary.feedback_enabled and summary.d > 0 else 0.0
    y = feedback_rate(summary.a, p_f, b_f) if p_f > 0 else 0.0
    alloc = ResourceAllocation(p=p_star, p_f=p_f, b=b, b_f=b_f if p_f > 0 else 0.0, y=y)
    rate = evaluate_rate(summary, alloc)
    return RateResult(alloc=alloc, rate=rate, spectral_efficiency=rate / pr.b_max)


def solve_bandwidth_fixed_power(summary: OverheadSummary, p: float, p_f: float | None = None) -> RateResult:
    """Optimal data bandwidth for a fixed power split ``(p, p_F)``."""
    pr = summary.params
    if p_f is None:
        p_f = pr.p_max - p
    if not summary.feedback_enabled or summary.d == 0:
        b_star = pr.b_max
    else:
        b_hat = min_feedback_bandwidth(summary, p_f)
        b_hi = pr.b_max - b_hat
        if not b_hi > 0:
            raise InfeasibleError("no data bandwidth fits next to the feedback requirement")
        b_star = _decreasing_root(lambda b: bandwidth_stationarity(summary, b, p, p_f), 0.0, b_hi)
    enabled = summary.feedback_enabled and summary.d > 0
    b_f = pr.b_max - b_star if enabled else 0.0
    y = feedback_rate(summary.a, p_f, b_f) if enabled else 0.0
    alloc = ResourceAllocation(p=p, p_f=p_f if enabled else 0.0, b=b_star, b_f=b_f, y=y)
    rate = evaluate_rate(summary, alloc)
    return RateResult(alloc=alloc, rate=rate, spectral_efficiency=rate / pr.b_max)


def solve_rate(summary: OverheadSummary, p_start: float | None = None,
               rtol: float = 1e-12, max_iters: int = 1000) -> RateResult:
    """Rate-optimal ``(p, p_F, B, B_F)`` by exact coordinate ascent.

    Alternates :func:`solve_bandwidth_fixed_power` and
    :func:`solve_power_fixed_bandwidth` on the concave log-rate until the
    relative rate change drops below ``rtol``. Both budgets are spent in
    full at the returned point.

    Parameters
    ----------
    p_start : float, optional
        Initial data power. Defaults to half of what is left after the
        feedback power floor at ``B_F = B_max``.
    """
    pr = summary.params
    if not summary.feedback_enabled or summary.d == 0:
        alloc = ResourceAllocation(p=pr.p_max, p_f=0.0, b=pr.b_max, b_f=0.0, y=0.0)
        rate = evaluate_rate(summary, alloc)
        return RateResult(alloc=alloc, rate=rate, spectral_efficiency=rate / pr.b_max)

    if summary.y_max <= summary.y_min:
        raise InfeasibleError("feedback cannot fit in the slot even with the full budget")
    floor = min_feedback_power(summary.a, summary.y_min, pr.b_max)
    if p_start is None:
        p_start = 0.5 * (pr.p_max - floor)
    if not 0 < p_start < pr.p_max - floor:
        raise ValueError("p_start must leave room for the feedback power floor")

    p = p_start
    prev = -math.inf
    it = 0
    while it < max_iters:
        it += 1
        b = solve_bandwidth_fixed_power(summary, p).alloc.b
        res = solve_power_fixed_bandwidth(summary, b)
        p = res.alloc.p
        if res.rate - prev <= rtol * res.rate:
            break
        prev = res.rate
    alloc, rate = _ratecore(summary, p, b)
    return RateResult(alloc=alloc, rate=rate, spectral_efficiency=rate / pr.b_max, iterations=it)
