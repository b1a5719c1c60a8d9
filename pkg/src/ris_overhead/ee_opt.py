"""Energy-efficiency maximisation: line search on the feedback throughput ``y``.

For a fixed feedback throughput ``y`` the feedback power is pinned at the
smallest value that delivers it, and the remaining ratio

    (beta - d/y) B log2(1 + p c / B)
    ---------------------------------------------------
    beta mu p + P_c + (d/y) (mu_F p_F - mu p)

has a concave numerator and a convex denominator in ``(p, B)``, so it is
maximised by Dinkelbach's parametric method. All line-search points are
processed together as numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InfeasibleError
from .numerics import golden_maximize
from .overhead import (
    OverheadSummary,
    ResourceAllocation,
    feedback_rate,
    min_feedback_power,
    total_power,
)
from .rate_opt import evaluate_rate, g1

__all__ = [
    "EEResult",
    "YSlice",
    "evaluate_ee",
    "y_grid",
    "solve_ee_fixed_y",
    "solve_ee",
    "DINKELBACH_RTOL",
]

_LN2 = math.log(2.0)
DINKELBACH_RTOL = 1e-9
DINKELBACH_MAX_ITERS = 50
GOLDEN_RTOL = 1e-10


@dataclass
class EEResult:
    alloc: ResourceAllocation
    ee: float
    rate: float
    p_tot: float
    lambdas: list = field(default_factory=list)
    certificate: float = 0.0
    y_index: int = 0
    ee_by_y: np.ndarray | None = None
    certificates: np.ndarray | None = None


def _enabled(summary: OverheadSummary) -> bool:
    return summary.feedback_enabled and summary.d > 0


def evaluate_ee(summary: OverheadSummary, alloc: ResourceAllocation) -> float:
    """EE in bits/J with the feedback throughput taken from ``alloc.y``."""
    pr = summary.params
    if min(alloc.p, alloc.p_f, alloc.b, alloc.b_f) < 0:
        raise InfeasibleError("negative power or bandwidth")
    if alloc.p + alloc.p_f > pr.p_max * (1 + 1e-9) or alloc.b > pr.b_max * (1 + 1e-9):
        raise InfeasibleError("power or bandwidth budget exceeded")
    if _enabled(summary):
        if alloc.y < summary.y_min * (1 - 1e-12):
            raise InfeasibleError("feedback throughput below d/beta")
        if alloc.y > feedback_rate(summary.a, alloc.p_f, pr.b_max - alloc.b) * (1 + 1e-9):
            raise InfeasibleError("feedback throughput not attainable with p_F")
        load = summary.d / alloc.y
    else:
        load = 0.0
    num = (summary.beta - load) * g1(alloc.p, alloc.b, summary.c)
    den = summary.beta * pr.mu * alloc.p + summary.p_c + load * (pr.mu_f * alloc.p_f - pr.mu * alloc.p)
    return float(max(num, 0.0) / den)


def _min_feedback_bandwidth(a: float, p: float, y: np.ndarray, b_max: float) -> np.ndarray:
    """Per-element smallest ``B_F`` with ``B_F log2(1 + a p / B_F) >= y`` (returns the feasible end)."""
    lo = np.zeros_like(y)
    hi = np.full_like(y, b_max)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        ok = feedback_rate(a, p, mid) >= y
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


class YSlice:
    """Problem data for a batch of fixed feedback throughputs ``y``.

    With feedback disabled a single dummy slice is used with ``p_F = 0``.
    """

    def __init__(self, summary: OverheadSummary, y):
        pr = summary.params
        self.summary = summary
        self.enabled = _enabled(summary)
        self.y = np.atleast_1d(np.asarray(y, dtype=float))
        if self.enabled:
            if np.any(self.y < summary.y_min * (1 - 1e-12)) or np.any(self.y > summary.y_max * (1 + 1e-12)):
                raise ValueError("y outside [d/beta, y_max]")
            with np.errstate(divide="ignore"):
                self.fac = np.maximum(summary.beta - summary.d / self.y, 0.0)
                self.fb_coef = summary.d * pr.mu_f / self.y
            self.b_hi = pr.b_max - _min_feedback_bandwidth(summary.a, pr.p_max, self.y, pr.b_max)
        else:
            self.fac = np.full_like(self.y, summary.beta)
            self.fb_coef = np.zeros_like(self.y)
            self.b_hi = np.full_like(self.y, pr.b_max)

    def pf_min(self, b):
        if not self.enabled:
            return np.zeros_like(np.asarray(b, dtype=float))
        pr = self.summary.params
        return min_feedback_power(self.summary.a, self.y, pr.b_max - np.asarray(b, dtype=float))

    def p_cap(self, b, pf=None):
        pf = self.pf_min(b) if pf is None else pf
        return np.maximum(self.summary.params.p_max - pf, 0.0)

    def numerator(self, p, b):
        return self.fac * g1(p, b, self.summary.c)

    def denominator(self, p, pf):
        s = self.summary
        return s.params.mu * self.fac * p + s.p_c + self.fb_coef * pf

    def allocation(self, k: int, p: float, b: float) -> ResourceAllocation:
        pr = self.summary.params
        if not self.enabled:
            return ResourceAllocation(p=float(p), p_f=0.0, b=float(b), b_f=0.0, y=0.0)
        pf = float(min_feedback_power(self.summary.a, self.y[k], pr.b_max - b))
        return ResourceAllocation(p=float(p), p_f=pf, b=float(b), b_f=pr.b_max - float(b), y=float(self.y[k]))


def y_grid(summary: OverheadSummary, m_points: int) -> np.ndarray:
    """Line-search points ``d/beta + (m-1) Delta``, ``m = 1..M``."""
    if m_points < 1:
        raise ValueError("m_points must be >= 1")
    if not _enabled(summary):
        return np.zeros(1)
    if summary.y_max <= summary.y_min:
        raise InfeasibleError("feedback cannot fit in the slot even with the full budget")
    delta = (summary.y_max - summary.y_min) / m_points
    return summary.y_min + delta * np.arange(m_points)


def _best_power(sl: YSlice, lam: np.ndarray, b: np.ndarray, cap: np.ndarray) -> np.ndarray:
    """Maximiser over ``p`` of ``num - lam * den`` (closed form, clipped)."""
    mu = sl.summary.params.mu
    c = sl.summary.c
    with np.errstate(divide="ignore", invalid="ignore"):
        p = b * (1.0 / (lam * mu * _LN2) - 1.0 / c)
    p = np.where(lam > 0, p, cap)
    return np.clip(np.nan_to_num(p, nan=0.0, posinf=np.inf), 0.0, cap)


def _parametric(sl: YSlice, lam: np.ndarray):
    """``max_{p,B} num - lam den`` for every slice; returns ``(value, p, B)``."""
    def value_at(b):
        pf = sl.pf_min(b)
        cap = sl.p_cap(b, pf)
        p = _best_power(sl, lam, b, cap)
        return sl.numerator(p, b) - lam * sl.denominator(p, pf)

    tol = GOLDEN_RTOL * sl.summary.params.b_max
    b, val = golden_maximize(value_at, np.zeros_like(sl.b_hi), sl.b_hi, tol)
    pf = sl.pf_min(b)
    p = _best_power(sl, lam, b, sl.p_cap(b, pf))
    return val, p, b


def _dinkelbach(sl: YSlice):
    """Vectorised Dinkelbach over all slices.

    Returns per-slice arrays ``(ee, p, B, certificate)`` and the list of
    lambda iterates.
    """
    n = sl.y.size
    lam = np.zeros(n)
    active = np.ones(n, dtype=bool)
    p = np.zeros(n)
    b = np.zeros(n)
    history = [lam.copy()]
    for _ in range(DINKELBACH_MAX_ITERS):
        _, p_new, b_new = _parametric(sl, lam)
        p = np.where(active, p_new, p)
        b = np.where(active, b_new, b)
        num = sl.numerator(p, b)
        den = sl.denominator(p, sl.pf_min(b))
        lam_new = np.where(active, num / den, lam)
        # F(lam) = den * (lam_new - lam): stop once the parametric optimum is ~0
        done = (lam_new - lam) <= DINKELBACH_RTOL * np.maximum(lam_new, np.finfo(float).tiny)
        lam = np.maximum(lam, lam_new)
        history.append(lam.copy())
        active &= ~done
        if not active.any():
            break
    val, _, _ = _parametric(sl, lam)
    den = sl.denominator(p, sl.pf_min(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        cert = np.where(lam > 0, np.abs(val) / (lam * den), np.abs(val) / sl.summary.p_c)
    return lam, p, b, cert, history


def _result(summary: OverheadSummary, sl: YSlice, k: int, lam, p, b, cert, history,
            ee_by_y=None, certificates=None) -> EEResult:
    alloc = sl.allocation(k, p[k], b[k])
    rate = evaluate_rate(summary, alloc)
    try:
        p_tot = total_power(summary.params, summary, alloc)
    except InfeasibleError:
        # only reachable at the y = d/beta end, where the rate is zero anyway
        p_tot = math.nan
    ee = rate / p_tot if rate > 0 else 0.0
    return EEResult(
        alloc=alloc,
        ee=ee,
        rate=rate,
        p_tot=p_tot,
        lambdas=[float(h[k]) for h in history],
        certificate=float(cert[k]),
        y_index=k,
        ee_by_y=ee_by_y,
        certificates=certificates,
    )


def solve_ee_fixed_y(summary: OverheadSummary, y_tilde: float) -> EEResult:
    """EE-optimal ``(p, p_F, B)`` for one fixed feedback throughput ``y_tilde``."""
    if _enabled(summary):
        lo, hi = summary.y_min, summary.y_max
        if not lo * (1 - 1e-12) <= y_tilde <= hi * (1 + 1e-12):
            raise ValueError(f"y_tilde={y_tilde} outside [{lo}, {hi}]")
    sl = YSlice(summary, [y_tilde])
    lam, p, b, cert, history = _dinkelbach(sl)
    return _result(summary, sl, 0, lam, p, b, cert, history)


def solve_ee(summary: OverheadSummary, m_points: int = 200) -> EEResult:
    """Globally EE-optimal allocation by an ``M``-point line search over ``y``.

    Each point is solved by Dinkelbach's method; the best point wins, ties
    going to the smaller ``y``.
    """
    if m_points < 2 and _enabled(summary):
        raise ValueError("m_points must be >= 2")
    sl = YSlice(summary, y_grid(summary, m_points))
    lam, p, b, cert, history = _dinkelbach(sl)
    if not np.any(lam > 0):
        raise InfeasibleError("no line-search point has positive energy efficiency")
    k = int(np.argmax(lam))
    return _result(summary, sl, k, lam, p, b, cert, history, ee_by_y=lam.copy(), certificates=cert.copy())
