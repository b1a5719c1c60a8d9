"""Rate/EE trade-off by weighted max-min of the gaps to the single-objective optima.

For a weight ``alpha`` in ``[0, 1]`` the problem is

    max  min( alpha (R - R_opt),  (1 - alpha) (EE - EE_opt) )

written in epigraph form with a level ``t``. For fixed ``y`` and ``t`` the
two level constraints become

    (beta - d/y) g1(p, B)  >=  R_opt + t / alpha
    (beta - d/y) g1(p, B)  >=  (EE_opt + t / (1 - alpha)) * den(p, B)

which describe a convex set in ``(p, B)``, so feasibility is decided by
maximising the smaller of the two normalised slacks. The largest feasible
``t`` is found by bisection and the best ``y`` by the same line search used
for energy efficiency. With ``normalized=True`` both gaps are relative,
``alpha (R/R_opt - 1)`` and ``(1 - alpha) (EE/EE_opt - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ee_opt import YSlice, evaluate_ee, solve_ee, y_grid
from .exceptions import InfeasibleError
from .numerics import golden_maximize
from .overhead import OverheadSummary, ResourceAllocation
from .rate_opt import evaluate_rate, solve_rate

__all__ = [
    "ParetoPoint",
    "feasibility_test",
    "solve_tradeoff",
    "pareto_frontier",
    "FEASIBILITY_TOL",
]

FEASIBILITY_TOL = 1e-9
T_RTOL = 1e-6
_GOLDEN_RTOL = 1e-9


@dataclass
class ParetoPoint:
    alpha: float
    alloc: ResourceAllocation
    rate: float
    ee: float
    t: float  # achieved min of the two weighted gaps
    t_bracket: tuple[float, float] = (math.nan, math.nan)
    y_index: int = 0


@dataclass(frozen=True)
class _Levels:
    """Level constraints ``R >= r0 + r1 t`` and ``EE >= e0 + e1 t``."""

    r_opt: float
    ee_opt: float
    r1: float
    e1: float

    @classmethod
    def build(cls, alpha: float, r_opt: float, ee_opt: float, normalized: bool) -> "_Levels":
        if not 0 <= alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if r_opt <= 0 or ee_opt <= 0:
            raise ValueError("reference optima must be positive")
        sr = r_opt if normalized else 1.0
        se = ee_opt if normalized else 1.0
        # a zero weight removes the level constraint on that objective
        r1 = sr / alpha if alpha > 0 else math.inf
        e1 = se / (1 - alpha) if alpha < 1 else math.inf
        return cls(r_opt=r_opt, ee_opt=ee_opt, r1=r1, e1=e1)

    def lower_t(self, normalized: bool, alpha: float) -> float:
        if normalized:
            return -max(alpha, 1 - alpha)
        return -max(alpha * self.r_opt, (1 - alpha) * self.ee_opt)


def _level(base: float, slope: float, t):
    # slope = inf encodes a dropped constraint (requirement -> -inf for t < 0)
    if math.isinf(slope):
        return np.where(np.asarray(t) < 0, -np.inf, base)
    return base + slope * np.asarray(t)


def _max_slack(sl: YSlice, lv: _Levels, t: np.ndarray):
    """``max_{p,B} min(s_R, s_EE)`` for each slice; returns ``(slack, p, B)``."""
    s = sl.summary
    r_req = _level(lv.r_opt, lv.r1, t)
    e_req = _level(lv.ee_opt, lv.e1, t)
    r_scale = lv.r_opt
    e_scale = lv.ee_opt * s.p_c

    def slack(p, b, pf):
        num = sl.numerator(p, b)
        s_r = (num - r_req) / r_scale
        with np.errstate(invalid="ignore"):
            s_e = (num - e_req * sl.denominator(p, pf)) / e_scale
        s_e = np.where(np.isinf(e_req) & (e_req < 0), np.inf, s_e)
        return np.minimum(s_r, s_e)

    def inner(b):
        pf = sl.pf_min(b)
        cap = sl.p_cap(b, pf)
        tol = _GOLDEN_RTOL * s.params.p_max
        p, val = golden_maximize(lambda p: slack(p, b, pf), np.zeros_like(cap), cap, tol)
        return p, val

    tol_b = _GOLDEN_RTOL * s.params.b_max
    b, val = golden_maximize(lambda b: inner(b)[1], np.zeros_like(sl.b_hi), sl.b_hi, tol_b)
    p, val = inner(b)
    return val, p, b


def feasibility_test(summary: OverheadSummary, y_tilde, t, alpha: float, r_opt: float,
                     ee_opt: float, normalized: bool = False):
    """Is level ``t`` reachable at feedback throughput ``y_tilde``?

    ``y_tilde`` and ``t`` may be arrays of a common shape. Returns
    ``(feasible, witnesses)`` where ``witnesses`` is a list holding a
    :class:`ResourceAllocation` for each feasible entry and ``None``
    elsewhere.
    """
    sl = YSlice(summary, y_tilde)
    lv = _Levels.build(alpha, r_opt, ee_opt, normalized)
    t = np.broadcast_to(np.asarray(t, dtype=float), sl.y.shape)
    val, p, b = _max_slack(sl, lv, t)
    ok = val >= -FEASIBILITY_TOL
    wit = [sl.allocation(k, p[k], b[k]) if ok[k] else None for k in range(sl.y.size)]
    return ok, wit


def solve_tradeoff(summary: OverheadSummary, alpha: float, m_points: int = 200,
                   r_opt: float | None = None, ee_opt: float | None = None,
                   normalized: bool = False) -> ParetoPoint:
    """Best weighted max-min compromise for one ``alpha``.

    ``r_opt`` and ``ee_opt`` default to the values returned by the rate and
    EE solvers on the same instance.
    """
    if r_opt is None:
        r_opt = solve_rate(summary).rate
    if ee_opt is None:
        ee_opt = solve_ee(summary, m_points).ee
    lv = _Levels.build(alpha, r_opt, ee_opt, normalized)
    sl = YSlice(summary, y_grid(summary, m_points))
    n = sl.y.size

    t_lo = np.full(n, lv.lower_t(normalized, alpha))
    t_hi = np.zeros(n)
    eps = T_RTOL * abs(t_lo[0])
    val, p, b = _max_slack(sl, lv, t_lo)
    feasible_lo = val >= -FEASIBILITY_TOL
    if not feasible_lo.any():
        raise InfeasibleError("lower level is infeasible at every line-search point")
    p_best, b_best = p.copy(), b.copy()

    n_iter = max(1, math.ceil(math.log2(abs(t_lo[0]) / eps)))
    for _ in range(n_iter):
        mid = 0.5 * (t_lo + t_hi)
        val, p, b = _max_slack(sl, lv, mid)
        ok = val >= -FEASIBILITY_TOL
        t_lo = np.where(ok, mid, t_lo)
        t_hi = np.where(ok, t_hi, mid)
        p_best = np.where(ok, p, p_best)
        b_best = np.where(ok, b, b_best)

    # score each point on the original objectives at its witness
    scores = np.full(n, -np.inf)
    rates = np.zeros(n)
    ees = np.zeros(n)
    for k in np.flatnonzero(feasible_lo):
        alloc = sl.allocation(k, p_best[k], b_best[k])
        try:
            rates[k] = evaluate_rate(summary, alloc, check=False)
            ees[k] = evaluate_ee(summary, alloc)
        except InfeasibleError:
            continue
        if normalized:
            scores[k] = min(alpha * (rates[k] / r_opt - 1), (1 - alpha) * (ees[k] / ee_opt - 1))
        else:
            scores[k] = min(alpha * (rates[k] - r_opt), (1 - alpha) * (ees[k] - ee_opt))
    k = int(np.argmax(scores))
    return ParetoPoint(
        alpha=alpha,
        alloc=sl.allocation(k, p_best[k], b_best[k]),
        rate=float(rates[k]),
        ee=float(ees[k]),
        t=float(scores[k]),
        t_bracket=(float(t_lo[k]), float(t_hi[k])),
        y_index=k,
    )


def pareto_frontier(summary: OverheadSummary, alphas, m_points: int = 200,
                    normalized: bool = False) -> list[ParetoPoint]:
    """Trade-off points for each weight, sorted by increasing rate."""
    r_opt = solve_rate(summary).rate
    ee_opt = solve_ee(summary, m_points).ee
    pts = [solve_tradeoff(summary, float(a), m_points, r_opt, ee_opt, normalized) for a in alphas]
    return sorted(pts, key=lambda q: q.rate)
