"""Channel-estimation and feedback overhead, and the total power model.

All rates and feedback payloads are in bits, so every logarithm here is
base 2. Quantities are SI (W, Hz, s) throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization, Scenario
from .exceptions import InfeasibleError, InvalidInputError, OverheadExceedsSlotError

__all__ = [
    "PilotProtocol",
    "SystemParams",
    "OverheadSummary",
    "ResourceAllocation",
    "dbm_to_watt",
    "estimation_cost",
    "summarize",
    "feedback_rate",
    "feedback_time",
    "feedback_constraint_ok",
    "total_power",
    "min_feedback_power",
]


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (0.1 * (dbm - 30.0))


class PilotProtocol(enum.Enum):
    SEQUENTIAL = "a"
    PARALLEL = "b"

    @classmethod
    def from_label(cls, label: str) -> "PilotProtocol":
        for p in cls:
            if label in (p.value, p.name.lower()):
                return p
        raise ValueError(f"unknown pilot protocol {label!r}")


@dataclass(frozen=True)
class SystemParams:
    """Scalar system constants; defaults are the reference network parameters."""

    p_max: float = dbm_to_watt(45.0)
    b_max: float = 100e6
    n0: float = dbm_to_watt(-174.0)
    mu: float = 1.0
    mu_f: float = 1.0
    b_f: float = 16.0
    t_slot: float = 10e-3
    t0: float = 0.8e-6
    p0: float = 2.5e-3
    p_c0: float = dbm_to_watt(45.0)
    p_cn: float = dbm_to_watt(10.0)

    def __post_init__(self):
        for name in ("p_max", "b_max", "n0", "mu", "mu_f", "b_f", "t_slot", "t0", "p0"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be positive, got {v}")
        for name in ("p_c0", "p_cn"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise InvalidInputError(f"{name} must be nonnegative, got {v}")
        if not self.t0 < self.t_slot:
            raise InvalidInputError("pilot duration t0 must be shorter than the slot")


@dataclass(frozen=True)
class OverheadSummary:
    """Everything the power/bandwidth solvers need about one link.

    ``p_static`` is the hardware power ``N P_cn + P_c0``; ``p_c`` adds the
    estimation power ``P_E`` and is the constant in the EE denominator.
    """

    params: SystemParams
    n_ris: int
    t_e: float
    p_e: float
    beta: float
    d: float
    a: float
    c: float
    p_static: float
    feedback_enabled: bool = True

    @property
    def p_c(self) -> float:
        return self.p_static + self.p_e

    @property
    def y_min(self) -> float:
        """Smallest feedback throughput compatible with the slot, ``d / beta``."""
        return self.d / self.beta

    @property
    def y_max(self) -> float:
        """Feedback throughput with all power and bandwidth on the feedback link."""
        return feedback_rate(self.a, self.params.p_max, self.params.b_max)


@dataclass(frozen=True)
class ResourceAllocation:
    p: float
    p_f: float
    b: float
    b_f: float
    y: float = 0.0


def estimation_cost(proto: PilotProtocol, s: Scenario, params: SystemParams,
                    feedback_enabled: bool = True) -> tuple[float, float]:
    """Estimation time ``T_E`` and average estimation power ``P_E``.

    Without feedback the RIS keeps its default configuration and only the
    ``N_T N_R`` cascaded channels need a pilot each.
    """
    n, nt, nr = s.n_ris, s.n_t, s.n_r
    t0, p0, t = params.t0, params.p0, params.t_slot
    if not feedback_enabled:
        t_e = nt * nr * t0
        p_e = nt * nr * p0 * t0 / t
    elif proto is PilotProtocol.SEQUENTIAL:
        t_e = (nt * n * nr + 1) * t0
        p_e = p0 * (1 + n * nt * nr) * t0 / t
    elif proto is PilotProtocol.PARALLEL:
        t_e = (n + 1) * t0
        p_e = (n * nr + 1) * p0 * t0 / t
    else:
        raise ValueError(f"unknown protocol {proto!r}")
    if t_e >= t:
        raise OverheadExceedsSlotError(f"estimation time {t_e:.3g} s >= slot {t:.3g} s")
    return t_e, p_e


def summarize(proto: PilotProtocol, s: Scenario, params: SystemParams, ch: ChannelRealization,
              gain: float, feedback_enabled: bool = True) -> OverheadSummary:
    """Derived constants for one channel draw and an achieved phase gain."""
    t_e, p_e = estimation_cost(proto, s, params, feedback_enabled)
    return OverheadSummary(
        params=params,
        n_ris=s.n_ris,
        t_e=t_e,
        p_e=p_e,
        beta=1.0 - t_e / params.t_slot,
        d=params.b_f * s.n_ris / params.t_slot if feedback_enabled else 0.0,
        a=abs(ch.h_f) ** 2 / params.n0,
        c=gain / params.n0,
        p_static=s.n_ris * params.p_cn + params.p_c0,
        feedback_enabled=feedback_enabled,
    )


def feedback_rate(a, p_f, b_f):
    """``B_F log2(1 + a p_F / B_F)`` with the value 0 at ``B_F = 0``."""
    p_f = np.asarray(p_f, dtype=float)
    b_f = np.asarray(b_f, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = b_f * np.log1p(a * p_f / b_f) / np.log(2.0)
    out = np.where(b_f > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def min_feedback_power(a: float, y, b_f):
    """Smallest ``p_F`` with ``B_F log2(1 + a p_F/B_F) >= y`` (inf at ``B_F = 0``)."""
    y = np.asarray(y, dtype=float)
    b_f = np.asarray(b_f, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = b_f / a * np.expm1(np.log(2.0) * y / b_f)
    out = np.where(b_f > 0, out, np.where(y > 0, np.inf, 0.0))
    return float(out) if out.ndim == 0 else out


def feedback_time(params: SystemParams, summary: OverheadSummary, p_f: float, b_f_bw: float) -> float:
    """Time to deliver ``N b_F`` phase bits over the feedback link."""
    if not summary.feedback_enabled:
        return 0.0
    if p_f <= 0 or b_f_bw <= 0:
        raise InfeasibleError("feedback needs positive power and bandwidth")
    rate = feedback_rate(summary.a, p_f, b_f_bw)
    if rate <= 0:
        raise InfeasibleError("feedback rate is zero")
    return summary.n_ris * params.b_f / rate


def feedback_constraint_ok(summary: OverheadSummary, p_f: float, b_f_bw: float) -> bool:
    """``d / (B_F log2(1 + a p_F/B_F)) <= beta``, i.e. ``T_E + T_F <= T``."""
    if not summary.feedback_enabled or summary.d == 0:
        return True
    z = feedback_rate(summary.a, p_f, b_f_bw)
    return bool(z > 0 and summary.d <= summary.beta * z)


def total_power(params: SystemParams, summary: OverheadSummary, alloc: ResourceAllocation) -> float:
    """Average power over the slot: estimation, feedback, data and static parts."""
    t = params.t_slot
    data = params.mu * alloc.p * (1.0 - summary.t_e / t)
    if not summary.feedback_enabled:
        return summary.p_e + data + summary.p_static
    t_f = feedback_time(params, summary, alloc.p_f, alloc.b_f)
    if summary.t_e + t_f >= t * (1 + 1e-12):
        raise InfeasibleError(f"T_E + T_F = {summary.t_e + t_f:.3g} s exceeds the slot")
    fb = summary.n_ris * params.b_f * (params.mu_f * alloc.p_f - params.mu * alloc.p)
    fb /= t * feedback_rate(summary.a, alloc.p_f, alloc.b_f)
    return summary.p_e + fb + data + summary.p_static
