"""Overhead-aware resource allocation for RIS-assisted links.

Phase configuration (:mod:`.phase_opt`), estimation and feedback overhead
(:mod:`.overhead`), rate and energy-efficiency maximisation
(:mod:`.rate_opt`, :mod:`.ee_opt`), the rate/EE trade-off (:mod:`.pareto`)
and a Monte-Carlo sweep harness (:mod:`.experiment`, :mod:`.cli`).
"""

from .channel import ChannelRealization, Scenario, draw_channels
from .ee_opt import EEResult, evaluate_ee, solve_ee, solve_ee_fixed_y
from .exceptions import (
    BracketError,
    DegenerateMatrixError,
    InfeasibleError,
    InstanceTooLargeError,
    InvalidInputError,
    OverheadExceedsSlotError,
    RisAllocError,
)
from .numerics import bisect_root, dominant_singular_triplet, golden_maximize, svd
from .overhead import (
    OverheadSummary,
    PilotProtocol,
    ResourceAllocation,
    SystemParams,
    estimation_cost,
    feedback_constraint_ok,
    feedback_time,
    summarize,
    total_power,
)
from .pareto import ParetoPoint, feasibility_test, pareto_frontier, solve_tradeoff
from .phase_opt import PhaseSolution, Scheme, brute_force_phases, evaluate_gain, solve_scheme
from .rate_opt import RateResult, evaluate_rate, solve_rate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
