"""RIS phase shifts, transmit beamformer and receive combiner.

Every scheme returns a :class:`PhaseSolution` whose ``objective`` is the
achieved end-to-end gain ``|w^H G Phi H q|^2`` for the returned triple.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .exceptions import DegenerateMatrixError, InstanceTooLargeError, InvalidInputError
from .numerics import dominant_singular_triplet, svd

__all__ = [
    "Scheme",
    "PhaseSolution",
    "evaluate_gain",
    "align_phases",
    "solve_identity",
    "solve_upper_bound",
    "solve_lower_bound",
    "solve_alternating",
    "brute_force_phases",
    "solve_scheme",
    "upper_bound_chain",
    "MAX_ENUMERATION",
]

MAX_ENUMERATION = 10**7

_TWO_PI = 2.0 * np.pi


class Scheme(enum.Enum):
    IDENTITY = "a"
    UPPER_BOUND = "b"
    LOWER_BOUND = "c"
    ALTERNATING = "d"

    @classmethod
    def from_label(cls, label: str) -> "Scheme":
        for s in cls:
            if label in (s.value, s.name.lower()):
                return s
        raise ValueError(f"unknown scheme {label!r}")


@dataclass
class PhaseSolution:
    phases: np.ndarray
    q: np.ndarray
    w: np.ndarray
    objective: float
    history: list = field(default_factory=list)


def _phasor(phases: np.ndarray) -> np.ndarray:
    return np.exp(1j * np.asarray(phases, dtype=float))


def cascade(ch: ChannelRealization, phases) -> np.ndarray:
    """``G diag(e^{j phi}) H``."""
    return (ch.G * _phasor(phases)) @ ch.H


def evaluate_gain(ch: ChannelRealization, sol_or_phases, q=None, w=None) -> float:
    """``|w^H G Phi H q|^2`` for a solution, or for explicit (phases, q, w)."""
    if isinstance(sol_or_phases, PhaseSolution):
        phases, q, w = sol_or_phases.phases, sol_or_phases.q, sol_or_phases.w
    else:
        phases = sol_or_phases
    phases = np.asarray(phases, dtype=float)
    q = np.asarray(q, dtype=complex).ravel()
    w = np.asarray(w, dtype=complex).ravel()
    n_r, n = ch.G.shape
    if ch.H.shape != (n, q.size) or w.size != n_r or phases.shape != (n,):
        raise InvalidInputError(
            f"dimension mismatch: G {ch.G.shape}, H {ch.H.shape}, "
            f"phases {phases.shape}, q {q.shape}, w {w.shape}"
        )
    val = np.vdot(w, cascade(ch, phases) @ q)
    return float(abs(val) ** 2)


def align_phases(ch: ChannelRealization, q: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Phases that co-phase every term of ``g_w^H Phi h_q`` for fixed (q, w)."""
    g_w = ch.G.conj().T @ w
    h_q = ch.H @ q
    prod = np.conj(g_w) * h_q
    # a zero term is optimal under any phase; pin it to 0
    phases = np.where(prod == 0, 0.0, -np.angle(prod))
    return np.mod(phases, _TWO_PI)


def _finish(ch, phases, q, w, history=None) -> PhaseSolution:
    phases = np.mod(np.asarray(phases, dtype=float), _TWO_PI)
    sol = PhaseSolution(phases=phases, q=q, w=w, objective=0.0, history=history or [])
    sol.objective = evaluate_gain(ch, sol)
    return sol


def solve_identity(ch: ChannelRealization) -> PhaseSolution:
    """No phase control; ``(q, w)`` matched to ``G H``."""
    phases = np.zeros(ch.n_ris)
    try:
        _, u, v = dominant_singular_triplet(cascade(ch, phases))
    except DegenerateMatrixError as exc:
        raise DegenerateMatrixError("cascaded channel G H is zero") from exc
    return _finish(ch, phases, v, u)


def _upper_bound_selectors(sh, sg):
    """Return ``(i_bar, j_bar(i_bar), score)`` of the closed-form upper-bound rule."""
    r_h, r_g = max(sh.rank, 1), max(sg.rank, 1)
    mu_h = sh.singular_values[:r_h]
    mu_g = sg.singular_values[:r_g]
    u_h = np.abs(sh.left_vectors[:, :r_h])   # (N, r_H)
    v_g = np.abs(sg.right_vectors[:, :r_g])  # (N, r_G)
    overlap = v_g.T @ u_h                    # (r_G, r_H): sum_n |v_i,G(n)| |u_j,H(n)|
    inner = (mu_h[None, :] ** 2) * overlap**2
    # np.argmax returns the first maximum -> lowest index on ties
    j_bar = np.argmax(inner, axis=1)
    outer = mu_g**2 * inner[np.arange(r_g), j_bar]
    i_bar = int(np.argmax(outer))
    return i_bar, int(j_bar[i_bar]), float(outer[i_bar])


def solve_upper_bound(ch: ChannelRealization) -> PhaseSolution:
    """Maximise the triangle/Cauchy-Schwarz upper bound of the gain in closed form.

    ``q`` and ``w`` are picked among the singular vectors of ``H`` and ``G``
    and the phases co-phase the selected pair elementwise.
    """
    sh, sg = svd(ch.H), svd(ch.G)
    if sh.rank == 0 or sg.rank == 0:
        raise DegenerateMatrixError("H or G is zero")
    i_bar, j_bar, _ = _upper_bound_selectors(sh, sg)
    q = sh.right_vectors[:, j_bar]
    w = sg.left_vectors[:, i_bar]
    prod = np.conj(sg.right_vectors[:, i_bar]) * sh.left_vectors[:, j_bar]
    phases = np.where(prod == 0, 0.0, -np.angle(prod))
    return _finish(ch, phases, q, w)


def upper_bound_chain(ch: ChannelRealization, phases, q, w) -> float:
    """Right-hand side of the Cauchy-Schwarz bound on ``|w^H G Phi H q|^2``.

    ``r_G r_H sum_ij mu_iG^2 mu_jH^2 |w^H u_iG|^2 |v_iG^H Phi u_jH|^2 |v_jH^H q|^2``
    """
    sh, sg = svd(ch.H), svd(ch.G)
    r_h, r_g = sh.rank, sg.rank
    phi = _phasor(phases)
    a = np.abs(sg.left_vectors[:, :r_g].conj().T @ w) ** 2            # (r_G,)
    b = np.abs(sh.right_vectors[:, :r_h].conj().T @ q) ** 2           # (r_H,)
    mid = np.abs(sg.right_vectors[:, :r_g].conj().T @ (phi[:, None] * sh.left_vectors[:, :r_h])) ** 2
    mg = sg.singular_values[:r_g] ** 2
    mh = sh.singular_values[:r_h] ** 2
    return float(r_g * r_h * np.sum((mg * a)[:, None] * mid * (mh * b)[None, :]))


def solve_lower_bound(ch: ChannelRealization) -> PhaseSolution:
    """Match ``(q, w)`` to ``sum_n g_n h_n^T`` then co-phase the terms."""
    m = ch.G @ ch.H  # sum over RIS elements of column_n(G) row_n(H)
    try:
        _, w, q = dominant_singular_triplet(m)
    except DegenerateMatrixError as exc:
        raise DegenerateMatrixError("sum_n g_n h_n^T is zero") from exc
    return _finish(ch, align_phases(ch, q, w), q, w)


def solve_alternating(ch: ChannelRealization, max_iters: int = 500, tol: float = 1e-8,
                      init: PhaseSolution | None = None) -> PhaseSolution:
    """Alternate phase co-phasing and SVD matching until the gain stalls.

    Starts from the lower-bound solution unless ``init`` is given. The
    returned ``history`` lists the gain after every half-step, starting with
    the initial value; it is nondecreasing up to round-off.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    sol = init if init is not None else solve_lower_bound(ch)
    phases, q, w = sol.phases, sol.q, sol.w
    obj = evaluate_gain(ch, phases, q, w)
    history = [obj]
    for _ in range(max_iters):
        phases = align_phases(ch, q, w)
        history.append(evaluate_gain(ch, phases, q, w))
        sigma, w, q = dominant_singular_triplet(cascade(ch, phases))
        new = sigma**2
        history.append(new)
        done = new - obj <= tol * max(obj, np.finfo(float).tiny)
        obj = new
        if done:
            break
    return _finish(ch, phases, q, w, history)


def _rank_one_factors(ch: ChannelRealization):
    """Return ``(x, scale)`` with gain ``= scale * |sum_n x_n e^{j phi_n}|^2`` if rank(H)=rank(G)=1."""
    sh, sg = svd(ch.H), svd(ch.G)
    if sh.rank != 1 or sg.rank != 1:
        return None
    x = np.conj(sg.right_vectors[:, 0]) * sh.left_vectors[:, 0]
    scale = (sg.singular_values[0] * sh.singular_values[0]) ** 2
    return x, scale, sh, sg


def _brute_rank_one(x: np.ndarray, levels: int) -> np.ndarray:
    """Exact maximiser of ``|sum_n x_n e^{j phi_n}|`` over the phase grid.

    At the optimum every term is as close as the grid allows to the
    direction of the sum, so it suffices to scan one direction per interval
    between consecutive decision breakpoints (``N * levels`` of them).
    """
    step = _TWO_PI / levels
    ang = np.angle(x)
    brk = np.mod(ang[:, None] + step * (np.arange(levels)[None, :] + 0.5), _TWO_PI).ravel()
    brk = np.unique(brk)
    nxt = np.roll(brk, -1)
    nxt[-1] += _TWO_PI
    thetas = 0.5 * (brk + nxt)
    k = np.round((thetas[:, None] - ang[None, :]) / step).astype(np.int64) % levels
    sums = np.abs((x[None, :] * np.exp(1j * step * k)).sum(axis=1))
    best = int(np.argmax(sums))
    return step * k[best]


def brute_force_phases(ch: ChannelRealization, levels: int, refine: bool = False) -> PhaseSolution:
    """Exhaustive search over uniformly quantised phases ``2 pi k / levels``.

    For each phase vector the optimal ``(q, w)`` is the dominant singular
    pair of ``G Phi H``, so only the phases are enumerated. A common phase
    rotation leaves the gain unchanged and the first phase is held at zero.
    Rank-one channels use an exact breakpoint scan instead of enumeration.

    ``refine=True`` polishes the best grid point with alternating ascent.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    n = ch.n_ris
    r1 = _rank_one_factors(ch) if levels > 1 else None
    if levels == 1 or n == 1:
        phases = np.zeros(n)
    elif r1 is not None:
        phases = _brute_rank_one(r1[0], levels)
    else:
        count = levels ** (n - 1)
        if count > MAX_ENUMERATION:
            raise InstanceTooLargeError(f"{levels}^{n - 1} = {count} phase vectors exceeds {MAX_ENUMERATION}")
        grid = _TWO_PI * np.arange(levels) / levels
        best_val, phases = -1.0, np.zeros(n)
        chunk = max(1, 200_000 // max(levels, 1))
        combos = itertools.product(range(levels), repeat=n - 1)
        while True:
            block = list(itertools.islice(combos, chunk * levels))
            if not block:
                break
            idx = np.asarray(block, dtype=np.int64)
            ph = np.concatenate([np.zeros((len(idx), 1)), grid[idx]], axis=1)
            stack = np.einsum("rn,kn,nt->krt", ch.G, np.exp(1j * ph), ch.H)
            vals = np.linalg.svd(stack, compute_uv=False)[:, 0]
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, phases = float(vals[k]), ph[k]
    _, w, q = dominant_singular_triplet(cascade(ch, phases))
    sol = _finish(ch, phases, q, w)
    if refine:
        ref = solve_alternating(ch, init=sol)
        if ref.objective > sol.objective:
            sol = ref
    return sol


def solve_scheme(ch: ChannelRealization, scheme: Scheme, **kw) -> PhaseSolution:
    if scheme is Scheme.IDENTITY:
        return solve_identity(ch)
    if scheme is Scheme.UPPER_BOUND:
        return solve_upper_bound(ch)
    if scheme is Scheme.LOWER_BOUND:
        return solve_lower_bound(ch)
    return solve_alternating(ch, **kw)
