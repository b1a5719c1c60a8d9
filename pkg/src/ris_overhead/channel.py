"""Random Rayleigh channel realizations for the transmitter-RIS-receiver link."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import InvalidInputError

__all__ = ["Scenario", "ChannelRealization", "draw_channels", "trial_rng"]


@dataclass(frozen=True)
class Scenario:
    """Link dimensions and large-scale fading.

    ``pathloss_db`` is the overall transmitter-to-receiver attenuation of
    every product channel ``h_{nt,n} g_{n,nr}``. ``feedback_pathloss_db``
    defaults to the same value.
    """

    n_t: int
    n_r: int
    n_ris: int
    pathloss_db: float = 110.0
    seed: int = 0
    feedback_pathloss_db: Optional[float] = None

    def __post_init__(self):
        for name in ("n_t", "n_r", "n_ris"):
            if int(getattr(self, name)) < 1:
                raise InvalidInputError(f"{name} must be >= 1")
        if not np.isfinite(self.pathloss_db):
            raise InvalidInputError("pathloss_db must be finite")
        if self.feedback_pathloss_db is not None and not np.isfinite(self.feedback_pathloss_db):
            raise InvalidInputError("feedback_pathloss_db must be finite")

    @property
    def pathloss(self) -> float:
        return 10.0 ** (0.1 * self.pathloss_db)

    @property
    def feedback_pathloss(self) -> float:
        db = self.pathloss_db if self.feedback_pathloss_db is None else self.feedback_pathloss_db
        return 10.0 ** (0.1 * db)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of ``H`` (N x N_T), ``G`` (N_R x N) and the scalar ``h_f``."""

    H: np.ndarray
    G: np.ndarray
    h_f: complex

    @property
    def n_ris(self) -> int:
        return self.H.shape[0]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator keyed on ``(seed, trial)``.

    Each trial gets its own Philox stream, so realizations do not depend on
    the order in which trials are drawn.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_channels(s: Scenario, trial: int) -> ChannelRealization:
    """Draw i.i.d. CN(0, 1/sqrt(beta)) entries for ``H`` and ``G``.

    Each product ``h_{nt,n} g_{n,nr}`` then has variance ``1/beta``. The
    feedback channel is CN(0, 1/beta_F).
    """
    rng = trial_rng(s.seed, trial)
    amp = s.pathloss ** -0.25
    H = amp * _cn(rng, (s.n_ris, s.n_t))
    G = amp * _cn(rng, (s.n_r, s.n_ris))
    h_f = complex(_cn(rng, ())) / np.sqrt(s.feedback_pathloss)
    return ChannelRealization(H=H, G=G, h_f=h_f)
