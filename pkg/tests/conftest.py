import numpy as np
import pytest

from ris_overhead.channel import ChannelRealization, Scenario, draw_channels
from ris_overhead.overhead import OverheadSummary, PilotProtocol, SystemParams, summarize
from ris_overhead.phase_opt import Scheme, solve_scheme


def make_summary(n_ris=100, n_t=1, n_r=1, seed=1, trial=0, scheme=Scheme.ALTERNATING,
                 protocol=PilotProtocol.SEQUENTIAL, **params):
    """Summary for one seeded channel draw with the reference constants."""
    pr = SystemParams(**params)
    s = Scenario(n_t, n_r, n_ris, seed=seed)
    ch = draw_channels(s, trial)
    sol = solve_scheme(ch, scheme)
    return summarize(protocol, s, pr, ch, sol.objective, scheme is not Scheme.IDENTITY)


def toy_summary(beta=1.0, d=0.0, a=1.0, c=1.0, p_c=1.0, feedback=True, **params):
    """Hand-built summary with round numbers."""
    pr = SystemParams(**params)
    return OverheadSummary(params=pr, n_ris=1, t_e=(1 - beta) * pr.t_slot, p_e=0.0, beta=beta,
                           d=d, a=a, c=c, p_static=p_c, feedback_enabled=feedback)


def random_channel(rng, n_ris, n_t, n_r):
    def cn(shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return ChannelRealization(H=cn((n_ris, n_t)), G=cn((n_r, n_ris)), h_f=complex(cn(())))


@pytest.fixture
def summary_n100():
    return make_summary()
