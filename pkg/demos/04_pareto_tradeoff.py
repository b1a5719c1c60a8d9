"""Trace the rate/EE trade-off between the two single-objective optima.

Each weight alpha gives one point of the frontier.
"""

from ris_overhead import PilotProtocol, Scenario, Scheme, SystemParams, draw_channels, solve_scheme, summarize
from ris_overhead import pareto_frontier

s = Scenario(1, 1, 60, seed=4)
ch = draw_channels(s, 0)
sm = summarize(PilotProtocol.SEQUENTIAL, s, SystemParams(), ch, solve_scheme(ch, Scheme.ALTERNATING).objective)

pts = pareto_frontier(sm, [1e-6, 0.1, 0.3, 0.5, 0.7, 0.9, 1 - 1e-6], m_points=100)
print(f"{'alpha':>9} {'rate [Gbit/s]':>14} {'EE [Mbit/J]':>12}")
for q in pts:
    print(f"{q.alpha:9.6f} {q.rate / 1e9:14.5f} {q.ee / 1e6:12.4f}")
