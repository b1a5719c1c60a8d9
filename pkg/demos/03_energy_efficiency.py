"""Energy-efficient allocation versus rate-optimal allocation.

The EE solver scans the feedback throughput and solves each fixed point by
Dinkelbach's method. The EE optimum typically backs off the data power,
trading rate for a much smaller power bill.
"""

import numpy as np

from ris_overhead import Scenario, Scheme, SystemParams, draw_channels, solve_ee, solve_rate, solve_scheme, summarize
from ris_overhead import PilotProtocol, evaluate_ee, total_power
from ris_overhead.overhead import ResourceAllocation, feedback_rate

s = Scenario(1, 1, 100, seed=2)
ch = draw_channels(s, 0)
sm = summarize(PilotProtocol.SEQUENTIAL, s, SystemParams(), ch, solve_scheme(ch, Scheme.ALTERNATING).objective)

ee = solve_ee(sm, m_points=200)
rt = solve_rate(sm)
a = rt.alloc
a = ResourceAllocation(a.p, a.p_f, a.b, a.b_f, feedback_rate(sm.a, a.p_f, a.b_f))

print("                 rate [Gbit/s]   EE [Mbit/J]   data power [W]   total power [W]")
print(f"rate-optimal     {rt.rate / 1e9:13.4f} {evaluate_ee(sm, a) / 1e6:13.3f} {a.p:16.3f} "
      f"{total_power(sm.params, sm, a):17.3f}")
print(f"EE-optimal       {ee.rate / 1e9:13.4f} {ee.ee / 1e6:13.3f} {ee.alloc.p:16.3f} {ee.p_tot:17.3f}")
print(f"\nDinkelbach iterations at the winner: {len(ee.lambdas) - 1}, "
      f"residual {ee.certificate:.1e}, winning line-search index {ee.y_index}")
print("EE along the first line-search points [Mbit/J]:", np.round(ee.ee_by_y[:8] / 1e6, 3))
