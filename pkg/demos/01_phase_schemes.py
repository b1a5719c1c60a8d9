"""Compare the four RIS phase schemes against exhaustive search.

For a single-antenna link every optimised scheme reaches the same gain,
(sum_n |h_n g_n|)^2. With several antennas they differ, and the quantised
brute force gives a reference on small surfaces.
"""

import numpy as np

from ris_overhead import Scenario, Scheme, brute_force_phases, draw_channels, solve_scheme

print("single antenna, N = 6")
ch = draw_channels(Scenario(1, 1, 6, seed=3), 0)
ideal = float(np.sum(np.abs(ch.H[:, 0] * ch.G[0, :]))) ** 2
for sch in Scheme:
    print(f"  scheme {sch.value} ({sch.name.lower():12s}) gain/ideal = {solve_scheme(ch, sch).objective / ideal:.6f}")

print("\n2x2 antennas, N = 3, brute force on 64 phase levels")
ch = draw_channels(Scenario(2, 2, 3, seed=3), 0)
ref = brute_force_phases(ch, 64).objective
for sch in Scheme:
    sol = solve_scheme(ch, sch)
    extra = f", {len(sol.history) // 2} sweeps" if sch is Scheme.ALTERNATING else ""
    print(f"  scheme {sch.value} gain/brute = {sol.objective / ref:.6f}{extra}")
