"""How estimation and feedback overhead shape the achievable rate.

Larger surfaces give more beamforming gain but need more pilots and more
feedback bits. The rate solver splits power and bandwidth between data and
feedback; the printout shows where the balance lands as N grows.
"""

from ris_overhead import PilotProtocol, Scenario, Scheme, SystemParams, draw_channels, solve_rate, solve_scheme, summarize

params = SystemParams()  # reference constants, 10 ms slot
print(f"{'N':>4} {'beta':>7} {'SE opt':>8} {'SE no-RIS-ctrl':>15} {'B_F [kHz]':>10} {'p_F [W]':>8}")
for n in (20, 60, 100, 150, 200):
    s = Scenario(1, 1, n, seed=5)
    ch = draw_channels(s, 0)
    opt = summarize(PilotProtocol.SEQUENTIAL, s, params, ch, solve_scheme(ch, Scheme.ALTERNATING).objective)
    base = summarize(PilotProtocol.SEQUENTIAL, s, params, ch, solve_scheme(ch, Scheme.IDENTITY).objective,
                     feedback_enabled=False)
    r, r0 = solve_rate(opt), solve_rate(base)
    print(f"{n:4d} {opt.beta:7.4f} {r.spectral_efficiency:8.3f} {r0.spectral_efficiency:15.3f} "
          f"{r.alloc.b_f / 1e3:10.1f} {r.alloc.p_f:8.3f}")

# with 8x8 antennas the sequential pilot count N_T N N_R grows quickly
print("\n8x8 antennas, N = 150, estimation time per protocol")
s = Scenario(8, 8, 150, seed=5)
ch = draw_channels(s, 0)
gain = solve_scheme(ch, Scheme.ALTERNATING).objective
for proto in PilotProtocol:
    sm = summarize(proto, s, params, ch, gain)
    print(f"  {proto.name.lower():10s} T_E = {sm.t_e * 1e3:.3f} ms, SE = {solve_rate(sm).spectral_efficiency:.3f}")
