"""Switching probability against pulse width and against amplitude.

Small trial counts keep this to a couple of minutes; the acceptance suite uses
4000 trials per point.  The width curve rises to a first peak near 1.8 ns
(half a precession period), oscillates, and settles at one half for long
pulses.  The amplitude curve has a plateau around 0.7 V and falls off above
0.8 V once the pole becomes unstable along both in-plane axes.
"""
from vcmasim import DeviceParams, SolverConfig
from vcmasim.montecarlo import sweep_amplitude, sweep_width

N = 400
p, cfg = DeviceParams(), SolverConfig()

widths = [w * 1e-9 for w in (0.6, 1.0, 1.4, 1.8, 2.2, 3.0, 3.8, 5.0, 25.0)]
for w, e in zip(widths, sweep_width(0.7, widths, p, cfg, N, seed=1).estimates):
    print(f"0.7 V, {w * 1e9:4.1f} ns   P = {e.p:.3f}  [{e.ci_low:.3f}, {e.ci_high:.3f}]")

amps = [0.5, 0.6, 0.7, 0.8, 0.9]
curve = sweep_amplitude(1.8e-9, amps, p, cfg, N, seed=2)
for u, e in zip(amps, curve.estimates):
    print(f"{u:.1f} V, 1.8 ns     P = {e.p:.3f}  [{e.ci_low:.3f}, {e.ci_high:.3f}]")
curve.to_csv("amplitude.csv", meta={"seed": 2})
