"""A 0.6 V spin-torque tail after the VCMA pulse, and what a half-selected cell sees.

The tail pins the freshly reversed state: the combined pulse approaches
certainty while the same STT drive alone is far weaker.  Under the V/2 scheme a
half-selected cell gets 0.35 V then 0.3 V, which is below the VCMA threshold,
so it essentially never switches.
"""
from vcmasim import DeviceParams, SolverConfig
from vcmasim.montecarlo import compare_pure_stt, half_select_contrast

N = 400
follow = [1e-9, 5e-9, 9e-9]
comb, pure = compare_pure_stt(follow, DeviceParams(), SolverConfig(), N, seed=3)
full, half = half_select_contrast(follow, DeviceParams(), SolverConfig(), N, seed=3)
for w, c, s, h in zip(follow, comb.estimates, pure.estimates, half.estimates):
    print(f"follow {w * 1e9:.0f} ns   combined {c.p:.3f}   pure STT {s.p:.3f}   half-selected {h.p:.3f}")
