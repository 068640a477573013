"""One stochastic trajectory through a 0.7 V, 1.8 ns pulse.

The free layer starts thermalized near -z, precesses while the pulse lowers
the perpendicular anisotropy, and relaxes for 3 ns afterwards.  The recorded
samples are written to ``trajectory.csv``.
"""
from vcmasim import SolverConfig, DeviceParams, simulate, vcma_pulse

traj = simulate(vcma_pulse(0.7, 1.8e-9), DeviceParams(), SolverConfig(record_stride=50), seed=1)
for t, m in zip(traj.t[::4], traj.m[::4]):
    print(f"t = {t * 1e9:5.2f} ns   m = ({m[0]:+.3f}, {m[1]:+.3f}, {m[2]:+.3f})")
print("switched" if traj.switched else "did not switch")
traj.to_csv("trajectory.csv")
