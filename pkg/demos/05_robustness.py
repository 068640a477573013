"""Why 0.7 V is robust and 0.8 V is not.

At 0.7 V the pole is a saddle, soft along the long axis only, and the
deterministic flow leaves it through two antipodal windows.  Exit azimuths of
stochastic trajectories concentrate there, which the second circular moment
C2 captures.  At 0.8 V the pole is unstable along both axes.
"""
import math

from vcmasim import DeviceParams, SolverConfig
from vcmasim.analysis import exit_histogram, ordering_in_cap, velocity_field_map

p = DeviceParams()
for u in (0.0, 0.7, 0.8):
    v = ordering_in_cap(u, p)
    print(f"{u:.1f} V  axis stiffness ordering {v.label}  ({v.agreement:.0%} of the cap)")

velocity_field_map(0.7, p, grid_n=36, cap_angle=math.radians(30), precession=True).to_csv("map_07.csv")

for i, u in enumerate((0.7, 0.8)):
    h = exit_histogram(u, p, SolverConfig(), n_trials=300, seed=5, point_index=i)
    axis = math.degrees(h.window_axis)
    print(f"{u:.1f} V  C2 = {h.c2:.3f}  window axis {axis:+.0f} deg  no exit {h.n_no_exit}")
    h.to_csv(f"exit_{u:.1f}.csv")
