"""Writing a 128 x 128 array with the V/2 scheme.

Counts the cells in each class, turns per-cell switching probabilities into
expected disturbs for a full sequential write, accounts the energy of one
write, and solves the floating-line network of a small array to show the
sneak currents the V/2 scheme avoids.
"""
import numpy as np

from vcmasim import DeviceParams, combined_pulse
from vcmasim.crossbar import CrossbarSpec, WriteRequest, classify, sneak_solve, write_disturb, write_energy

p = DeviceParams()
spec = CrossbarSpec.uniform(128, 128, "AP", p)
_, counts = classify(spec, (0, 0))
print("selected / half / unselected:", counts)

for p_half in (0.0, 1e-6, 1e-4):
    d = write_disturb(spec, 0.97, p_half)
    print(f"p_half = {p_half:g}: per-cell disturb {d.per_cell:.4g}, expected disturbed {d.expected_disturbed:.1f}")

e = write_energy(spec, WriteRequest((0, 0), combined_pulse(0.7, 1.8e-9, 0.6, 9e-9)))
print({k: f"{v:.3e} J" for k, v in e.items()})

small = CrossbarSpec.uniform(4, 4, "AP", p)
res = sneak_solve(small, 0, 0, 0.7)
np.set_printoptions(precision=3)
print("cell currents (uA) with floating lines:\n", res.currents * 1e6)
