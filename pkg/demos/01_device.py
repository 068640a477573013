"""The nominal free layer: shape anisotropy, voltage window and thermal cone.

Prints the demagnetizing factors of the 40 x 70 x 0.9 nm elliptical cylinder,
the two voltages at which the south pole loses stability along y and then x,
and the thermal RMS tilt that sets the scale of the stochastic start.
"""
import math

from vcmasim.analysis import thermal_rms_tilt
from vcmasim.device import DeviceParams, critical_voltages, demag_factors, effective_demag_z, k_eff

p = DeviceParams()
nx, ny, nz = demag_factors(p)
print(f"demag factors  Nx = {nx:.5f}  Ny = {ny:.5f}  Nz = {nz:.5f}")

for u in (0.0, 0.5, 0.7, 0.8, 0.9):
    print(f"U = {u:.1f} V   Ki_eff = {k_eff(u, p) * 1e3:.4f} mJ/m^2   Nz_eff = {effective_demag_z(u, p):+.5f}")

u_y, u_x = critical_voltages(p)
# Between the two voltages the pole is a saddle: soft along y, still stiff along x.
# That is where precession leaves the pole through two well-defined windows.
print(f"pole unstable along y above {u_y:.3f} V, along x above {u_x:.3f} V")
print(f"thermal RMS tilt at 300 K: {math.degrees(thermal_rms_tilt(p)):.2f} deg")
