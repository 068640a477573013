"""Quick self-checks of the core invariants, run by ``vcmasim validate``."""
import math

import numpy as np

from .analysis import c2_order, velocity_field_map
from .crossbar import CrossbarSpec, classify, simulate_disturb, sneak_solve, write_disturb
from .device import DeviceParams, demag_factors, deterministic_field
from .dynamics import heun_step, llg_rhs
from .montecarlo import wilson_interval


def _norm_preserved():
    p = DeviceParams()
    rng = np.random.default_rng(1)
    m = np.array([0.0, 0.0, -1.0])
    worst = 0.0
    for _ in range(2000):
        m = heun_step(m, 0.7, 1e-12, p, rng.standard_normal(3))
        worst = max(worst, abs(1.0 - math.sqrt(m @ m)))
    return worst < 1e-9, f"max |1-|m|| = {worst:.2e}"


def _rhs_orthogonal():
    p = DeviceParams()
    rng = np.random.default_rng(2)
    m = rng.standard_normal((3, 1000))
    m /= np.linalg.norm(m, axis=0)
    h = rng.standard_normal((3, 1000)) * 1e6
    i_s = rng.standard_normal((3, 1000)) * 1e-4
    v = llg_rhs(m, h, i_s, p)
    rel = np.max(np.abs(np.sum(v * m, axis=0)) / np.linalg.norm(v, axis=0))
    return rel < 1e-12, f"max |v.m|/|v| = {rel:.2e}"


def _demag_trace():
    s = sum(demag_factors(DeviceParams()))
    return abs(s - 1) < 1e-9, f"Nx+Ny+Nz-1 = {s - 1:.1e}"


def _pole_fixed_point():
    p = DeviceParams()
    m = np.array([0.0, 0.0, -1.0])
    v = llg_rhs(m, deterministic_field(m, 0.7, p), np.zeros(3), p)
    return bool(np.all(v == 0)), "dm/dt at the pole"


def _map_orthogonal():
    fm = velocity_field_map(0.7, DeviceParams(), grid_n=12)
    rel = np.max(np.abs(np.sum(fm.v * fm.m, axis=0))) / max(np.max(np.abs(fm.v)), 1e-300)
    return rel < 1e-12, f"max |v.m| rel = {rel:.2e}"


def _wilson_bounds():
    ok = all(0 <= lo <= k / n <= hi <= 1 for n in (1, 10, 4000) for k in (0, n // 3, n)
             for lo, hi in [wilson_interval(k, n)])
    return ok, "Wilson interval contains the estimate"


def _classify_counts():
    spec = CrossbarSpec.uniform(5, 7)
    _, counts = classify(spec, (2, 3))
    return counts == (1, 10, 24), f"counts {counts}"


def _sneak_2x2():
    r0 = 5e3
    res = sneak_solve(np.full((2, 2), 1 / r0), 1, 1, 0.7)
    ok = abs(res.currents[1, 1] - 0.7 / r0) < 1e-12 * 0.7 / r0 and \
        abs(abs(res.currents[0, 0]) - 0.7 / (3 * r0)) < 1e-12 * 0.7 / r0
    return ok, "2x2 selected U/R0 and sneak U/(3 R0)"


def _disturb_mc():
    spec = CrossbarSpec.uniform(3, 3)
    d = write_disturb(spec, 0.9, 0.05)
    dist, _ = simulate_disturb(3, 3, 0.9, 0.05, 2000, np.random.default_rng(3))
    se = dist.std(ddof=1) / math.sqrt(dist.size)
    return abs(dist.mean() - d.expected_disturbed) < 4 * se, \
        f"closed form {d.expected_disturbed:.3f} vs MC {dist.mean():.3f}"


def _c2_two_spikes():
    return abs(c2_order([0.3, 0.3 + math.pi]) - 1) < 1e-12, "C2 of two antipodal spikes"


CHECKS = [
    ("heun preserves |m|", _norm_preserved),
    ("llg_rhs orthogonal to m", _rhs_orthogonal),
    ("demag trace", _demag_trace),
    ("pole is a fixed point", _pole_fixed_point),
    ("field map orthogonal", _map_orthogonal),
    ("Wilson interval", _wilson_bounds),
    ("crossbar classes", _classify_counts),
    ("nodal 2x2", _sneak_2x2),
    ("disturb closed form", _disturb_mc),
    ("C2 metric", _c2_two_spikes),
]


def run_checks():
    """List of ``(name, passed, detail)``."""
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
