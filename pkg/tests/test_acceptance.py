"""Acceptance gate: one test per criterion, at the stated tolerances.

Run with ``pytest -v tests/test_acceptance.py``; each test prints a PASS/FAIL
line with the measured numbers (visible with ``-s`` or on failure).
"""
from fractions import Fraction
import math
import time

import numpy as np
from scipy import stats

from vcmasim import cli
from vcmasim._kernel import advance, kernel_constants
from vcmasim.analysis import boltzmann_mz_cdf, exit_histogram, ordering_in_cap
from vcmasim.crossbar import CrossbarSpec, simulate_disturb, sneak_solve, write_disturb
from vcmasim.device import DeviceParams, demag_factors, energy
from vcmasim.dynamics import SolverConfig, heun_step, llg_rhs, run_trials
from vcmasim.montecarlo import (compare_pure_stt, estimate_probability, first_local_max,
                                half_select_contrast, sweep_amplitude, sweep_width)
from vcmasim.waveform import combined_pulse, vcma_pulse

from test_crossbar import mna_oracle

NS = 1e-9
N_TRIALS = 4000
SEED = 2024
PARAMS = DeviceParams()
CONFIG = SolverConfig()


def verdict(name, checks):
    """Print one line per criterion and fail with every violated check listed."""
    bad = [msg for ok, msg in checks if not ok]
    print(f"\n{'PASS' if not bad else 'FAIL'}  {name}")
    for ok, msg in checks:
        print(f"    [{'ok' if ok else 'XX'}] {msg}")
    assert not bad, f"{name}: " + "; ".join(bad)


def fmt(e):
    return f"{e.p:.4f} [{e.ci_low:.4f}, {e.ci_high:.4f}]"


def test_01_norm_and_orthogonality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    # 1000 independent trajectories x 1000 noisy steps = 1e6 Heun steps
    m = rng.standard_normal((3, 1000))
    m /= np.linalg.norm(m, axis=0)
    worst = 0.0
    for k in range(1000):
        m = heun_step(m, 0.7 if k % 2 else 0.0, 1e-12, PARAMS, rng.standard_normal(m.shape))
        worst = max(worst, float(np.max(np.abs(1.0 - np.linalg.norm(m, axis=0)))))
    mk, _, _ = run_trials(vcma_pulse(0.7, 0.5 * NS), PARAMS, SolverConfig(t_init=0.5 * NS, t_relax=0.0),
                          SEED, 1000)
    worst_kernel = float(np.max(np.abs(1.0 - np.linalg.norm(mk, axis=0))))

    mm = rng.standard_normal((3, 10_000))
    mm /= np.linalg.norm(mm, axis=0)
    h = rng.standard_normal((3, 10_000)) * 10 ** rng.uniform(3, 7, 10_000)
    i_s = rng.standard_normal((3, 10_000)) * 10 ** rng.uniform(-6, -3, 10_000)
    v = llg_rhs(mm, h, i_s, PARAMS)
    orth = float(np.max(np.abs(np.sum(v * mm, axis=0)) / np.linalg.norm(v, axis=0)))
    elapsed = time.perf_counter() - t0
    verdict("1 norm and structure", [
        (worst < 1e-9, f"reference steps: max |1-|m|| = {worst:.2e} < 1e-9"),
        (worst_kernel < 1e-9, f"compiled kernel: max |1-|m|| = {worst_kernel:.2e} < 1e-9"),
        (orth < 1e-12, f"llg_rhs: max |v.m|/|v| = {orth:.2e} < 1e-12"),
        (elapsed < 10, f"runtime {elapsed:.1f} s < 10 s"),
    ])


def test_02_energy_conservation():
    nx, ny, _ = demag_factors(PARAMS)
    inplane = (nx + ny) / 2
    p = PARAMS.replace(alpha=0.0, temperature=0.0, demag=(inplane, inplane, 1 - 2 * inplane))
    t = math.radians(10)
    m = np.array([[math.sin(t)], [0.0], [math.cos(t)]])
    e0 = energy(m[:, 0], 0.0, p)
    c = kernel_constants(p, 0.0, 1e-12)  # U = 0, so the spin current is zero
    drift = 0.0
    for _ in range(100):
        advance(m, c, np.empty((0, 0, 3)), 100, np.nan, np.full(1, np.nan), np.full(1, -1, dtype=np.int64), 0)
        drift = max(drift, abs(energy(m[:, 0], 0.0, p) - e0) / abs(e0))
    verdict("2 conservation", [(drift < 1e-4, f"relative energy drift over 1e4 steps = {drift:.3e} < 1e-4")])


def test_03_thermal_equilibrium():
    n = 100_000
    cfg = SolverConfig(t_init=3 * NS, t_relax=0.0)
    m, _, _ = run_trials(vcma_pulse(0.0, 1 * NS), PARAMS, cfg, SEED, n)
    mz = np.sort(m[2])
    cdf = boltzmann_mz_cdf(mz, 0.0, PARAMS)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
    crit = float(stats.kstwo.ppf(0.99, n))
    verdict("3 thermal equilibrium", [(d < crit, f"KS D = {d:.5f} < 1% critical {crit:.5f} (n = {n})")])


def test_04_width_sweep():
    widths = [w * NS for w in (0.4, 0.7, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.6, 3.0, 3.4, 3.8, 4.4, 5.0,
                               21.0, 25.0, 29.0)]
    curve = sweep_width(0.7, widths, PARAMS, CONFIG, N_TRIALS, SEED)
    for w, e in zip(curve.x, curve.estimates):
        print(f"    width {w / NS:5.1f} ns  P = {fmt(e)}")
    p = curve.p
    lo, hi = curve.ci_low, curve.ci_high
    i = first_local_max(curve)
    # a significant valley after the first peak and a significant rise after it
    later = [j for j in range(i + 1, len(p)) if curve.x[j] < 20 * NS]
    j = min(later, key=lambda k: p[k])
    k_before_tail = max((q for q in range(j + 1, len(p)) if curve.x[q] < 20 * NS), key=lambda q: p[q],
                        default=j)
    oscillates = hi[j] < lo[i] and hi[j] < lo[k_before_tail]
    tail = [(w, e) for w, e in zip(curve.x, curve.estimates) if w > 20 * NS]
    verdict("4 width sweep at 0.7 V", [
        (oscillates, f"oscillation: peak {p[i]:.3f} at {curve.x[i] / NS:.1f} ns, valley {p[j]:.3f} at "
                     f"{curve.x[j] / NS:.1f} ns, next peak {p[k_before_tail]:.3f} at {curve.x[k_before_tail] / NS:.1f} ns"),
        (1.4 * NS <= curve.x[i] <= 2.2 * NS, f"first maximum at {curve.x[i] / NS:.1f} ns in [1.4, 2.2]"),
        (p[i] > 0.85, f"first maximum P = {p[i]:.4f} > 0.85"),
        (abs(p[i] - 0.921) <= 0.05, f"first maximum P = {p[i]:.4f} within 0.921 +- 0.05"),
    ] + [(abs(e.p - 0.5) <= 0.05, f"P({w / NS:.0f} ns) = {e.p:.4f} within 0.50 +- 0.05") for w, e in tail])


def test_05_amplitude_sweep():
    amps = [0.5, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 1.0]
    curve = sweep_amplitude(1.8 * NS, amps, PARAMS, CONFIG, N_TRIALS, SEED)
    est = dict(zip(amps, curve.estimates))
    for u, e in est.items():
        print(f"    {u:.2f} V  P = {fmt(e)}")
    plateau_u = max((u for u in amps if u <= 0.8), key=lambda u: est[u].p)
    plateau = est[plateau_u]
    verdict("5 amplitude sweep at 1.8 ns", [
        (est[0.5].p < 0.2, f"P(0.5 V) = {est[0.5].p:.4f} < 0.2"),
        (est[0.7].p > 0.85, f"P(0.7 V) = {est[0.7].p:.4f} > 0.85"),
    ] + [(est[u].ci_high < plateau.ci_low,
          f"P({u:.2f} V) = {fmt(est[u])} below plateau {fmt(plateau)} at {plateau_u:.2f} V")
         for u in amps if u > 0.8])


FOLLOW = [w * NS for w in (1.0, 3.0, 5.0, 7.0, 9.0)]


def test_06_combined_vs_pure_stt():
    comb, pure = compare_pure_stt(FOLLOW, PARAMS, CONFIG, N_TRIALS, SEED)
    checks = []
    for w, c, s in zip(comb.x, comb.estimates, pure.estimates):
        print(f"    follow {w / NS:.0f} ns  combined {fmt(c)}  pure STT {fmt(s)}")
        checks.append((c.ci_low - s.ci_high >= 0.2,
                       f"{w / NS:.0f} ns: combined lower bound {c.ci_low:.4f} exceeds pure upper bound "
                       f"{s.ci_high:.4f} by >= 0.2"))
    c9 = comb.estimates[-1]
    verdict("6 combined pulse", [(c9.p >= 0.95, f"combined P(9 ns) = {c9.p:.4f} >= 0.95")] + checks)


def test_07_half_select():
    full, half = half_select_contrast([9 * NS], PARAMS, CONFIG, N_TRIALS, SEED)
    f, h = full.estimates[0], half.estimates[0]
    verdict("7 half-select contrast at 9 ns", [
        (h.p < 0.01, f"half-selected P = {fmt(h)} < 0.01"),
        (f.p > 0.95, f"selected P = {fmt(f)} > 0.95"),
    ])


def test_08_field_ordering_and_exit_windows():
    v07 = ordering_in_cap(0.7, PARAMS)
    v08 = ordering_in_cap(0.8, PARAMS)
    h07 = exit_histogram(0.7, PARAMS, CONFIG, 1000, SEED, point_index=0)
    h08 = exit_histogram(0.8, PARAMS, CONFIG, 1000, SEED, point_index=1)
    verdict("8 field orderings and exit windows", [
        (v07.order == ("x", "z", "y") and v07.agreement >= 0.9,
         f"0.7 V ordering {v07.label} ({v07.agreement:.0%}); expected |Hx| < |Hz| < |Hy|"),
        (v08.order == ("x", "y", "z") and v08.agreement >= 0.9,
         f"0.8 V ordering {v08.label} ({v08.agreement:.0%}); expected |Hx| < |Hy| < |Hz|"),
        (h07.c2 - h08.c2 >= 0.3,
         f"C2(0.7 V) = {h07.c2:.3f} ({h07.n_no_exit} no exit), C2(0.8 V) = {h08.c2:.3f} "
         f"({h08.n_no_exit} no exit), difference {h07.c2 - h08.c2:.3f} >= 0.3"),
    ])


def test_09_nodal_solver():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(100):
        r, c = rng.integers(1, 7, 2)
        g = 1.0 / rng.uniform(1e3, 1e5, (r, c))
        i, j = int(rng.integers(r)), int(rng.integers(c))
        u = rng.uniform(0.1, 1.0)
        res = sneak_solve(g, i, j, u)
        rv, cv = mna_oracle(g, i, j, u)
        worst = max(worst, float(np.max(np.abs(np.concatenate([res.row_v - rv, res.col_v - cv])))) / u)
    r0 = 7e3
    res = sneak_solve(np.full((2, 2), 1 / r0), 1, 1, 0.7)
    sel_err = abs(res.currents[1, 1] - 0.7 / r0) / (0.7 / r0)
    sneak_err = max(abs(abs(res.currents[a, b]) - 0.7 / (3 * r0)) for a, b in [(0, 0), (0, 1), (1, 0)]) / (0.7 / (3 * r0))
    elapsed = time.perf_counter() - t0
    verdict("9 nodal solver", [
        (worst < 1e-9, f"100 random arrays: max relative voltage error {worst:.2e} < 1e-9"),
        (sel_err < 1e-12 and sneak_err < 1e-12, f"2x2: selected error {sel_err:.1e}, sneak error {sneak_err:.1e} < 1e-12"),
        (elapsed < 5, f"runtime {elapsed:.2f} s < 5 s"),
    ])


def test_10_disturb_model():
    checks = []
    for n, p_sel, p_half in [(3, 0.95, 0.03), (8, 0.95, 0.01)]:
        rep = write_disturb(CrossbarSpec.uniform(n, n), p_sel, p_half)
        dist, failed = simulate_disturb(n, n, p_sel, p_half, 2000, np.random.default_rng(n))
        for name, sample, expected in [("disturbed", dist, rep.expected_disturbed),
                                       ("failed", failed, rep.expected_failed)]:
            half = 1.96 * sample.std(ddof=1) / math.sqrt(sample.size)
            checks.append((abs(sample.mean() - expected) <= half,
                           f"{n}x{n} {name}: closed form {expected:.4f}, Monte Carlo {sample.mean():.4f} +- {half:.4f}"))
    rep = write_disturb(CrossbarSpec.uniform(128, 128), 1.0, 1e-4)
    exact = 128 * 128 * (1 - (1 - Fraction(1e-4)) ** 254)
    rel = abs(Fraction(rep.expected_disturbed) - exact) / exact
    checks.append((rel < 1e-9, f"128x128: {rep.expected_disturbed:.6f} vs exact {float(exact):.6f}, rel {float(rel):.1e}"))
    checks.append((round(rep.expected_disturbed) == 411, "about 411 expected disturbs"))
    verdict("10 disturb model", checks)


def test_11_convergence_and_determinism(tmp_path):
    checks = []
    for label, wave, idx in [("0.7 V, 1.8 ns", vcma_pulse(0.7, 1.8 * NS), 0),
                             ("combined, 9 ns follow", combined_pulse(0.7, 1.8 * NS, 0.6, 9 * NS), 1)]:
        a = estimate_probability(wave, PARAMS, SolverConfig(dt=1e-12), N_TRIALS, SEED, idx)
        b = estimate_probability(wave, PARAMS, SolverConfig(dt=0.5e-12), N_TRIALS, SEED, idx)
        width = max(a.ci_width, b.ci_width)
        checks.append((abs(a.p - b.p) < width,
                       f"{label}: P(dt) = {a.p:.4f}, P(dt/2) = {b.p:.4f}, shift {abs(a.p - b.p):.4f} < CI width {width:.4f}"))
    args = ["sweep-width", "--trials", "1200", "--seed", str(SEED), "--set", "experiment.widths=[1.8e-9]"]
    assert cli.main(args + ["--threads", "1", "--out", str(tmp_path / "t1")]) == 0
    assert cli.main(args + ["--threads", "8", "--out", str(tmp_path / "t8")]) == 0
    same = (tmp_path / "t1" / "sweep-width.csv").read_bytes() == (tmp_path / "t8" / "sweep-width.csv").read_bytes()
    checks.append((same, "--threads 1 and --threads 8 outputs byte-identical"))
    verdict("11 convergence and determinism", checks)
