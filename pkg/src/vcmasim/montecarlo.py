"""Monte Carlo switching probabilities and the sweep curves built on them."""
import csv
from dataclasses import dataclass
import json
import math

import numpy as np

from .dynamics import SolverConfig, run_trials
from .waveform import combined_pulse, vcma_pulse

Z_95 = 1.959963984540054


def wilson_interval(k, n, z=Z_95):
    """Wilson score interval for k successes in n Bernoulli trials."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = k / n
    den = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    # clamp the rounding noise at k = 0 or k = n
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


@dataclass(frozen=True)
class SwitchEstimate:
    p: float
    n_trials: int
    n_switched: int
    ci_low: float
    ci_high: float
    seed: int
    point_index: int = 0

    @classmethod
    def from_counts(cls, n_switched, n_trials, seed, point_index=0):
        lo, hi = wilson_interval(n_switched, n_trials)
        return cls(n_switched / n_trials, n_trials, n_switched, lo, hi, seed, point_index)

    @property
    def ci_width(self):
        return self.ci_high - self.ci_low


def estimate_probability(waveform, params, config=SolverConfig(), n_trials=4000, seed=0,
                         point_index=0, threads=1):
    """Fraction of trials ending with m_z > 0 after the waveform and relaxation."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    m, _, _ = run_trials(waveform, params, config, seed, n_trials, point_index, threads)
    return SwitchEstimate.from_counts(int(np.count_nonzero(m[2] > 0)), n_trials, seed, point_index)


@dataclass
class Curve:
    """Switching probability against one swept quantity (SI units)."""

    x: np.ndarray
    estimates: list
    quantity: str = "x"

    @property
    def p(self):
        return np.array([e.p for e in self.estimates])

    @property
    def ci_low(self):
        return np.array([e.ci_low for e in self.estimates])

    @property
    def ci_high(self):
        return np.array([e.ci_high for e in self.estimates])

    def rows(self):
        for x, e in zip(self.x, self.estimates):
            yield [repr(float(x)), repr(e.p), repr(e.ci_low), repr(e.ci_high), e.n_trials, e.seed]

    def to_csv(self, path, meta=None):
        write_curve_csv(path, self, meta)

    @classmethod
    def from_csv(cls, path):
        return read_curve_csv(path)


CURVE_HEADER = ["x", "p", "ci_low", "ci_high", "n", "seed"]


def write_curve_csv(path, curve, meta=None):
    """Curve CSV; ``meta`` is embedded as ``#`` comment lines (one JSON each)."""
    with open(path, "w", newline="") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        w.writerows(curve.rows())


def read_curve_csv(path):
    xs, ests = [], []
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    if header != CURVE_HEADER:
        raise ValueError(f"unexpected curve header {header!r}")
    for row in reader:
        x, p, lo, hi, n, seed = row
        n = int(n)
        k = int(round(float(p) * n))
        xs.append(float(x))
        ests.append(SwitchEstimate(float(p), n, k, float(lo), float(hi), int(seed)))
    return Curve(np.array(xs), ests)


def _sweep(waveforms, xs, params, config, n, seed, threads, quantity):
    if len(xs) == 0:
        raise ValueError("sweep needs at least one point")
    ests = [estimate_probability(w, params, config, n, seed, point_index=i, threads=threads)
            for i, w in enumerate(waveforms)]
    return Curve(np.asarray(xs, dtype=float), ests, quantity)


def sweep_width(u, widths, params, config=SolverConfig(), n=4000, seed=0, threads=1):
    """Switching probability of a single pulse at amplitude ``u`` versus width."""
    return _sweep([vcma_pulse(u, w) for w in widths], widths, params, config, n, seed, threads, "width_s")


def sweep_amplitude(width, amplitudes, params, config=SolverConfig(), n=4000, seed=0, threads=1):
    """Switching probability at fixed pulse width versus amplitude."""
    return _sweep([vcma_pulse(u, width) for u in amplitudes], amplitudes, params, config, n, seed,
                  threads, "amplitude_V")


def _follow_waveforms(follow_widths, u_vcma, w_vcma, u_stt):
    out = []
    for w in follow_widths:
        out.append(combined_pulse(u_vcma, w_vcma, u_stt, w) if w > 0 else vcma_pulse(u_vcma, w_vcma))
    return out


def compare_pure_stt(follow_widths, params, config=SolverConfig(), n=4000, seed=0, threads=1,
                     u_vcma=0.7, w_vcma=1.8e-9, u_stt=0.6):
    """Combined VCMA+STT pulse against a pure STT pulse of the same total length.

    Both curves use the same per-point random streams.  A follow width of
    zero reduces the combined pulse to the bare VCMA pulse.
    """
    combined = _sweep(_follow_waveforms(follow_widths, u_vcma, w_vcma, u_stt), follow_widths,
                      params, config, n, seed, threads, "follow_width_s")
    pure = _sweep([vcma_pulse(u_stt, w_vcma + w) for w in follow_widths], follow_widths,
                  params, config, n, seed, threads, "follow_width_s")
    return combined, pure


def half_select_contrast(follow_widths, params, config=SolverConfig(), n=4000, seed=0, threads=1,
                         u_vcma=0.7, w_vcma=1.8e-9, u_stt=0.6):
    """Selected-cell and half-selected-cell curves for the combined set pulse."""
    full_w = _follow_waveforms(follow_widths, u_vcma, w_vcma, u_stt)
    full = _sweep(full_w, follow_widths, params, config, n, seed, threads, "follow_width_s")
    half = _sweep([w.half_select() for w in full_w], follow_widths, params, config, n, seed,
                  threads, "follow_width_s")
    return full, half


def first_local_max(curve):
    """Index of the first interior local maximum of ``curve.p`` (or the global max)."""
    p = curve.p
    for i in range(1, len(p) - 1):
        if p[i] >= p[i - 1] and p[i] > p[i + 1]:
            return i
    return int(np.argmax(p))
