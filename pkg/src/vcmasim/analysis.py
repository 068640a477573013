"""Robustness analysis near the south pole: field decomposition, velocity maps, exit windows."""
import csv
from collections import Counter
from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate, special

from .device import K_B, MU_0, demag_factors, deterministic_field, k_eff, spin_current
from .dynamics import SolverConfig, llg_rhs, run_trials
from .waveform import vcma_pulse

AXES = "xyz"


def field_components(m, u, params):
    """Signed deterministic field components (Hx, Hy, Hz) in A/m at ``m``."""
    h = deterministic_field(np.asarray(m, dtype=float), u, params)
    return h[0], h[1], h[2]


def _quadratic_energy_coeffs(u, params):
    """Energy E = ax mx^2 + ay my^2 + az mz^2 (J) of the uniform state."""
    nx, ny, nz = demag_factors(params)
    c = 0.5 * MU_0 * params.ms ** 2 * params.volume
    return c * nx, c * ny, c * nz - k_eff(u, params) * params.area


def _south_log_density(u, params, temperature=None):
    """Unnormalized log density of m_z on [-1, 0] for Boltzmann equilibrium.

    The azimuth is integrated out analytically, which leaves a Bessel I0
    factor from the in-plane anisotropy.
    """
    t = params.temperature if temperature is None else temperature
    beta = 1.0 / (K_B * t)
    ax, ay, az = _quadratic_energy_coeffs(u, params)
    e_ref = az  # energy at the pole, keeps the exponent near zero

    def logw(mz):
        s = 1.0 - mz * mz
        a = beta * s * (ax - ay) / 2.0
        e = az * mz * mz + s * (ax + ay) / 2.0
        return -beta * (e - e_ref) + np.log(special.i0e(np.abs(a))) + np.abs(a)

    return logw


def boltzmann_mz_cdf(mz, u, params, temperature=None):
    """CDF of m_z in the southern well at thermal equilibrium."""
    logw = _south_log_density(u, params, temperature)
    pdf = lambda z: math.exp(logw(z))
    # the density is sharply peaked at -1; give quad the scale of the well
    total = integrate.quad(pdf, -1.0, 0.0, points=[-0.99, -0.9], limit=200)[0]
    mz = np.atleast_1d(np.asarray(mz, dtype=float))
    out = np.array([integrate.quad(pdf, -1.0, min(max(z, -1.0), 0.0),
                                   points=[p for p in (-0.99, -0.9) if p < z], limit=200)[0]
                    for z in mz]) / total
    return out


def thermal_rms_tilt(params, u=0.0, temperature=None):
    """RMS polar angle (rad) from the south pole at Boltzmann equilibrium."""
    logw = _south_log_density(u, params, temperature)
    pdf = lambda z: math.exp(logw(z))
    th2 = lambda z: math.acos(min(1.0, -z)) ** 2 * pdf(z)
    pts = [-0.99, -0.9]
    total = integrate.quad(pdf, -1.0, 0.0, points=pts, limit=200)[0]
    return math.sqrt(integrate.quad(th2, -1.0, 0.0, points=pts, limit=200)[0] / total)


def south_cap_vectors(tilts, phis):
    """Unit vectors at polar angle ``tilt`` from -z and azimuth ``phi``; shape (3, n)."""
    t, p = np.meshgrid(np.asarray(tilts, float), np.asarray(phis, float), indexing="ij")
    t, p = t.ravel(), p.ravel()
    return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), -np.cos(t)]), t, p


def _ordering_label(order):
    return " < ".join(f"|H{AXES[k]}|" for k in order)


@dataclass(frozen=True)
class OrderingVerdict:
    """Majority ordering of the axis field strengths over a sample grid."""

    order: tuple  # axis letters, weakest first
    agreement: float
    n_points: int
    metric: str
    tilt: float
    counts: dict

    @property
    def label(self):
        return " < ".join(f"|H{a}|" for a in self.order)


def ordering_in_cap(u, params, cap_angle=math.radians(30), grid_n=24, tilt=None, metric="stiffness"):
    """Majority ordering of |Hx|, |Hy|, |Hz| near the south pole.

    ``metric="stiffness"`` compares the restoring strength of each axis,
    ``|H_i| / |m_i|``, on a uniform (tilt, azimuth) grid covering the cap; it
    is the per-unit-displacement field and is what decides along which axis
    the pole gives way first.  ``metric="magnitude"`` compares the raw
    component magnitudes on the ring at the representative ``tilt``
    (default: the thermal RMS tilt at zero bias).
    """
    if not 0 < cap_angle < math.pi / 2:
        raise ValueError("cap_angle must lie in (0, pi/2)")
    if int(grid_n) < 2:
        raise ValueError("grid_n must be >= 2")
    n = int(grid_n)
    if tilt is None:
        tilt = thermal_rms_tilt(params)
    # half-cell offsets keep every sample off the axes where an m component vanishes
    phis = 2 * math.pi * (np.arange(n) + 0.5) / n
    if metric == "stiffness":
        tilts = cap_angle * (np.arange(n) + 0.5) / n
    elif metric == "magnitude":
        tilts = [tilt]
    else:
        raise ValueError(f"unknown metric {metric!r}")
    m, _, _ = south_cap_vectors(tilts, phis)
    h = np.abs(deterministic_field(m, u, params))
    vals = h / np.abs(m) if metric == "stiffness" else h
    orders = [tuple(np.argsort(vals[:, k], kind="stable")) for k in range(vals.shape[1])]
    counts = Counter(orders)
    best, hits = counts.most_common(1)[0]
    return OrderingVerdict(tuple(AXES[k] for k in best), hits / len(orders), len(orders), metric,
                           float(tilt), {_ordering_label(k): v for k, v in counts.items()})


@dataclass
class FieldMap:
    """Deterministic velocity field on a latitude-longitude grid.

    ``theta`` is the polar angle from +z.  ``precession`` (optional) holds the
    three separated fields ``-m x (H_i e_i)``, shape (3 axes, 3, n).
    """

    theta: np.ndarray
    phi: np.ndarray
    m: np.ndarray  # (3, n)
    v: np.ndarray  # (3, n)
    h: np.ndarray  # (3, n)
    precession: np.ndarray = None

    HEADER = ["theta", "phi", "mx", "my", "mz", "vx", "vy", "vz", "Hx", "Hy", "Hz"]

    def to_csv(self, path, meta=None):
        import json
        with open(path, "w", newline="") as fh:
            for key, value in (meta or {}).items():
                fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.HEADER)
            cols = np.vstack([self.theta, self.phi, self.m, self.v, self.h])
            for row in cols.T:
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        if lines[0].strip().split(",") != cls.HEADER:
            raise ValueError("unexpected field map header")
        d = np.loadtxt(lines[1:], delimiter=",", ndmin=2).T
        return cls(d[0], d[1], d[2:5], d[5:8], d[8:11])


def velocity_field_map(u, params, grid_n=36, cap_angle=None, include_stt=False, precession=False):
    """Deterministic dm/dt (no thermal field) over the sphere or a south polar cap.

    Uses ``llg_rhs`` itself, so the map cannot drift from the dynamics.
    """
    n = int(grid_n)
    if n < 8:
        raise ValueError("grid_n must be >= 8")
    top = math.pi if cap_angle is None else float(cap_angle)
    tilts = np.linspace(0.0, top, n)
    phis = 2 * math.pi * np.arange(n) / n
    m, t, p = south_cap_vectors(tilts, phis)
    h = deterministic_field(m, u, params)
    i_s = spin_current(u, m, params) if include_stt else np.zeros_like(m)
    v = llg_rhs(m, h, i_s, params)
    sep = None
    if precession:
        sep = np.zeros((3, 3, m.shape[1]))
        for k in range(3):
            hk = np.zeros_like(h)
            hk[k] = h[k]
            sep[k] = -np.cross(m, hk, axis=0)
    return FieldMap(math.pi - t, p, m, v, h, sep)


def c2_order(phis):
    """Bimodal order parameter |<exp(2 i phi)>|; 1 for two antipodal spikes."""
    phis = np.asarray(phis, dtype=float)
    if phis.size == 0:
        return float("nan")
    return float(abs(np.mean(np.exp(2j * phis))))


@dataclass
class ExitHistogram:
    """Azimuths at which trajectories first leave the cap around the south pole.

    ``c2`` is this package's robustness measure (not a quantity of the
    underlying physics): the second circular moment of the exit azimuths.
    """

    edges: np.ndarray
    counts: np.ndarray
    phis: np.ndarray
    n_no_exit: int
    c2: float
    theta_exit: float

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def window_axis(self):
        """Mean axis angle (mod pi) of the exit windows, in (-pi/2, pi/2]."""
        return 0.5 * float(np.angle(np.mean(np.exp(2j * self.phis))))

    def to_csv(self, path, meta=None):
        import json
        with open(path, "w", newline="") as fh:
            for key, value in (meta or {}).items():
                fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["phi_bin", "count"])
            for c, k in zip(self.centers, self.counts):
                w.writerow([repr(float(c)), int(k)])

    @staticmethod
    def read_csv(path):
        with open(path) as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        if lines[0].strip() != "phi_bin,count":
            raise ValueError("unexpected histogram header")
        d = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
        return d[:, 0], d[:, 1].astype(int)


def exit_histogram(u, params, config=SolverConfig(), n_trials=1000, seed=0, theta_exit=math.radians(30),
                   width=3e-9, bins=36, point_index=0, threads=1):
    """Exit azimuths of trajectories under a constant pulse at ``u``.

    Each trial is thermalized at zero bias, then driven for ``width``; the
    azimuth is taken at the first step whose polar angle from -z reaches
    ``theta_exit``.  Trials that stay inside for the whole pulse are counted
    in ``n_no_exit``.
    """
    if n_trials < 100:
        raise ValueError("n_trials must be >= 100")
    if not 0 < theta_exit < math.pi:
        raise ValueError("theta_exit must lie in (0, pi)")
    _, phi, step = run_trials(vcma_pulse(u, width), params, config, seed, n_trials, point_index,
                              threads, exit_mz=-math.cos(theta_exit))
    hit = step >= 0
    phis = phi[hit]
    edges = np.linspace(-math.pi, math.pi, int(bins) + 1)
    counts, _ = np.histogram(phis, edges)
    return ExitHistogram(edges, counts, phis, int(np.count_nonzero(~hit)), c2_order(phis), theta_exit)
