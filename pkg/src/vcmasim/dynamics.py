"""Stochastic LLG integration with the Stratonovich Heun scheme.

``llg_rhs`` and ``heun_step`` are the NumPy reference forms.  Monte Carlo
runs go through the compiled kernel in ``_kernel``, which advances each trial
independently from its own random stream, so a trial's result is
bit-identical whether it runs alone, inside any batch, or on any thread.
"""
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import asdict, dataclass, field, fields
import numpy as np

from .device import (Q_E, InvalidParameterError, deterministic_field,
                     spin_current, thermal_sigma)
from ._kernel import advance, kernel_constants
from .rng import TrialStreams

#: noise is drawn in blocks of this many steps; any value gives identical results
CHUNK_STEPS = 256
#: trials per work item when running in parallel
BLOCK_TRIALS = 500


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-12
    t_init: float = 3e-9
    t_relax: float = 3e-9
    record_stride: int = 10
    scheme: str = "heun"

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt!r}")
        if self.t_init < 0 or self.t_relax < 0:
            raise InvalidParameterError("t_init and t_relax must be >= 0")
        if int(self.record_stride) < 1:
            raise InvalidParameterError("record_stride must be >= 1")
        if self.scheme != "heun":
            raise InvalidParameterError(f"unknown scheme {self.scheme!r}; only 'heun' is available")

    def steps(self, duration):
        return int(round(duration / self.dt))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidParameterError(f"unknown solver parameter(s): {sorted(unknown)}")
        return cls(**data)


@dataclass
class Trajectory:
    """Recorded samples of one run, starting at the beginning of the waveform."""

    t: np.ndarray
    m: np.ndarray  # (n_samples, 3)
    u: np.ndarray
    switched: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.m[-1]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_s", "mx", "my", "mz", "U_V"])
            for t, m, u in zip(self.t, self.m, self.u):
                w.writerow([repr(float(t)), repr(float(m[0])), repr(float(m[1])), repr(float(m[2])), repr(float(u))])

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(t=data[:, 0], m=data[:, 1:4], u=data[:, 4], switched=bool(data[-1, 3] > 0))


def _cross(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def llg_rhs(m, h_eff, i_s, params):
    """Explicit dm/dt of the Gilbert-form LLG equation with an STT term.

    The implicit damping term is eliminated exactly:
    with ``A = -gamma m x H + m x (I_s x m) / (q N_s)``,
    ``dm/dt = (A + alpha m x A) / (1 + alpha^2)``.
    """
    m = np.asarray(m, dtype=float)
    a = -params.gamma * _cross(m, h_eff) + _cross(m, _cross(i_s, m)) / (Q_E * params.n_spins)
    return (a + params.alpha * _cross(m, a)) / (1.0 + params.alpha ** 2)


def _rhs(m, u, h_th, params):
    h = deterministic_field(m, u, params) + h_th
    return llg_rhs(m, h, spin_current(u, m, params), params)


def _normalize(m):
    return m / np.sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2])


def heun_step(m, u, dt, params, g):
    """One stochastic Heun step from ``m`` at constant voltage ``u``.

    ``g`` holds the standard-normal thermal samples for this step; the same
    thermal field is used in predictor and corrector.
    """
    h_th = thermal_sigma(params, dt) * np.asarray(g, dtype=float)
    f0 = _rhs(m, u, h_th, params)
    f1 = _rhs(m + dt * f0, u, h_th, params)
    return _normalize(m + 0.5 * dt * (f0 + f1))


class _Batch:
    """A batch of trials sharing one waveform, advanced by the compiled kernel."""

    def __init__(self, params, config, seed, trial_indices, point_index=0):
        self.params = params
        self.config = config
        self.streams = TrialStreams(seed, trial_indices, point_index)
        self.n = len(self.streams)
        self.m = np.zeros((3, self.n))
        self.m[2] = -1.0
        self.step = 0
        self.exit_mz = np.nan
        self.exit_phi = np.full(self.n, np.nan)
        self.exit_step = np.full(self.n, -1, dtype=np.int64)
        self._noisy = params.temperature > 0
        self._no_noise = np.empty((0, 0, 3))

    def advance(self, u, n_steps, watch=False):
        c = kernel_constants(self.params, u, self.config.dt)
        exit_mz = self.exit_mz if watch else np.nan
        done = 0
        while done < n_steps:
            k = min(CHUNK_STEPS, n_steps - done)
            g = self.streams.normals(k) if self._noisy else self._no_noise
            advance(self.m, c, g, k, exit_mz, self.exit_phi, self.exit_step, self.step)
            done += k
            self.step += k

    def thermalize(self):
        # the first stochastic step is the thermal kick off the exact pole
        self.advance(0.0, self.config.steps(self.config.t_init))
        self.step = 0


def sample_initial(params, config, seed, trial_index=0, point_index=0):
    """Thermalized starting state of one trial (near -z)."""
    batch = _Batch(params, config, seed, [trial_index], point_index)
    batch.thermalize()
    return batch.m[:, 0].copy()


def _check_waveform(waveform):
    for _, d in waveform.segments:
        if d < 0:
            raise ValueError("negative segment duration")


def _run_block(waveform, params, config, seed, trial_indices, point_index, exit_mz):
    batch = _Batch(params, config, seed, trial_indices, point_index)
    batch.thermalize()
    batch.exit_mz = exit_mz
    for u, d in waveform.segments:
        batch.advance(u, config.steps(d), watch=True)
    batch.advance(0.0, config.steps(config.t_relax))
    return batch


def run_trials(waveform, params, config, seed, n_trials, point_index=0, threads=1,
               exit_mz=np.nan):
    """Run trials ``0 .. n_trials-1`` and return ``(m_final, exit_phi, exit_step)``.

    ``m_final`` is ``(3, n_trials)``.  If ``exit_mz`` is finite, the azimuth and
    step index of each trial's first rise to ``m_z >= exit_mz`` during the
    waveform are reported (NaN / -1 when it never happens).
    """
    _check_waveform(waveform)
    blocks = [np.arange(s, min(s + BLOCK_TRIALS, n_trials)) for s in range(0, n_trials, BLOCK_TRIALS)]
    job = lambda idx: _run_block(waveform, params, config, seed, idx, point_index, exit_mz)
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(job, blocks))
    else:
        results = [job(b) for b in blocks]
    return (np.concatenate([b.m for b in results], axis=1),
            np.concatenate([b.exit_phi for b in results]),
            np.concatenate([b.exit_step for b in results]))


def simulate(waveform, params, config=SolverConfig(), seed=0, trial_index=0, point_index=0):
    """Run one trial and record its trajectory.

    Switching is judged by the sign of m_z after the zero-bias relaxation.
    """
    _check_waveform(waveform)
    batch = _Batch(params, config, seed, [trial_index], point_index)
    batch.thermalize()
    stride = int(config.record_stride)
    ts, ms, us = [0.0], [batch.m[:, 0].copy()], [waveform.segments[0][0]]
    for u, d in list(waveform.segments) + [(0.0, config.t_relax)]:
        left = config.steps(d)
        while left > 0:
            k = min(left, stride - batch.step % stride)
            batch.advance(u, k)
            left -= k
            if batch.step % stride == 0:
                ts.append(batch.step * config.dt)
                ms.append(batch.m[:, 0].copy())
                us.append(u)
    if batch.step % stride != 0:
        ts.append(batch.step * config.dt)
        ms.append(batch.m[:, 0].copy())
        us.append(0.0)
    m = batch.m
    traj = Trajectory(t=np.array(ts), m=np.array(ms), u=np.array(us), switched=bool(m[2, 0] > 0))
    traj.meta = {"seed": seed, "trial_index": trial_index, "point_index": point_index}
    return traj
