"""Counter-based random streams keyed by (seed, point, trial).

Every trial owns a Philox stream whose key depends only on the run seed, the
sweep point index and the trial index, so results do not depend on how trials
are batched or scheduled across workers.
"""
import numpy as np


def trial_generator(seed, point_index, trial_index):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(point_index), int(trial_index)))
    return np.random.Generator(np.random.Philox(ss))


class TrialStreams:
    """Standard-normal thermal kicks for a batch of trials, three per step."""

    def __init__(self, seed, trial_indices, point_index=0):
        self.trial_indices = np.asarray(trial_indices, dtype=np.int64)
        self._gens = [trial_generator(seed, point_index, k) for k in self.trial_indices]

    def __len__(self):
        return len(self._gens)

    def normals(self, n_steps):
        """Array of shape (n_trials, n_steps, 3)."""
        out = np.empty((len(self._gens), n_steps, 3))
        for j, gen in enumerate(self._gens):
            gen.standard_normal(out=out[j])
        return out
