import numpy as np
import pytest

from vcmasim.device import DeviceParams


@pytest.fixture
def params():
    return DeviceParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240518)


def unit_vectors(rng, n):
    v = rng.standard_normal((3, n))
    return v / np.linalg.norm(v, axis=0)
