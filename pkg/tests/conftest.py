import numpy as np
import pytest

from chur.grid import GridSpec
from chur.states import GaussianSpec, RandomStateSpec, make_gaussian, make_random


@pytest.fixture(scope="session")
def grid():
    """Default test grid: 4096 points over 40 natural units, hbar = 1."""
    return GridSpec(4096, 40.0)


@pytest.fixture(scope="session")
def ground(grid):
    """Ground Gaussian with unit position standard deviation."""
    return make_gaussian(GaussianSpec(1.0), grid)


@pytest.fixture(scope="session")
def random_states(grid):
    """Small ensemble of seeded Hermite-mode states (complex amplitudes)."""
    return [make_random(RandomStateSpec(seed=s), grid) for s in range(8)]


@pytest.fixture()
def rng():
    return np.random.default_rng(20240901)
