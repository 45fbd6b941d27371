import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from paretolab.domain import Box
from paretolab.gp import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_box():
    return Box((0.0, 0.0), (1.0, 1.0))


@pytest.fixture
def small_dataset(rng, unit_box):
    X = rng.uniform(0.05, 0.95, (6, 2))
    y = np.sin(4 * X[:, 0]) + X[:, 1] ** 2 + 0.1 * rng.normal(size=6)
    return Dataset(X, y, unit_box)


@pytest.fixture
def line_box():
    return Box((0.0,), (10.0,))
