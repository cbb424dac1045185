import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wdje import empirical_measure  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_measure(rng, n, dim=1, uniform=False):
    points = rng.normal(size=(n, dim))
    if uniform:
        return empirical_measure(points)
    weights = rng.uniform(0.1, 1.0, size=n)
    return empirical_measure(points, weights)
