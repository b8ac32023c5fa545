from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hrvkit import SampleMatrix


@pytest.fixture
def small_matrix() -> SampleMatrix:
    return SampleMatrix(np.array([[5.0, 9.0], [1.0, 4.0], [3.0, 7.0]]))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240801)
