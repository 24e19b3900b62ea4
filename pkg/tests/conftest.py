"""
Shared fixtures for the NCL solver test suite
"""

import os
import sys

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from nclsolver.model import ModelBuilder  # noqa: E402
from nclsolver.problems import build  # noqa: E402

INSTANCE_DIR = os.path.join(os.path.dirname(__file__), "..", "instances")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def instance_dir():
    return INSTANCE_DIR


@pytest.fixture
def hs71():
    return build("hs71")


@pytest.fixture
def mpcc_basic():
    return build("mpcc-basic")


@pytest.fixture
def bounded_qp():
    """min (t1-1)^2 + (t2-2)^2 + t1 t3 s.t. t1 + t2 + t3 = 1, 0 <= t1 <= 4, -1 <= t1 - t3 <= 1, t3 free"""
    mb = ModelBuilder("bounded-qp")
    t1 = mb.add_variable("t1", lower=0.0, upper=4.0, start=0.5)
    t2 = mb.add_variable("t2", lower=0.0, start=0.5)
    t3 = mb.add_variable("t3", start=0.0)
    mb.minimize((t1 - 1) ** 2 + (t2 - 2) ** 2 + 0.5 * t1 * t3 + t3**2)
    mb.add_equality(t1 + t2 + t3, rhs=1.0)
    mb.add_inequality(t1 - t3, lower=-1.0, upper=1.0)
    mb.add_inequality(t1 * t2, upper=3.0)
    return mb.build()
