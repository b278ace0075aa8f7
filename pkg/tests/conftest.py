"""Global pytest configuration and fixtures."""

import math
import os

import numpy as np
import pytest

from entropy_lab.inequalities.radial import extremal_profile, gaussian
from entropy_lab.inequalities.search import SearchBudget

# Keep the numerical settings at their defaults whatever the shell exports
for _name in [k for k in os.environ if k.startswith("ENTROPY_LAB_")]:
    os.environ.pop(_name)


@pytest.fixture(scope="session", autouse=True)
def setup_test_environment():
    """Set up global test environment."""
    os.environ["TESTING"] = "true"
    yield
    os.environ.pop("TESTING", None)


@pytest.fixture
def rng():
    """Seeded generator for randomized inputs."""
    return np.random.default_rng(12345)


@pytest.fixture
def small_budget():
    """Search budget small enough for unit tests."""
    return SearchBudget(restarts=2, max_evals=60, seed=0)


@pytest.fixture
def extremal_3_2():
    """Unit-mass entropy extremal for n=3, p=2."""
    return extremal_profile(3, 2.0)


@pytest.fixture
def unit_gaussian():
    """exp(-|x|^2), not normalized."""
    return gaussian()


@pytest.fixture
def s3_volume():
    """Volume of the unit round three-sphere."""
    return 2.0 * math.pi**2
