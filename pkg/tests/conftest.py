import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chebylab.poly import ComplexPoly

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=100, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def bernoulli():
    return ComplexPoly([-1, 0, 1])


@pytest.fixture
def period_two():
    return ComplexPoly([-3, 0, 1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
