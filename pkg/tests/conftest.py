from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")


@pytest.fixture
def four_items():
    from sossched.model import MinCkpInstance
    return MinCkpInstance(c=[2, 3, 4, 5], p=[1, 2, 3, 4], q=[4, 3, 2, 1], capacity=49)


@pytest.fixture
def unit_square():
    from sossched.model import MinCkpInstance
    return MinCkpInstance(c=[1, 1], p=[1, 0], q=[0, 1], capacity=1)


def fr(text):
    return Fraction(text)
