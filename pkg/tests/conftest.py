import os
import pytest
from hypothesis import HealthCheck, settings
from app.group.words import Params

settings.register_profile("bs", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "bs"))


@pytest.fixture
def bs23():
    return Params(2, 3)


@pytest.fixture
def bs42():
    return Params(4, 2)


@pytest.fixture
def bs22():
    return Params(2, 2)
