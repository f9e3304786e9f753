import pytest
from hypothesis import HealthCheck, settings

from ellface import ModelParams
from ellface.scaling_limit import TrigParams

settings.register_profile("ellface", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ellface")


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def params_c1():
    return ModelParams(c=1.0)


@pytest.fixture
def trig():
    return TrigParams()
