import os
import random

import pytest
from hypothesis import HealthCheck, settings

from linecomplex.field import GAUSS, RATIONAL, get_field

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=150)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def f64():
    return get_field("f64")


@pytest.fixture(params=["rational", "gauss"])
def exact_field(request):
    return RATIONAL if request.param == "rational" else GAUSS
