import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "qipkit",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qipkit")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(dim, rng, scale=1.0):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (g + g.conj().T) / 2
