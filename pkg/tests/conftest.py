import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_field(rng, h, w, ring_zero=False):
    f = rng.standard_normal((h, w))
    if ring_zero:
        f[0, :] = f[-1, :] = 0.0
        f[:, 0] = f[:, -1] = 0.0
    return f
