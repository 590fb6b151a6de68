import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("thermosym", max_examples=25, deadline=None)
settings.load_profile("thermosym")


def random_density(dim, rng):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
