import numpy as np
import pytest
from hypothesis import settings

settings.register_profile('vertexlab', max_examples=25, deadline=None)
settings.load_profile('vertexlab')


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def relative_gap(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.fixture
def rel():
    return relative_gap
