import numpy as np
import pytest

from optdesign import make_model


@pytest.fixture(scope="session")
def one_factor():
    """Affine model on [0, 1]: f(x) = (1, x)."""
    return make_model(1, "linear")


@pytest.fixture(scope="session")
def two_factor():
    """Additive model on the unit square: f(x) = (1, x1, x2)."""
    return make_model(2, "additive")


@pytest.fixture()
def rng():
    return np.random.default_rng(20240101)
