import numpy as np
import pytest

from plap import EigenOptions, Weight, build_interval, principal_eigenpair


@pytest.fixture(scope="session")
def one():
    return Weight.constant(1.0)


@pytest.fixture(scope="session")
def interval_256():
    return build_interval(0.0, 1.0, 256)


@pytest.fixture(scope="session")
def interval_512():
    return build_interval(0.0, 1.0, 512)


@pytest.fixture(scope="session")
def pair_p2_256(interval_256, one):
    return principal_eigenpair(interval_256, one, 2.0)


@pytest.fixture(scope="session")
def pair_p2_512(interval_512, one):
    return principal_eigenpair(interval_512, one, 2.0)


@pytest.fixture(scope="session")
def pair_p3_256(interval_256, one):
    return principal_eigenpair(interval_256, one, 3.0)


@pytest.fixture(scope="session")
def pair_p3_512(interval_512, one):
    return principal_eigenpair(interval_512, one, 3.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
