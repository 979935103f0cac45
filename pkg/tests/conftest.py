import numpy as np
import pytest

from lcd.examples import get_example


@pytest.fixture(scope="session")
def flat2():
    return get_example("flat_euclidean", n=2)


@pytest.fixture(scope="session")
def flat3():
    return get_example("flat_euclidean", n=3)


@pytest.fixture(scope="session")
def horocycle():
    return get_example("hyperbolic_horocycle")


@pytest.fixture(scope="session")
def sphere2():
    return get_example("round_sphere_chart", n=2)


@pytest.fixture(scope="session")
def mechanical2():
    return get_example("mechanical", n=2)


@pytest.fixture(scope="session")
def contact1():
    return get_example("contact_sphere", d=1, s=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
