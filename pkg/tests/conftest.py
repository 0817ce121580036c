import math

import pytest

from bmcontact import chart, parse_form
from bmcontact.sampling import GridConfig

TWO_PI = 2 * math.pi


@pytest.fixture
def grid():
    return GridConfig()


@pytest.fixture
def small_grid():
    return GridConfig(n_off=60, n_on=30)


@pytest.fixture
def s2xs1():
    ch = chart(["h", "theta", "phi"], [[-1, 1], [0, TWO_PI], [0, TWO_PI]], "h", 1)
    return parse_form("sin(phi)*D(theta) + cos(phi)*B", ch)


@pytest.fixture
def torus_b2():
    ch = chart(["z", "y", "phi"], [[-1, 1], [0, TWO_PI], [0, TWO_PI]], "z", 2)
    return parse_form("sin(phi)*B + cos(phi)*D(y)", ch)


@pytest.fixture
def torus_b1():
    ch = chart(["z", "y", "phi"], [[-1, 1], [0, TWO_PI], [0, TWO_PI]], "z", 1)
    return parse_form("sin(phi)*B + cos(phi)*D(y)", ch)


@pytest.fixture
def vertical():
    ch = chart(["t", "theta", "phi"], [[-1, 1], [0, TWO_PI], [0, TWO_PI]])
    return parse_form("cos(phi)*D(t) + sin(phi)*D(theta)", ch)
