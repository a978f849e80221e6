import pytest

from detcover.variety import make_variety, projective_space

CONIC = "x0^2 + x1^2 - x2^2"
FERMAT_CUBIC = "x0^3 + x1^3 - x2^3"
CUSPIDAL_CUBIC = "x1^2*x2 - x0^3"
QUARTIC = "x0^4 - x1^3*x2"


@pytest.fixture
def conic():
    return make_variety([CONIC], 2)


@pytest.fixture
def fermat_cubic():
    return make_variety([FERMAT_CUBIC], 2)


@pytest.fixture
def cuspidal_cubic():
    return make_variety([CUSPIDAL_CUBIC], 2)


@pytest.fixture
def quartic():
    return make_variety([QUARTIC], 2)


@pytest.fixture
def p1():
    return projective_space(1)


@pytest.fixture
def no_real_points():
    return make_variety(["x0^2 + x1^2 + x2^2"], 2)
