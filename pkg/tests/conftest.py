import pytest

from cayleykit.cayley import CayleyComplexBall, build_ball
from cayleykit.zoo import zoo_group


@pytest.fixture(scope="session")
def z2():
    return zoo_group("Zd:2")


@pytest.fixture(scope="session")
def z3():
    return zoo_group("Zd:3")


@pytest.fixture(scope="session")
def free2():
    return zoo_group("free:2")


@pytest.fixture(scope="session")
def surface2():
    return zoo_group("surface2")


@pytest.fixture(scope="session")
def z2_ball8(z2):
    return build_ball(z2, 8)


@pytest.fixture(scope="session")
def z2_complex8(z2_ball8):
    return CayleyComplexBall(z2_ball8)


@pytest.fixture(scope="session")
def z3_complex8(z3):
    return CayleyComplexBall(build_ball(z3, 8))


@pytest.fixture(scope="session")
def free2_ball5(free2):
    return build_ball(free2, 5)


@pytest.fixture(scope="session")
def surface2_ball6(surface2):
    return build_ball(surface2, 6, max_vertices=500_000)


@pytest.fixture(scope="session")
def surface2_complex6(surface2_ball6):
    return CayleyComplexBall(surface2_ball6)


@pytest.fixture(scope="session")
def lamplighter_ball9():
    return build_ball(zoo_group("lamplighter"), 9)
