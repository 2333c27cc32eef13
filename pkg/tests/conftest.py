import pytest

from ap_pusher import DiskField, UniformField, Vec2

X0 = Vec2(2.0, 2.0)
V0 = Vec2(3.0, 3.0)


@pytest.fixture(scope="session")
def disk():
    return DiskField()


@pytest.fixture(scope="session")
def uniform():
    return UniformField()
