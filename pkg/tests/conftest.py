import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def f2():
    from drinfeld.field import make_tower
    return make_tower(2, 1, 1)


@pytest.fixture(scope="session")
def f4():
    from drinfeld.field import make_tower
    return make_tower(2, 2, 1)


@pytest.fixture(scope="session")
def f8():
    from drinfeld.field import make_tower
    return make_tower(2, 1, 3)


@pytest.fixture(scope="session")
def f9():
    from drinfeld.field import make_tower
    return make_tower(3, 1, 2)


@pytest.fixture(scope="session")
def f3():
    from drinfeld.field import make_tower
    return make_tower(3, 1, 1)
