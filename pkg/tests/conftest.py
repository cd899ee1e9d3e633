import pytest

from nilcat.catenoid import build_catenoid


@pytest.fixture(scope="session")
def cat_models():
    """Horizontal catenoid models, built once per test session."""
    cache = {}

    def get(alpha):
        if alpha not in cache:
            cache[alpha] = build_catenoid(alpha)
        return cache[alpha]

    return get


@pytest.fixture(scope="session")
def cat1(cat_models):
    return cat_models(1.0)


@pytest.fixture(scope="session")
def cat2(cat_models):
    return cat_models(2.0)
