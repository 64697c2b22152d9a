import pytest

from bushgeo import dyadic_bush


@pytest.fixture(scope="session")
def dyadic():
    """Shared dyadic bushes keyed by depth (construction is pure)."""
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = dyadic_bush(n)
        return cache[n]

    return get
