import numpy as np
import pytest

from pdl import classnum


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("pdl-cache")


@pytest.fixture(scope="session")
def table_1e5_forms(cache_dir):
    return classnum.sweep_class_numbers(10**5, "forms", cache_dir=cache_dir)


@pytest.fixture(scope="session")
def table_1e5_dirichlet(cache_dir):
    return classnum.sweep_class_numbers(10**5, "dirichlet", cache_dir=cache_dir)


@pytest.fixture(scope="session")
def table_4e6_forms(cache_dir):
    return classnum.sweep_class_numbers(4 * 10**6, "forms", cache_dir=cache_dir)


@pytest.fixture(scope="session")
def table_1e6_forms(table_4e6_forms):
    return table_4e6_forms.restrict(10**6)


def naive_primes(limit: int) -> np.ndarray:
    """Reference sieve, independent of the package implementation."""
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, int(limit**0.5) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return np.nonzero(mask)[0]
