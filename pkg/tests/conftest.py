import pytest

from toricqh import catalog


@pytest.fixture(scope="session")
def corpus():
    return catalog.load_valid_examples()


@pytest.fixture(scope="session")
def o_minus_1():
    return catalog.load_example("o_minus_1")


@pytest.fixture(scope="session")
def cp1():
    return catalog.load_example("cp1")


@pytest.fixture(scope="session")
def cp2():
    return catalog.load_example("cp2")
