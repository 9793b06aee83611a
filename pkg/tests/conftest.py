import pytest

import gens


@pytest.fixture
def interval_problem():
    return gens.interval_problem()


@pytest.fixture
def abs_problem():
    return gens.abs_problem()
