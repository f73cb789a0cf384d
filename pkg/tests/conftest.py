import pytest

from hitlbo import parse_cnf, parse_graph

TRIANGLE = "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"
EDGELESS2 = "p edge 2 0\n"
OR2 = "p cnf 2 1\n1 2 0\n"


@pytest.fixture
def triangle():
    return parse_graph(TRIANGLE)


@pytest.fixture
def edgeless2():
    return parse_graph(EDGELESS2)


@pytest.fixture
def or2():
    return parse_cnf(OR2)
