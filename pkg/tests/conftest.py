import math

import pytest

import hadamard as hd

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# shared fixed topology: a 6-vertex caterpillar with mixed edge lengths
CATERPILLAR = hd.TreeTopology(
    vertex_count=6,
    edges=((0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5), (3, 4, 1.5), (3, 5, 0.75)),
)


@pytest.fixture(scope="session")
def E2():
    return hd.make_space(hd.Euclidean(2))


@pytest.fixture(scope="session")
def E3():
    return hd.make_space(hd.Euclidean(3))


@pytest.fixture(scope="session")
def H2():
    return hd.make_space(hd.Hyperbolic(2))


@pytest.fixture(scope="session")
def tree():
    return hd.make_space(hd.WeightedTree(CATERPILLAR))


@pytest.fixture(scope="session")
def prod(E2, H2):
    return hd.make_space(hd.Product(E2.descriptor, H2.descriptor))


def ept(space, *coords):
    return hd.euclidean_point(space, *coords)


def hpt_polar(space, r, theta):
    """Hyperboloid point at geodesic distance r from the sheet base point."""
    return hd.hyperboloid_point(
        space, math.cosh(r), math.sinh(r) * math.cos(theta), math.sinh(r) * math.sin(theta)
    )
