import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from circlepattern import shapes


@pytest.fixture(scope="session")
def tetra():
    return shapes.tetrahedron()


@pytest.fixture(scope="session")
def octa():
    return shapes.octahedron()


@pytest.fixture(scope="session")
def bipyr():
    return shapes.triangular_bipyramid()


@pytest.fixture(scope="session")
def icosa():
    return shapes.icosahedron()


@pytest.fixture(scope="session")
def shipped_small():
    return shapes.small_shipped()
