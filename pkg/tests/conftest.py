import pytest

from bandcast import build_kernel
from bandcast.grids import GridSpec


@pytest.fixture(scope="session")
def single_pole():
    """K(p) = 1/(p - 1), band constant 1."""
    return build_kernel([(1.0, 0.0, 1)], [1.0], 1.0)


@pytest.fixture(scope="session")
def conjugate_pair():
    """K(p) = p/((p - 0.5)^2 + 0.64), poles 0.5 -+ 0.8i."""
    return build_kernel([(0.5, 0.8, 1), (0.5, -0.8, 1)], [0.0, 1.0], 1.0)


@pytest.fixture(scope="session")
def pair_flat():
    """K(p) = 1/((p - 0.5)^2 + 0.64): degree gap 2."""
    return build_kernel([(0.5, 0.8, 1), (0.5, -0.8, 1)], [1.0], 1.0)


@pytest.fixture(scope="session")
def double_pole():
    """K(p) = 1/(p - 1)^2."""
    return build_kernel([(1.0, 0.0, 2)], [1.0], 1.0)


@pytest.fixture(scope="session")
def triple_pole():
    """K(p) = 1/(p - 1)^3: fast spectral decay for synthesis tests."""
    return build_kernel([(1.0, 0.0, 3)], [1.0], 1.0)


@pytest.fixture(scope="session")
def pipeline_grid():
    return GridSpec(2048, 400.0)
