import numpy as np
import pytest

from objects.sections import ThetaFamily
from objects.spaces import FlatModel, HyperbolicModel
from utils.config import CACHE_ENV, load_config
from utils.quadrature import domain_quadrature
from utils.quotient import build_basis


@pytest.fixture
def config(tmp_path, monkeypatch):
    """Default configuration writing reports and caches under tmp_path"""
    monkeypatch.delenv(CACHE_ENV, raising=False)
    return load_config(**{"output.directory": str(tmp_path), "output.plots": False})


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture(scope="session")
def flat_space():
    return FlatModel(1j)


@pytest.fixture(scope="session")
def flat_enumeration(flat_space):
    return flat_space.enumerate(8.0)


@pytest.fixture(scope="session")
def disc_space():
    return HyperbolicModel()


@pytest.fixture(scope="session")
def disc_enumeration(disc_space):
    # Generators have displacement 3.057 from the centre, so this ball holds more than them
    return disc_space.enumerate(4.0)


@pytest.fixture(scope="session")
def theta_bases(flat_space):
    """Orthonormal theta bases for N = 1, 2, 3 on a 32-node rule"""
    quad = domain_quadrature(flat_space, 32)
    return {N: build_basis(ThetaFamily(N, flat_space.tau), quad) for N in (1, 2, 3)}
