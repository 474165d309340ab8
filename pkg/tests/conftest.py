import numpy as np
import pytest

from oscilab.core.config import Config
from oscilab.core.counterexample import build_spec, chebyshev_nodes
from oscilab.core.ode import IntegratorConfig


@pytest.fixture
def config() -> Config:
    return Config()


@pytest.fixture(scope="session")
def integrator_config() -> IntegratorConfig:
    return IntegratorConfig()


@pytest.fixture(scope="session")
def spec_origin():
    """Single node at 0, margin 0.01."""
    return build_spec([0.0], 0.01)


@pytest.fixture(scope="session")
def spec_chebyshev5():
    return build_spec(chebyshev_nodes(5), 0.01)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(20240607)))
