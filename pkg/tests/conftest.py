"""
Shared fixtures for the ceprecode tests.
"""

import numpy as np
import pytest

from ceprecode.models.data_models import ChannelMatrix, SymbolVector
from ceprecode.services.simulator import draw_symbols, generate_channel


@pytest.fixture
def scalar_instance():
    """N = M = 1, h = 1, s = 1, QPSK, P_T = 1."""
    return ChannelMatrix(np.array([[1.0 + 0j]])), SymbolVector([0], amplitude=1.0, order=4), 1.0


@pytest.fixture
def small_instance():
    """A random N = 8, M = 3 QPSK instance."""
    rng = np.random.default_rng(11)
    return generate_channel(8, 3, rng), draw_symbols(3, 4, 1.0, rng), 1.0


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: paired multi-solver comparisons at full problem size")
