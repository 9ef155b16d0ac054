"""Shared fixtures for the gamma-manifold test suite."""
import numpy as np
import pytest

from fisher_oracle import QuadratureConfig


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope='session')
def quad_cfg():
    return QuadratureConfig()


@pytest.fixture(scope='session')
def loose_quad_cfg():
    """Looser tolerances for nested 2-D quadratures."""
    return QuadratureConfig(abs_tol=1e-9, rel_tol=1e-9)
