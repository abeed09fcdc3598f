"""
Shared fixtures for the Driven Dicke Toolkit tests.
"""

import pytest

from dicke_toolkit.models.protocol import DriveProtocol
from dicke_toolkit.models.state import IntegratorConfig
from dicke_toolkit.services.fluctuations import vacuum_covariance


@pytest.fixture
def slow_drive():
    """Sinusoidal drive at lambda0 = 1, lambda = 1/2, eta = 0.1."""
    return DriveProtocol.sinusoidal(omega_a=1.0, lambda0=1.0, lam=0.5, eta=0.1, g=0.55)


@pytest.fixture
def static_sr():
    """Undriven model deep in the super-radiant phase (mu = 0.390625)."""
    return DriveProtocol.static(omega_a=1.0, omega_b=1.0, g=0.8)


@pytest.fixture
def static_normal():
    return DriveProtocol.static(omega_a=1.0, omega_b=1.0, g=0.3)


@pytest.fixture
def vacuum():
    return vacuum_covariance()


@pytest.fixture
def sampled():
    """Adaptive integrator with a fixed output grid."""
    return IntegratorConfig(sample_interval=0.5)
