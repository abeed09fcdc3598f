"""
Tests for optimal two-mode squeezing.
"""

import numpy as np
import pytest

from dicke_toolkit.models.state import J
from dicke_toolkit.services.fluctuations import thermal_covariance
from dicke_toolkit.services.squeezing import (
    optimal_squeezing,
    squeezed_covariance,
    squeezing_fidelity,
    two_mode_squeeze,
)


def test_squeeze_is_symplectic():
    S = two_mode_squeeze(0.8)

    assert np.allclose(S @ J @ S.T, J)


def test_vacuum_needs_no_squeezing(vacuum):
    result = optimal_squeezing(vacuum)

    assert result.r_opt == pytest.approx(0.0, abs=1e-5)
    assert result.fidelity == pytest.approx(1.0)
    assert not result.bracket_failure
    assert not result.purity_warning


@pytest.mark.parametrize("r", [0.1, 0.35, 0.5, 0.7, 1.0, 2.0, 4.0])
def test_recovers_squeezing_degree(r):
    result = optimal_squeezing(squeezed_covariance(r))

    assert result.r_opt == pytest.approx(r, abs=1e-6)
    assert result.fidelity == pytest.approx(1.0, abs=1e-9)


def test_fidelity_decreases_away_from_optimum():
    W = squeezed_covariance(0.7)

    assert squeezing_fidelity(W, 0.7) > squeezing_fidelity(W, 0.5) > squeezing_fidelity(W, 0.0)


def test_locally_rotated_state_has_lower_fidelity():
    """A single-mode phase rotation leaves the two-mode squeezed family."""
    rotation = np.eye(4)
    rotation[[0, 2], [0, 2]] = 0.0
    rotation[0, 2], rotation[2, 0] = 1.0, -1.0
    W = rotation @ squeezed_covariance(0.7) @ rotation.T

    result = optimal_squeezing(W)

    assert result.fidelity < 0.99
    assert 0.0 <= result.fidelity <= 1.0


def test_anisotropic_cavity_state_is_outside_the_family():
    """Every two-mode squeezed vacuum has an isotropic cavity marginal, which caps the fidelity."""
    W = np.diag([np.exp(2.0) / 2.0, 0.5, np.exp(-2.0) / 2.0, 0.5])

    result = optimal_squeezing(W)

    assert result.fidelity == pytest.approx(1.0 / np.cosh(1.0), abs=1e-6)
    assert result.r_opt == pytest.approx(0.0, abs=1e-4)


def test_mixed_state_warns():
    result = optimal_squeezing(thermal_covariance(0.5))

    assert result.purity_warning
    assert result.fidelity < 1.0
