"""
Tests for photon statistics, energies, work and inner friction.
"""

import math

import numpy as np
import pytest

from dicke_toolkit.core.exceptions import NoSRWindow, ValidationError
from dicke_toolkit.models.protocol import DriveProtocol, Phase
from dicke_toolkit.models.state import MeanField
from dicke_toolkit.services.fluctuations import integrate_joint
from dicke_toolkit.services.model_core import critical_amplitude, mu_of_t
from dicke_toolkit.services.observables import (
    atomic_excitation,
    average_work,
    friction_limit_per_atom,
    ground_state_energy_oracle,
    ground_state_energy_per_atom,
    inner_friction,
    mean_energy,
    photon_number,
    photon_variance_and_mandel,
    quadratic_form,
    sr_entry_times,
    work_closed_form,
)

N = 1e6


class TestPhotonStatistics:
    """Photon number, variance and Mandel parameters."""

    def test_vacuum_has_no_photons(self, vacuum):
        assert photon_number(MeanField(), vacuum, N) == 0.0
        assert atomic_excitation(MeanField(), vacuum, N) == 0.0

    def test_coherent_state_is_poissonian(self, vacuum):
        mf = MeanField(alpha=0.1 + 0j)

        stats = photon_variance_and_mandel(mf, vacuum, N)

        assert photon_number(mf, vacuum, N) == pytest.approx(1e4)
        assert stats.sigma2_a == pytest.approx(1e4)
        assert stats.rho == pytest.approx(1.0)
        assert stats.rho_infinity == pytest.approx(1.0)
        assert not stats.mean_field_too_small

    def test_coherent_states_have_unit_mandel_limit(self, vacuum):
        rng = np.random.default_rng(9)
        for _ in range(20):
            alpha = complex(*rng.uniform(-1.0, 1.0, size=2))

            stats = photon_variance_and_mandel(MeanField(alpha=alpha), vacuum, N)

            assert abs(stats.rho_infinity - 1.0) < 1e-12

    def test_squeezed_quadrature_is_sub_poissonian(self):
        W = np.diag([0.1, 0.5, 2.5, 0.5])
        mf = MeanField(alpha=0.2 + 0j)

        stats = photon_variance_and_mandel(mf, W, N)

        assert stats.rho_infinity == pytest.approx(0.2)

    def test_zero_mean_field_is_flagged(self, vacuum):
        stats = photon_variance_and_mandel(MeanField(), vacuum, N)

        assert stats.mean_field_too_small
        assert math.isnan(stats.rho_infinity)


class TestEnergy:
    """Energies and ground-state energy."""

    def test_vacuum_energy(self, slow_drive, vacuum):
        energy = mean_energy(MeanField(), vacuum, slow_drive, 0.0, N)

        assert energy == pytest.approx(-N / 2.0)

    def test_quadratic_form_is_symmetric(self):
        S = quadratic_form(MeanField(alpha=0.3 + 0j, beta=-0.2 + 0j), 1.0, 1.0, 0.8)

        assert np.allclose(S, S.T)

    def test_normal_ground_state(self):
        result = ground_state_energy_per_atom(1.0, 1.0, 0.3)

        assert result.phase == Phase.NORMAL
        assert result.e_per_atom == pytest.approx(-0.5)

    @pytest.mark.parametrize("omega_a, omega_b, g", [(1.0, 1.0, 0.8), (1.0, 0.5, 0.6), (2.0, 1.0, 1.5)])
    def test_super_radiant_ground_state_matches_oracle(self, omega_a, omega_b, g):
        result = ground_state_energy_per_atom(omega_a, omega_b, g)

        assert result.phase == Phase.SUPER_RADIANT
        assert result.e_per_atom < -omega_b / 2.0
        assert ground_state_energy_oracle(omega_a, omega_b, g) == pytest.approx(result.e_per_atom, abs=1e-8)

    def test_oracle_in_normal_phase(self):
        assert ground_state_energy_oracle(1.0, 1.0, 0.3) == pytest.approx(-0.5, abs=1e-10)

    def test_random_ground_states_match_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            omega_a, omega_b = rng.uniform(0.5, 2.0, size=2)
            mu = rng.uniform(0.05, 1.5)
            g = math.sqrt(omega_a * omega_b / (4.0 * mu))

            expected = ground_state_energy_per_atom(omega_a, omega_b, g).e_per_atom

            assert abs(ground_state_energy_oracle(omega_a, omega_b, g) - expected) < 1e-9

    @pytest.mark.parametrize("omega_b", [0.5, 1.0, 1.7])
    def test_continuous_at_critical_point(self, omega_b):
        def coupling(mu):
            return math.sqrt(omega_b / (4.0 * mu))

        below = ground_state_energy_per_atom(1.0, omega_b, coupling(1.0 - 1e-9))
        above = ground_state_energy_per_atom(1.0, omega_b, coupling(1.0 + 1e-9))

        assert below.phase == Phase.SUPER_RADIANT
        assert above.phase == Phase.NORMAL
        assert abs(below.e_per_atom - above.e_per_atom) < 1e-12
        assert abs(friction_limit_per_atom(1.0 - 1e-9, omega_b) - friction_limit_per_atom(1.0 + 1e-9, omega_b)) < 1e-12


class TestWork:
    """Average work and inner friction."""

    def test_zero_work_at_start(self, slow_drive, vacuum):
        result = average_work(MeanField(), vacuum, 0.0, MeanField(), vacuum, slow_drive, N)

        assert result.work == pytest.approx(0.0, abs=1e-6)
        assert not result.mean_field_gated

    def test_closed_form_matches_energy_difference_at_zero_mean_fields(self, slow_drive, vacuum):
        W_t = np.array([
            [0.7, 0.1, 0.0, 0.0],
            [0.1, 0.6, 0.0, 0.0],
            [0.0, 0.0, 0.5, 0.0],
            [0.0, 0.0, 0.0, 0.55],
        ])
        t = 7.0

        closed = work_closed_form(W_t, photon_number(MeanField(), W_t, N), slow_drive, t, N)
        difference = mean_energy(MeanField(), W_t, slow_drive, t, N) - mean_energy(MeanField(), vacuum, slow_drive, 0.0, N)

        assert closed == pytest.approx(difference, abs=1e-6)

    def test_closed_form_along_driven_run(self, slow_drive, vacuum, sampled):
        """On a zero-mean-field run the closed form tracks the energy change at every sample."""
        joint = integrate_joint(MeanField(), vacuum, slow_drive, 20.0, sampled, N=N)
        start = mean_energy(MeanField(), vacuum, slow_drive, 0.0, N)

        for t, W in zip(joint.t, joint.W):
            closed = work_closed_form(W, photon_number(MeanField(), W, N), slow_drive, float(t), N)
            difference = mean_energy(MeanField(), W, slow_drive, float(t), N) - start

            assert abs(closed - difference) / max(abs(difference), 1.0) < 1e-8

    def test_nonzero_mean_fields_are_gated(self, slow_drive, vacuum):
        mf = MeanField(alpha=0.05 + 0j)

        result = average_work(mf, vacuum, 2.0, mf, vacuum, slow_drive, N)

        assert result.mean_field_gated
        assert result.work == pytest.approx(
            mean_energy(mf, vacuum, slow_drive, 2.0, N) - mean_energy(mf, vacuum, slow_drive, 0.0, N)
        )

    def test_friction_limit(self):
        assert friction_limit_per_atom(1.5, 1.0) == 0.0
        assert friction_limit_per_atom(0.5, 1.0) == pytest.approx(0.25)

    def test_no_friction_without_work_or_drive(self, static_normal):
        friction = inner_friction(0.0, static_normal, 5.0, N)

        assert friction.w_fric == pytest.approx(0.0)
        assert friction.w_fric_per_atom_limit == 0.0


class TestSuperRadiantWindows:
    """Intervals with mu(t) < 1."""

    def test_window_matches_closed_form(self):
        protocol = DriveProtocol.sinusoidal(1.0, 1.0, 0.5, 0.1, 0.45)
        ratio = critical_amplitude(protocol) / protocol.lam

        windows = sr_entry_times(protocol)

        assert len(windows) == 1
        start, end = windows[0]
        assert start == pytest.approx((math.pi - math.asin(ratio)) / 0.1, rel=1e-8)
        assert end == pytest.approx((2.0 * math.pi + math.asin(ratio)) / 0.1, rel=1e-8)
        assert mu_of_t(protocol, 0.5 * (start + end)) < 1.0

    def test_starts_inside_window(self, slow_drive):
        windows = sr_entry_times(slow_drive)

        assert windows[0][0] == 0.0
        assert mu_of_t(slow_drive, 0.0) < 1.0

    def test_always_super_radiant(self):
        protocol = DriveProtocol.sinusoidal(1.0, 1.0, 0.5, 0.1, 1.0)

        assert sr_entry_times(protocol) == [(0.0, protocol.period)]

    def test_no_window(self):
        with pytest.raises(NoSRWindow):
            sr_entry_times(DriveProtocol.sinusoidal(1.0, 1.0, 0.5, 0.1, 0.3))

    def test_general_protocol_rejected(self):
        protocol = DriveProtocol.general(lambda t: 1.0, lambda t: 1.0, lambda t: 0.8, eta=1.0)

        with pytest.raises(ValidationError):
            sr_entry_times(protocol)
