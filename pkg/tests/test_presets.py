"""
Tests for the built-in presets.
"""

import numpy as np
import pytest

from dicke_toolkit.core.config import PropagatorMethod
from dicke_toolkit.core.exceptions import ConfigurationError
from dicke_toolkit.models.protocol import DriveRegime, PointKind
from dicke_toolkit.models.run_config import InitialPoint
from dicke_toolkit.models.state import IntegrationStatus, ValidityStatus
from dicke_toolkit.presets.builtin_presets import BUILTIN_PRESETS, get_preset, list_presets
from dicke_toolkit.services.fluctuations import integrate_joint
from dicke_toolkit.services.floquet import floquet_analysis
from dicke_toolkit.services.meanfield import stationary_point_visits
from dicke_toolkit.services.model_core import drive_regime
from dicke_toolkit.services.runner import SimulationRunner
from dicke_toolkit.services.squeezing import optimal_squeezing


@pytest.mark.parametrize("name", [p["name"] for p in BUILTIN_PRESETS])
def test_presets_parse(name):
    config = get_preset(name)

    assert config.name == name
    assert config.output.directory.endswith(name)


def test_list_presets():
    names = [p["name"] for p in list_presets()]

    assert names == ["fig1a", "fig1b", "fig1c", "fig1d", "fig2", "vacuum"]
    assert all(p["description"] for p in list_presets())


@pytest.mark.parametrize("name, regime", [
    ("fig1b", DriveRegime.NORMAL_ORBIT),
    ("fig1c", DriveRegime.SWITCHING),
    ("fig1d", DriveRegime.ALWAYS_SUPER_RADIANT),
])
def test_trajectory_presets_cover_the_regimes(name, regime):
    config = get_preset(name)

    assert drive_regime(config.drive_protocol()) == regime
    assert config.t_end == pytest.approx(660.0)


def test_stability_preset():
    config = get_preset("fig1a")

    spec = config.sweep.to_grid_spec()

    assert spec.shape == (160, 160)
    assert config.sweep.method == PropagatorMethod.MAGNUS


def test_cycle_preset_starts_on_super_radiant_point():
    config = get_preset("fig2")

    assert config.initial.point == InitialPoint.SR_PLUS
    assert config.drive_protocol().g == 0.55


def test_presets_are_independent_copies():
    first = get_preset("fig1b")
    first.t_end = 1.0

    assert get_preset("fig1b").t_end == pytest.approx(660.0)


def test_unknown_preset():
    with pytest.raises(ConfigurationError) as exc_info:
        get_preset("fig9")

    assert "fig1a" in exc_info.value.message


@pytest.fixture(scope="module")
def preset_runs():
    """Joint trajectories of the slow-drive presets, integrated once per module."""
    cache = {}

    def run(name):
        if name not in cache:
            config = get_preset(name)
            protocol, mf0, W0 = SimulationRunner().check_preconditions(config)
            cache[name] = (config, protocol, integrate_joint(
                mf0, W0, protocol, config.t_end, config.integrator_config(), N=config.N
            ))
        return cache[name]

    return run


class TestPresetRegimes:
    """Qualitative behaviour of the slow-drive presets over their full run."""

    def test_normal_orbit_stays_bounded(self, preset_runs):
        """The orbit grows while mu < 1 but stays far from the unit disk."""
        config, protocol, joint = preset_runs("fig1b")
        epsilon = config.initial.epsilon

        assert joint.status == IntegrationStatus.COMPLETED
        assert 5.0 * epsilon < np.abs(joint.alpha).max() < 0.5
        assert floquet_analysis(protocol).gamma_star > 0.0

    def test_switching_visits_both_phases(self, preset_runs):
        _, protocol, joint = preset_runs("fig1c")

        visits = stationary_point_visits(joint.mean_field, protocol)

        assert joint.status == IntegrationStatus.COMPLETED
        assert PointKind.NORMAL in visits
        assert PointKind.SR_PLUS in visits or PointKind.SR_MINUS in visits

    def test_always_super_radiant_grows(self, preset_runs):
        _, _, joint = preset_runs("fig1d")

        assert joint.status == IntegrationStatus.COMPLETED
        assert np.abs(joint.alpha).max() > 0.3

    @pytest.mark.parametrize("name", ["fig1b", "fig1c", "fig1d"])
    def test_untrusted_runs_are_flagged(self, preset_runs, name):
        """Either both defects stay small or the monitor marks the run as exceeded."""
        _, _, joint = preset_runs(name)
        report = joint.validity

        small = report.max_symplectic_defect < 1e-6 and report.max_purity_defect < 1e-6
        assert small or report.status == ValidityStatus.EXCEEDED
        if report.status == ValidityStatus.EXCEEDED:
            assert report.reason is not None
            assert not joint.valid_flags[-1]

    def test_cycle_preset_starts_in_vacuum_fluctuations(self):
        config = get_preset("fig2")
        _, _, W0 = SimulationRunner().check_preconditions(config)

        result = optimal_squeezing(W0)

        assert result.fidelity == pytest.approx(1.0, abs=1e-12)
        assert result.r_opt == pytest.approx(0.0, abs=1e-5)
