"""
Tests for the command-line interface.
"""

import json

import pytest
from typer.testing import CliRunner

from dicke_toolkit import SCHEMA_VERSION, __version__
from dicke_toolkit.cli import app

runner = CliRunner()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "name": "cli",
        "protocol": {"omega_a": 1.0, "lambda0": 1.0, "lambda": 0.5, "eta": 0.1, "g": 0.55},
        "N": 1e8,
        "t_end": 2.0,
        "sample_interval": 0.5,
    }))
    return path


class TestInfo:
    def test_version(self):
        result = runner.invoke(app, ["--version"])

        assert result.exit_code == 0
        assert __version__ in result.output
        assert SCHEMA_VERSION in result.output

    def test_presets(self):
        result = runner.invoke(app, ["presets"])

        assert result.exit_code == 0
        assert "fig1a" in result.output
        assert "vacuum" in result.output


class TestGroundStateEnergy:
    def test_normal_phase(self):
        result = runner.invoke(app, ["gs-energy", "--omega-a", "1", "--omega-b", "1", "--g", "0.3"])

        assert result.exit_code == 0
        assert "-0.5" in result.output
        assert "normal" in result.output

    def test_check_against_minimization(self):
        result = runner.invoke(app, ["gs-energy", "--omega-a", "1", "--omega-b", "1", "--g", "0.8", "--check"])

        assert result.exit_code == 0
        assert "Difference" in result.output

    def test_invalid_parameters(self):
        result = runner.invoke(app, ["gs-energy", "--omega-a", "0", "--omega-b", "1", "--g", "0.8"])

        assert result.exit_code == 1


class TestValidateConfig:
    def test_valid_preset(self):
        result = runner.invoke(app, ["validate-config", "--preset", "fig2"])

        assert result.exit_code == 0
        assert "Configuration is valid" in result.output

    def test_config_and_preset_are_exclusive(self, config_file):
        result = runner.invoke(app, ["validate-config", "--preset", "fig2", "--config", str(config_file)])

        assert result.exit_code == 1

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"protocol": {"g": -1.0}}))

        result = runner.invoke(app, ["validate-config", "--config", str(path)])

        assert result.exit_code == 1

    def test_physical_precondition(self, tmp_path):
        path = tmp_path / "normal.json"
        path.write_text(json.dumps({"protocol": {"g": 0.3}, "initial": {"point": "sr+"}}))

        result = runner.invoke(app, ["validate-config", "--config", str(path)])

        assert result.exit_code == 1

    def test_unknown_preset(self):
        result = runner.invoke(app, ["validate-config", "--preset", "nope"])

        assert result.exit_code == 1


class TestSimulate:
    def test_simulate_writes_outputs(self, tmp_path, config_file):
        out = tmp_path / "out"

        result = runner.invoke(app, ["simulate", "--config", str(config_file), "--out", str(out)])

        assert result.exit_code == 0
        assert (out / "trajectory.csv").exists()
        assert (out / "observables.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["name"] == "cli"

    def test_summary_reruns(self, tmp_path, config_file):
        first, second = tmp_path / "first", tmp_path / "second"
        runner.invoke(app, ["simulate", "--config", str(config_file), "--out", str(first)])

        result = runner.invoke(app, ["simulate", "--config", str(first / "summary.json"), "--out", str(second)])

        assert result.exit_code == 0
        assert (first / "trajectory.csv").read_text() == (second / "trajectory.csv").read_text()

    def test_overrides(self, tmp_path):
        out = tmp_path / "vacuum"

        result = runner.invoke(app, [
            "simulate", "--preset", "vacuum", "--t-end", "3", "--stride", "2",
            "--tol", "1e-8,1e-10", "--out", str(out),
        ])

        assert result.exit_code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["t_end"] == 3.0
        assert summary["config"]["stride"] == 2
        assert summary["config"]["integrator"]["rtol"] == 1e-8

    def test_bad_tolerance(self):
        result = runner.invoke(app, ["simulate", "--preset", "vacuum", "--tol", "fast"])

        assert result.exit_code == 1


class TestStability:
    def test_stability_sweep(self, tmp_path):
        config = tmp_path / "sweep.json"
        config.write_text(json.dumps({
            "sweep": {"x": {"start": 0.5, "stop": 1.0, "num": 2}, "y": {"start": 0.2, "stop": 0.4, "num": 2}},
        }))
        out = tmp_path / "sweep"

        result = runner.invoke(app, ["stability", "--config", str(config), "--workers", "1", "--out", str(out)])

        assert result.exit_code == 0
        assert (out / "stability.csv").exists()
        assert (out / "reference_curves.csv").exists()

    def test_missing_sweep(self, config_file):
        result = runner.invoke(app, ["stability", "--config", str(config_file), "--workers", "1"])

        assert result.exit_code == 1


def test_unknown_log_level():
    result = runner.invoke(app, ["--log-level", "loud", "presets"])

    assert result.exit_code == 1
