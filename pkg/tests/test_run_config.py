"""
Tests for the run configuration schema.
"""

import json

import pytest

from dicke_toolkit import SCHEMA_VERSION
from dicke_toolkit.core.config import IntegratorMethod, PropagatorMethod
from dicke_toolkit.core.exceptions import ConfigurationError, ValidationError
from dicke_toolkit.models.floquet import AxisMode
from dicke_toolkit.models.run_config import (
    CovarianceKind,
    InitialPoint,
    RunConfig,
    apply_overrides,
    load_run_config,
    parse_run_config,
    parse_tolerance,
)


@pytest.fixture
def config_data():
    return {
        "name": "test",
        "protocol": {"omega_a": 1.0, "lambda0": 1.0, "lambda": 0.5, "eta": 0.1, "g": 0.55},
        "N": 1e8,
        "initial": {"point": "sr+"},
        "t_end": 20.0,
    }


class TestRunConfig:
    """Parsing and defaults."""

    def test_defaults(self):
        config = RunConfig()

        assert config.schema_version == SCHEMA_VERSION
        assert config.initial.epsilon == 1e-2
        assert config.initial.covariance.kind == CovarianceKind.VACUUM
        assert config.stride == 1
        assert config.sweep is None

    def test_lambda_alias(self, config_data):
        config = parse_run_config(config_data)

        assert config.protocol.lam == 0.5
        assert config.to_json_dict()["protocol"]["lambda"] == 0.5
        assert config.initial.point == InitialPoint.SR_PLUS

    def test_drive_protocol(self, config_data):
        protocol = parse_run_config(config_data).drive_protocol()

        assert protocol.g == 0.55
        assert protocol.is_periodic

    def test_sample_interval_defaults_to_period_fraction(self, config_data):
        config = parse_run_config(config_data)

        assert config.resolved_sample_interval() == pytest.approx(config.drive_protocol().period / 100.0)

    def test_integrator_config(self, config_data):
        config_data["integrator"] = {"method": "RK45", "rtol": 1e-8}

        integrator = parse_run_config(config_data).integrator_config()

        assert integrator.method == IntegratorMethod.RK45
        assert integrator.rtol == 1e-8
        assert not integrator.is_fixed_step

    def test_sweep(self):
        config = parse_run_config({
            "sweep": {
                "mode": "normalized",
                "x": {"start": 0.05, "stop": 0.25, "num": 3},
                "y": {"start": 0.0, "stop": 20.0, "num": 5},
            }
        })

        spec = config.sweep.to_grid_spec()

        assert spec.mode == AxisMode.NORMALIZED
        assert spec.shape == (3, 5)
        assert config.sweep.method in set(PropagatorMethod)

    def test_summary_round_trip(self, config_data):
        config = parse_run_config(config_data)

        again = parse_run_config({"schema_version": SCHEMA_VERSION, "config": config.to_json_dict()})

        assert again == config


class TestValidation:
    """Errors collapse to one diagnostic naming the field."""

    def test_two_mean_field_sources(self, config_data):
        config_data["initial"]["epsilon"] = 0.1

        with pytest.raises(ValidationError) as exc_info:
            parse_run_config(config_data)

        assert exc_info.value.field == "initial"
        assert exc_info.value.exit_code == 1

    def test_negative_coupling(self, config_data):
        config_data["protocol"]["g"] = -1.0

        with pytest.raises(ValidationError) as exc_info:
            parse_run_config(config_data)

        assert exc_info.value.field == "protocol.g"

    def test_explicit_covariance_needs_matrix(self):
        with pytest.raises(ValidationError):
            parse_run_config({"initial": {"covariance": {"kind": "explicit"}}})

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            parse_run_config({"t_finish": 10.0})

    def test_schema_major_version(self):
        with pytest.raises(ValidationError):
            parse_run_config({"schema_version": "2.0"})


class TestLoading:
    """Reading config files and applying CLI overrides."""

    def test_load(self, tmp_path, config_data):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(config_data))

        config = load_run_config(path)

        assert config.name == "test"
        assert config.N == 1e8

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError) as exc_info:
            load_run_config(tmp_path / "missing.json")

        assert exc_info.value.exit_code == 1

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")

        with pytest.raises(ConfigurationError):
            load_run_config(path)

    def test_overrides(self, config_data):
        config = parse_run_config(config_data)

        updated = apply_overrides(config, out="elsewhere", workers=4, fixed_step=0.01, tol="1e-6,1e-9", stride=5, t_end=3.0)

        assert updated.output.directory == "elsewhere"
        assert updated.workers == 4
        assert updated.integrator.fixed_step == 0.01
        assert updated.integrator.rtol == 1e-6
        assert updated.integrator.atol == 1e-9
        assert updated.stride == 5
        assert updated.t_end == 3.0
        assert config.t_end == 20.0

    def test_invalid_override(self, config_data):
        with pytest.raises(ValidationError) as exc_info:
            apply_overrides(parse_run_config(config_data), stride=0)

        assert exc_info.value.field == "stride"

    @pytest.mark.parametrize("text, expected", [("1e-8", (1e-8, None)), ("1e-8, 1e-11", (1e-8, 1e-11))])
    def test_parse_tolerance(self, text, expected):
        assert parse_tolerance(text) == expected

    @pytest.mark.parametrize("text", ["", "abc", "1e-8,1e-9,1e-10", "-1"])
    def test_parse_tolerance_rejects(self, text):
        with pytest.raises(ValidationError):
            parse_tolerance(text)
