"""
Tests for the structured logging setup.
"""

import numpy as np
import pytest
import structlog

from dicke_toolkit.core.exceptions import ConfigurationError
from dicke_toolkit.core.logging import _numpy_to_builtin, run_context, setup_logging


class TestLogging:
    """structlog configuration."""

    def test_numpy_values_become_builtins(self):
        event = _numpy_to_builtin(None, "info", {
            "gamma": np.float64(0.25),
            "cells": np.int64(4),
            "shape": (np.int64(2), np.int64(3)),
            "W": np.eye(2),
            "phi": np.zeros((10, 4, 4)),
        })

        assert event["gamma"] == 0.25 and type(event["gamma"]) is float
        assert type(event["cells"]) is int
        assert event["shape"] == [2, 3]
        assert event["W"] == [[1.0, 0.0], [0.0, 1.0]]
        assert event["phi"] == "<array shape=(10, 4, 4)>"

    def test_unknown_level(self):
        with pytest.raises(ConfigurationError):
            setup_logging("LOUD")

    def test_run_context_binds_values(self):
        setup_logging("DEBUG")

        with run_context(command="simulate", run="test"):
            bound = structlog.contextvars.get_contextvars()

        assert bound == {"command": "simulate", "run": "test"}
        assert structlog.contextvars.get_contextvars() == {}
