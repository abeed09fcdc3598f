"""
Run orchestration: trajectory runs and stability sweeps driven by a RunConfig.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import structlog

from dicke_toolkit import SCHEMA_VERSION
from dicke_toolkit.core.config import settings
from dicke_toolkit.core.exceptions import DickeToolkitException, IntegrationError, PartialSweepError, ValidationError
from dicke_toolkit.models.floquet import StabilityGrid, ValidityRegime, ValidityTimes
from dicke_toolkit.models.observables import ObservablesRecord
from dicke_toolkit.models.protocol import DriveProtocol, PointKind
from dicke_toolkit.models.run_config import CovarianceKind, InitialPoint, RunConfig
from dicke_toolkit.models.state import IntegrationStatus, JointTrajectory, MeanField
from dicke_toolkit.monitoring.metrics import write_metrics
from dicke_toolkit.services import fluctuations, floquet, model_core
from dicke_toolkit.services.meanfield import BETA_LIMIT, stationary_point_visits
from dicke_toolkit.services.observables import observables_record
from dicke_toolkit.services.squeezing import optimal_squeezing
from dicke_toolkit.utils.csv_writer import StagedOutput, write_csv, write_json

TRAJECTORY_COLUMNS = ["t", "alpha_re", "alpha_im", "beta_re", "beta_im"]
OBSERVABLE_COLUMNS = [
    "t", "n_a", "sigma2_a", "rho", "rho_inf", "work", "w_fric", "w_fric_limit",
    "r_opt", "fidelity", "valid_flag", "n_b", "energy", "work_closed_form",
]
_UPPER = [(i, j) for i in range(4) for j in range(i, 4)]
FLUCTUATION_COLUMNS = ["t"] + [f"W{i + 1}{j + 1}" for i, j in _UPPER] + ["phi_max_abs", "valid_flag"]


def sample_indices(n_samples: int, stride: int) -> np.ndarray:
    """Every ``stride``-th sample, always including the last one."""
    indices = np.arange(0, n_samples, stride)
    if indices[-1] != n_samples - 1:
        indices = np.append(indices, n_samples - 1)
    return indices


@dataclass
class TrajectoryRun:
    """In-memory result of a trajectory run."""
    joint: JointTrajectory
    records: List[ObservablesRecord]
    summary: Dict[str, Any]
    directory: Path
    files: Dict[str, Path] = field(default_factory=dict)


@dataclass
class StabilityRun:
    grid: StabilityGrid
    overlay: pd.DataFrame
    summary: Dict[str, Any]
    directory: Path
    files: Dict[str, Path] = field(default_factory=dict)


class SimulationRunner:
    """Runs trajectory simulations and stability sweeps and writes their outputs."""

    def __init__(self):
        self.logger = structlog.get_logger(__name__)

    def resolve_initial_state(self, config: RunConfig, protocol: DriveProtocol) -> Tuple[MeanField, np.ndarray]:
        """Initial mean fields and covariance, with all physical checks applied."""
        initial = config.initial
        if initial.point == InitialPoint.SR_PLUS:
            point = model_core.super_radiant_point(protocol, PointKind.SR_PLUS)
            mf0 = MeanField(point.alpha, point.beta)
        elif initial.point == InitialPoint.SR_MINUS:
            point = model_core.super_radiant_point(protocol, PointKind.SR_MINUS)
            mf0 = MeanField(point.alpha, point.beta)
        elif initial.point == InitialPoint.ZERO:
            mf0 = MeanField()
        elif initial.epsilon is not None:
            mf0 = MeanField(alpha=complex(initial.epsilon), beta=0j)
        else:
            mf0 = MeanField(alpha=initial.alpha0_complex, beta=initial.beta0_complex)

        if abs(mf0.beta) >= BETA_LIMIT:
            raise ValidationError(f"|beta0| = {abs(mf0.beta):.6g} must be < 1", field="initial.beta0")

        covariance = initial.covariance
        if covariance.kind == CovarianceKind.THERMAL:
            W0 = fluctuations.thermal_covariance(covariance.n_bar)
        elif covariance.kind == CovarianceKind.EXPLICIT:
            W0 = np.asarray(covariance.matrix, dtype=float)
        else:
            W0 = fluctuations.vacuum_covariance()
        if not fluctuations.covariance_is_physical(W0):
            raise ValidationError("covariance must be symmetric with W + iJ/2 >= 0", field="initial.covariance")
        return mf0, W0

    def check_preconditions(self, config: RunConfig) -> Tuple[DriveProtocol, MeanField, np.ndarray]:
        """Validate everything a run needs before any integration starts."""
        protocol = config.drive_protocol()
        model_core.check_protocol(protocol)
        mf0, W0 = self.resolve_initial_state(config, protocol)
        fixed_step = config.integrator.fixed_step
        if fixed_step is not None and fixed_step > config.t_end:
            raise ValidationError("fixed step exceeds t_end", field="integrator.fixed_step")
        if config.sweep is not None:
            eta, _ = config.sweep.to_grid_spec().physical_points(protocol.omega_a)
            if not np.all(eta > 0):
                raise ValidationError("eta must be positive on every grid point", field="sweep.x")
        return protocol, mf0, W0

    def run_trajectory(self, config: RunConfig) -> TrajectoryRun:
        """Integrate mean fields and fluctuations, evaluate observables, write outputs."""
        protocol, mf0, W0 = self.check_preconditions(config)
        integrator = config.integrator_config()
        self.logger.info(
            "Starting trajectory run",
            name=config.name,
            t_end=config.t_end,
            method="RK4" if integrator.is_fixed_step else integrator.method.value,
            N=config.N,
        )

        joint = fluctuations.integrate_joint(mf0, W0, protocol, config.t_end, integrator, N=config.N)
        if joint.status is not IntegrationStatus.COMPLETED:
            raise IntegrationError(
                "Mean fields reached the |beta| = 1 boundary before t_end",
                details={"t_reached": float(joint.t[-1]), "t_end": config.t_end},
            )

        W_all = joint.W
        valid = joint.valid_flags
        indices = sample_indices(len(joint), config.stride)
        records = []
        for i in indices:
            mf = MeanField(complex(joint.alpha[i]), complex(joint.beta[i]))
            records.append(observables_record(
                float(joint.t[i]), mf, W_all[i], mf0, W0, protocol, config.N,
                optimal_squeezing(W_all[i]), bool(valid[i]),
            ))

        summary = self.trajectory_summary(config, protocol, mf0, joint)
        directory = Path(config.output.directory)
        metadata = {"schema_version": SCHEMA_VERSION, "name": config.name, "N": config.N, **self._protocol_metadata(protocol)}

        with StagedOutput(directory) as staged:
            write_csv(staged.path(config.output.trajectory), self._trajectory_frame(joint, indices), metadata)
            write_csv(staged.path(config.output.fluctuations), self._fluctuation_frame(joint, W_all, indices), metadata)
            write_csv(staged.path(config.output.observables), self._observables_frame(records), metadata)
            write_json(staged.path(config.output.summary), summary)
            if settings.monitoring.enabled:
                write_metrics(staged.path(settings.monitoring.filename))

        self.logger.info("Trajectory run finished", samples=len(records), validity=joint.validity.status.value)
        return TrajectoryRun(joint=joint, records=records, summary=summary, directory=directory, files=staged.published)

    def run_stability(self, config: RunConfig) -> StabilityRun:
        """Sweep the instability rate over the configured grid and write the CSVs.

        Failed cells are written as NaN with status ``failed`` and reported
        by raising :class:`PartialSweepError` after the outputs are in place.
        """
        if config.sweep is None:
            raise ValidationError("a stability run needs sweep axes", field="sweep")
        protocol, _, _ = self.check_preconditions(config)
        spec = config.sweep.to_grid_spec()
        grid = floquet.stability_sweep(spec, protocol, workers=config.resolved_workers(), method=config.sweep.method)
        overlay = floquet.reference_curves(protocol, grid.eta[:, 0])

        frame = pd.DataFrame({
            "eta": grid.eta.ravel(),
            "g": grid.g.ravel(),
            "gamma_star": grid.gamma_star.ravel(),
            "status": grid.status.ravel(),
        })
        counts = pd.Series(grid.status.ravel()).value_counts().to_dict()
        summary = {
            "schema_version": SCHEMA_VERSION,
            "config": config.to_json_dict(),
            "grid": {**grid.metadata, "shape": list(spec.shape)},
            "cells": counts,
            "max_gamma_star": float(np.nanmax(grid.gamma_star)) if np.isfinite(grid.gamma_star).any() else None,
        }

        directory = Path(config.output.directory)
        with StagedOutput(directory) as staged:
            write_csv(staged.path(config.output.grid), frame, {"schema_version": SCHEMA_VERSION, **grid.metadata})
            write_csv(staged.path(config.output.overlay), overlay, {"schema_version": SCHEMA_VERSION, **grid.metadata})
            write_json(staged.path(config.output.summary), summary)
            if settings.monitoring.enabled:
                write_metrics(staged.path(settings.monitoring.filename))

        run = StabilityRun(grid=grid, overlay=overlay, summary=summary, directory=directory, files=staged.published)
        if grid.n_failed:
            raise PartialSweepError(grid.n_failed, grid.gamma_star.size)
        return run

    def trajectory_summary(
        self,
        config: RunConfig,
        protocol: DriveProtocol,
        mf0: MeanField,
        joint: JointTrajectory,
    ) -> Dict[str, Any]:
        """Machine-readable run summary; ``config`` re-parses into the same RunConfig."""
        floquet_info: Dict[str, Any] = {}
        if protocol.is_periodic and not protocol.is_static:
            result = floquet.floquet_analysis(protocol)
            gamma_star = result.gamma_star
            floquet_info = {
                "det_defect": result.det_defect,
                "pairing_defect": result.pairing_defect,
                "marginal": result.marginal,
            }
        else:
            gamma_star = floquet.gamma_star_static(*protocol.evaluate(0.0))

        delta = max(abs(mf0.alpha), abs(mf0.beta))
        times = self._validity_times(gamma_star, delta, config.N)
        visits = stationary_point_visits(joint.mean_field, protocol)
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "completed",
            "config": config.to_json_dict(),
            "gamma_star": gamma_star,
            **times.to_dict(),
            "delta": delta,
            "drive_regime": self._drive_regime(protocol),
            "floquet": floquet_info,
            "max_symplectic_defect": joint.validity.max_symplectic_defect,
            "max_purity_defect": joint.validity.max_purity_defect,
            "validity": joint.validity.to_dict(),
            "stationary_point_visits": {kind.value: t for kind, t in visits.items()},
            "integrator": {
                "method": "RK4" if config.integrator_config().is_fixed_step else config.integrator.method.value,
                **joint.diagnostics.to_dict(),
            },
        }

    @staticmethod
    def _validity_times(gamma_star: float, delta: float, N: float) -> ValidityTimes:
        if 0 < delta < 1:
            return floquet.validity_times(gamma_star, delta, N)
        # Zero displacement: only the expansion-validity time is defined.
        tau_star = 1.0 / gamma_star if gamma_star > 0 else math.inf
        return ValidityTimes(
            tau_star=tau_star,
            t_lin=math.inf,
            t_max=0.5 * tau_star * math.log(N) if gamma_star > 0 else math.inf,
            regime=ValidityRegime.FLUCTUATION_LIMITED,
        )

    def _drive_regime(self, protocol: DriveProtocol) -> Optional[str]:
        try:
            return model_core.drive_regime(protocol).value
        except DickeToolkitException as exc:
            self.logger.debug("Drive regime undefined", error=exc.message)
            return None

    @staticmethod
    def _protocol_metadata(protocol: DriveProtocol) -> Dict[str, Any]:
        return {
            "omega_a": protocol.omega_a,
            "lambda0": protocol.lambda0,
            "lambda": protocol.lam,
            "eta": protocol.eta,
            "g": protocol.g,
        }

    @staticmethod
    def _trajectory_frame(joint: JointTrajectory, indices: np.ndarray) -> pd.DataFrame:
        y = joint.y[indices]
        return pd.DataFrame(
            np.column_stack([joint.t[indices], y[:, 0], y[:, 2], y[:, 1], y[:, 3]]),
            columns=TRAJECTORY_COLUMNS,
        )

    @staticmethod
    def _fluctuation_frame(joint: JointTrajectory, W_all: np.ndarray, indices: np.ndarray) -> pd.DataFrame:
        W = W_all[indices]
        frame = pd.DataFrame({"t": joint.t[indices]})
        for i, j in _UPPER:
            frame[f"W{i + 1}{j + 1}"] = W[:, i, j]
        frame["phi_max_abs"] = joint.phi_max_abs[indices]
        frame["valid_flag"] = joint.valid_flags[indices].astype(int)
        return frame[FLUCTUATION_COLUMNS]

    @staticmethod
    def _observables_frame(records: List[ObservablesRecord]) -> pd.DataFrame:
        frame = pd.DataFrame([record.to_row() for record in records], columns=OBSERVABLE_COLUMNS)
        frame["valid_flag"] = frame["valid_flag"].astype(int)
        return frame


# Global runner instance
simulation_runner = SimulationRunner()
