"""
Run configuration schema.

Run configs are JSON documents validated by pydantic. A run summary written
by ``simulate`` embeds the resolved config under the ``config`` key and is
accepted by :func:`load_run_config` as well.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from dicke_toolkit import SCHEMA_VERSION
from dicke_toolkit.core.config import IntegratorMethod, PropagatorMethod, settings
from dicke_toolkit.core.exceptions import ConfigurationError, ValidationError
from dicke_toolkit.models.floquet import AxisMode, AxisSpec, GridSpec
from dicke_toolkit.models.protocol import DriveProtocol
from dicke_toolkit.models.state import IntegratorConfig


class InitialPoint(str, Enum):
    """Shorthand initial mean fields."""
    SR_PLUS = "sr+"
    SR_MINUS = "sr-"
    ZERO = "zero"


class CovarianceKind(str, Enum):
    """Initial covariance specification."""
    VACUUM = "vacuum"
    THERMAL = "thermal"
    EXPLICIT = "explicit"


class ProtocolConfig(BaseModel):
    """Sinusoidal drive parameters."""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    omega_a: float = Field(default=1.0, gt=0)
    lambda0: float = Field(default=1.0)
    lam: float = Field(default=0.5, ge=0, alias="lambda")
    eta: float = Field(default=0.1, ge=0)
    g: float = Field(default=0.5, ge=0)

    def to_protocol(self) -> DriveProtocol:
        return DriveProtocol.sinusoidal(self.omega_a, self.lambda0, self.lam, self.eta, self.g)


class CovarianceConfig(BaseModel):
    """Initial fluctuation covariance W(0)."""
    model_config = ConfigDict(extra="forbid")

    kind: CovarianceKind = CovarianceKind.VACUUM
    n_bar: float = Field(default=0.0, ge=0)
    matrix: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def check_matrix(self) -> "CovarianceConfig":
        if self.kind == CovarianceKind.EXPLICIT:
            if self.matrix is None:
                raise ValueError("matrix is required for an explicit covariance")
            if len(self.matrix) != 4 or any(len(row) != 4 for row in self.matrix):
                raise ValueError("matrix must be 4x4")
        return self


class InitialStateConfig(BaseModel):
    """Initial mean fields and covariance.

    Exactly one of ``epsilon``, ``alpha0``/``beta0`` or ``point`` selects the
    mean fields; complex amplitudes are written as ``[re, im]``.
    """
    model_config = ConfigDict(extra="forbid")

    epsilon: Optional[float] = None
    alpha0: Optional[Tuple[float, float]] = None
    beta0: Optional[Tuple[float, float]] = None
    point: Optional[InitialPoint] = None
    covariance: CovarianceConfig = Field(default_factory=CovarianceConfig)

    @model_validator(mode="after")
    def check_single_source(self) -> "InitialStateConfig":
        explicit = self.alpha0 is not None or self.beta0 is not None
        chosen = sum([self.epsilon is not None, explicit, self.point is not None])
        if chosen > 1:
            raise ValueError("give only one of epsilon, alpha0/beta0 or point")
        if chosen == 0:
            self.epsilon = 1e-2
        return self

    @property
    def alpha0_complex(self) -> complex:
        return complex(*self.alpha0) if self.alpha0 is not None else 0j

    @property
    def beta0_complex(self) -> complex:
        return complex(*self.beta0) if self.beta0 is not None else 0j


class IntegratorSettings(BaseModel):
    """Integrator overrides; unset values fall back to process settings."""
    model_config = ConfigDict(extra="forbid")

    method: IntegratorMethod = Field(default_factory=lambda: settings.integrator.method)
    rtol: float = Field(default_factory=lambda: settings.integrator.rtol, gt=0)
    atol: float = Field(default_factory=lambda: settings.integrator.atol, gt=0)
    max_step: Optional[float] = Field(default=None, gt=0)
    fixed_step: Optional[float] = Field(default=None, gt=0)


class AxisConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    num: int = Field(ge=1)


class SweepConfig(BaseModel):
    """Stability sweep axes; ``x`` maps to eta and ``y`` to the coupling."""
    model_config = ConfigDict(extra="forbid")

    mode: AxisMode = AxisMode.RAW
    x: AxisConfig
    y: AxisConfig
    method: PropagatorMethod = Field(default_factory=lambda: settings.floquet.sweep_method)

    def to_grid_spec(self) -> GridSpec:
        return GridSpec(
            x=AxisSpec(self.x.start, self.x.stop, self.x.num),
            y=AxisSpec(self.y.start, self.y.stop, self.y.num),
            mode=self.mode,
        )


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "runs/out"
    trajectory: str = "trajectory.csv"
    fluctuations: str = "fluctuations.csv"
    observables: str = "observables.csv"
    grid: str = "stability.csv"
    overlay: str = "reference_curves.csv"
    summary: str = "summary.json"


class RunConfig(BaseModel):
    """A complete, validated run description."""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    schema_version: str = SCHEMA_VERSION
    name: Optional[str] = None
    protocol: ProtocolConfig = Field(default_factory=ProtocolConfig)
    N: float = Field(default=1e6, ge=1)
    initial: InitialStateConfig = Field(default_factory=InitialStateConfig)
    integrator: IntegratorSettings = Field(default_factory=IntegratorSettings)
    t_end: float = Field(default=100.0, gt=0)
    # Spacing of output samples; defaults to T/100 for a driven protocol.
    sample_interval: Optional[float] = Field(default=None, gt=0)
    stride: int = Field(default=1, ge=1)
    sweep: Optional[SweepConfig] = None
    output: OutputConfig = Field(default_factory=OutputConfig)
    workers: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_schema_version(self) -> "RunConfig":
        major = self.schema_version.split(".")[0]
        if major != SCHEMA_VERSION.split(".")[0]:
            raise ValueError(f"unsupported schema_version {self.schema_version!r}")
        return self

    def drive_protocol(self) -> DriveProtocol:
        return self.protocol.to_protocol()

    def resolved_sample_interval(self) -> float:
        if self.sample_interval is not None:
            return self.sample_interval
        protocol = self.drive_protocol()
        if protocol.is_periodic:
            return protocol.period / 100.0
        return self.t_end / 1000.0

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(
            method=self.integrator.method,
            rtol=self.integrator.rtol,
            atol=self.integrator.atol,
            max_step=self.integrator.max_step if self.integrator.max_step is not None else float("inf"),
            fixed_step=self.integrator.fixed_step,
            sample_interval=self.resolved_sample_interval(),
        )

    def resolved_workers(self) -> int:
        return self.workers or settings.default_workers()

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


def _first_error(exc: PydanticValidationError) -> ValidationError:
    error = exc.errors()[0]
    field = ".".join(str(part) for part in error.get("loc", ())) or None
    return ValidationError(error.get("msg", "invalid value"), field=field)


def parse_run_config(data: Dict[str, Any]) -> RunConfig:
    """Validate a config dict, collapsing errors to one diagnostic."""
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    try:
        return RunConfig.model_validate(data)
    except PydanticValidationError as exc:
        raise _first_error(exc) from exc


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Load a run config (or a run summary) from a JSON file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigurationError(f"Config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"Config file is not valid JSON: {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file must contain a JSON object: {path}")
    return parse_run_config(data)


def parse_tolerance(text: str) -> Tuple[float, Optional[float]]:
    """Parse ``REL[,ABS]``."""
    parts = [p.strip() for p in text.split(",")]
    if not 1 <= len(parts) <= 2:
        raise ValidationError("expected REL[,ABS]", field="tol")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ValidationError(f"not a number: {text!r}", field="tol") from exc
    if any(v <= 0 for v in values):
        raise ValidationError("tolerances must be positive", field="tol")
    return values[0], (values[1] if len(values) == 2 else None)


def apply_overrides(
    config: RunConfig,
    *,
    out: Optional[str] = None,
    workers: Optional[int] = None,
    fixed_step: Optional[float] = None,
    tol: Optional[str] = None,
    stride: Optional[int] = None,
    t_end: Optional[float] = None,
) -> RunConfig:
    """Return a re-validated copy with CLI flag values on top."""
    data = config.to_json_dict()
    if out is not None:
        data["output"]["directory"] = out
    if workers is not None:
        data["workers"] = workers
    if fixed_step is not None:
        data["integrator"]["fixed_step"] = fixed_step
    if tol is not None:
        rtol, atol = parse_tolerance(tol)
        data["integrator"]["rtol"] = rtol
        if atol is not None:
            data["integrator"]["atol"] = atol
    if stride is not None:
        data["stride"] = stride
    if t_end is not None:
        data["t_end"] = t_end
    return parse_run_config(data)
