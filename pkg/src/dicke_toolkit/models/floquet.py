"""
Floquet analysis and stability-sweep result types.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Tuple

import numpy as np


class CellStatus(str, Enum):
    """Classification of one stability-grid cell."""
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"
    FAILED = "failed"


class AxisMode(str, Enum):
    """Coordinates in which the sweep axes are given."""
    RAW = "raw"                # (eta, g)
    NORMALIZED = "normalized"  # (eta / omega_a, 2 g / eta)


class ValidityRegime(str, Enum):
    """Whether the initial displacement exceeds the quantum scale N^(-1/2)."""
    MACROSCOPIC = "macroscopic"
    FLUCTUATION_LIMITED = "fluctuation_limited"


@dataclass(frozen=True)
class FloquetResult:
    """Monodromy of the linearized flow and its spectrum."""
    monodromy: np.ndarray
    multipliers: np.ndarray
    exponents: np.ndarray
    gamma_star: float
    period: float
    det_defect: float = 0.0
    pairing_defect: float = 0.0
    marginal: bool = False

    @property
    def is_unstable(self) -> bool:
        return self.gamma_star > 0

    @property
    def status(self) -> CellStatus:
        if self.marginal:
            return CellStatus.MARGINAL
        return CellStatus.UNSTABLE if self.is_unstable else CellStatus.STABLE


@dataclass(frozen=True)
class AxisSpec:
    """Linearly spaced sweep axis."""
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if self.num < 1:
            raise ValueError("axis needs at least one point")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("axis bounds must be finite")

    @property
    def values(self) -> np.ndarray:
        if self.num == 1:
            return np.array([float(self.start)])
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class GridSpec:
    """Two-axis sweep: ``x`` drives eta, ``y`` drives the coupling."""
    x: AxisSpec
    y: AxisSpec
    mode: AxisMode = AxisMode.RAW

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.x.num, self.y.num)

    @property
    def axis_names(self) -> Tuple[str, str]:
        if self.mode == AxisMode.NORMALIZED:
            return ("eta_over_omega_a", "two_g_over_eta")
        return ("eta", "g")

    def physical_points(self, omega_a: float) -> Tuple[np.ndarray, np.ndarray]:
        """Physical (eta, g) arrays of shape ``(x.num, y.num)``."""
        X, Y = np.meshgrid(self.x.values, self.y.values, indexing="ij")
        if self.mode == AxisMode.NORMALIZED:
            eta = X * omega_a
            return eta, Y * eta / 2.0
        return X, Y


@dataclass(frozen=True)
class StabilityGrid:
    """Instability rate over a (eta, g) grid; failed cells hold NaN."""
    spec: GridSpec
    eta: np.ndarray
    g: np.ndarray
    gamma_star: np.ndarray
    status: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return int(np.sum(self.status == CellStatus.FAILED.value))

    @property
    def n_marginal(self) -> int:
        return int(np.sum(self.status == CellStatus.MARGINAL.value))


@dataclass(frozen=True)
class ValidityTimes:
    """Time scales of the linear transient and of the 1/N expansion."""
    tau_star: float
    t_lin: float
    t_max: float
    regime: ValidityRegime

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau_star": self.tau_star,
            "t_lin": self.t_lin,
            "t_max": self.t_max,
            "regime": self.regime.value,
        }
