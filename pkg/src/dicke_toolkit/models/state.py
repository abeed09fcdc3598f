"""
Mean-field and fluctuation state types, plus integrator settings.

Real 4-vectors and 4x4 matrices are ordered (alpha_r, beta_r, alpha_i, beta_i)
for the mean fields and (q_c, q_d, p_c, p_d) for the quadratures; the two
orderings coincide so the same symplectic form J applies to both.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from dicke_toolkit.core.config import IntegratorMethod, settings

# Symplectic form in the (q_c, q_d, p_c, p_d) ordering.
J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])

VACUUM_DET = 1.0 / 16.0

# |beta|^2 above this aborts integration.
BETA_GUARD = 1.0 - 1e-9


class IntegrationStatus(str, Enum):
    """How an integration terminated."""
    COMPLETED = "completed"
    BETA_BOUNDARY = "beta_boundary"


class ValidityStatus(str, Enum):
    """Outcome of the 1/N-expansion validity monitor."""
    VALID = "valid"
    EXCEEDED = "exceeded"


class ValidityReason(str, Enum):
    """Which check first marked a run as exceeded."""
    PHI_BOUND = "phi_bound"
    SYMPLECTIC_DEFECT = "symplectic_defect"
    PURITY_DEFECT = "purity_defect"


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for trajectory integration.

    ``fixed_step`` selects the classical fixed-step RK4 scheme regardless of
    ``method``; output samples are then spaced by whole steps.
    """
    method: IntegratorMethod = settings.integrator.method
    rtol: float = settings.integrator.rtol
    atol: float = settings.integrator.atol
    max_step: float = np.inf
    fixed_step: Optional[float] = None
    # Time between output samples; None keeps every accepted step.
    sample_interval: Optional[float] = None

    @property
    def is_fixed_step(self) -> bool:
        return self.fixed_step is not None or self.method == IntegratorMethod.RK4


@dataclass(frozen=True)
class MeanField:
    """Rescaled amplitudes alpha = <a>/sqrt(N), beta = <b>/sqrt(N)."""
    alpha: complex = 0j
    beta: complex = 0j

    @property
    def gamma(self) -> float:
        return 1.0 - abs(self.beta) ** 2

    @property
    def is_zero(self) -> bool:
        return self.alpha == 0 and self.beta == 0

    def __neg__(self) -> "MeanField":
        return MeanField(-self.alpha, -self.beta)


@dataclass
class StepDiagnostics:
    """Step-size controller bookkeeping for one integration."""
    accepted_steps: int = 0
    rejected_steps: int = 0
    max_error_norm: float = 0.0
    n_evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "accepted_steps": self.accepted_steps,
            "rejected_steps": self.rejected_steps,
            "max_error_norm": self.max_error_norm,
            "n_evaluations": self.n_evaluations,
        }


@dataclass(frozen=True)
class MeanFieldTrajectory:
    """Sampled mean-field trajectory; ``y`` rows are canonical 4-vectors."""
    t: np.ndarray
    y: np.ndarray
    diagnostics: StepDiagnostics = field(default_factory=StepDiagnostics)
    status: IntegrationStatus = IntegrationStatus.COMPLETED

    def __len__(self) -> int:
        return len(self.t)

    @property
    def alpha(self) -> np.ndarray:
        return self.y[:, 0] + 1j * self.y[:, 2]

    @property
    def beta(self) -> np.ndarray:
        return self.y[:, 1] + 1j * self.y[:, 3]

    @property
    def samples(self) -> List[Tuple[float, MeanField]]:
        return [(float(t), MeanField(complex(a), complex(b))) for t, a, b in zip(self.t, self.alpha, self.beta)]


@dataclass(frozen=True)
class FluctuationState:
    """Fundamental matrix and covariance at one instant."""
    Phi: np.ndarray
    W: np.ndarray
    t: float


@dataclass(frozen=True)
class ValidityReport:
    """Result of the validity monitor over a run."""
    status: ValidityStatus
    t_exceeded: Optional[float] = None
    phi_max_abs: float = 0.0
    reason: Optional[ValidityReason] = None
    max_symplectic_defect: float = 0.0
    max_purity_defect: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "reason": self.reason.value if self.reason else None,
            "t_exceeded": self.t_exceeded,
            "phi_max_abs": self.phi_max_abs,
        }


@dataclass(frozen=True)
class JointTrajectory:
    """Co-integrated mean fields and fundamental matrix.

    ``phi`` holds Phi(t, t0) relative to the start time ``t0`` of this run;
    compose with an earlier segment to recover the total propagator.
    """
    t: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    W0: np.ndarray
    N: float
    t0: float = 0.0
    diagnostics: StepDiagnostics = field(default_factory=StepDiagnostics)
    status: IntegrationStatus = IntegrationStatus.COMPLETED
    validity: ValidityReport = ValidityReport(ValidityStatus.VALID)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def alpha(self) -> np.ndarray:
        return self.y[:, 0] + 1j * self.y[:, 2]

    @property
    def beta(self) -> np.ndarray:
        return self.y[:, 1] + 1j * self.y[:, 3]

    @property
    def W(self) -> np.ndarray:
        """Covariance at every sample, ``Phi W0 Phi^T``."""
        return np.einsum("nij,jk,nlk->nil", self.phi, self.W0, self.phi)

    @property
    def phi_max_abs(self) -> np.ndarray:
        return np.abs(self.phi).reshape(len(self.t), -1).max(axis=1)

    @property
    def valid_flags(self) -> np.ndarray:
        """Per-sample trust marker from the validity monitor.

        A sample is trusted while Phi stays below sqrt(N) and no check has
        fired at or before its time.
        """
        flags = self.phi_max_abs < np.sqrt(self.N)
        if self.validity.t_exceeded is not None:
            flags &= self.t < self.validity.t_exceeded
        return flags

    @property
    def mean_field(self) -> MeanFieldTrajectory:
        return MeanFieldTrajectory(t=self.t, y=self.y, diagnostics=self.diagnostics, status=self.status)

    @property
    def samples(self) -> List[Tuple[float, MeanField, FluctuationState]]:
        W = self.W
        return [
            (float(t), MeanField(complex(a), complex(b)), FluctuationState(Phi=self.phi[i], W=W[i], t=float(t)))
            for i, (t, a, b) in enumerate(zip(self.t, self.alpha, self.beta))
        ]
