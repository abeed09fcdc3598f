"""
Observable records produced from mean fields and covariances.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict

from dicke_toolkit.models.protocol import Phase


@dataclass(frozen=True)
class GroundStateEnergy:
    """Leading-order ground-state energy per atom."""
    e_per_atom: float
    phase: Phase
    mu: float


@dataclass(frozen=True)
class MandelStatistics:
    """Photon-number variance and Mandel parameters."""
    sigma2_a: float
    rho: float
    rho_infinity: float
    mean_field_too_small: bool = False


@dataclass(frozen=True)
class WorkResult:
    """Average work done by the drive.

    ``work`` is authoritative. It equals the published closed form
    ``work_closed_form`` for vanishing mean fields and the mean-energy
    difference otherwise, in which case ``mean_field_gated`` is set.
    """
    work: float
    work_closed_form: float
    mean_field_gated: bool = False


@dataclass(frozen=True)
class InnerFriction:
    """Non-adiabatic excess work."""
    w_fric: float
    w_fric_per_atom_limit: float


@dataclass(frozen=True)
class SqueezingResult:
    """Best two-mode squeezed target for a covariance matrix."""
    r_opt: float
    fidelity: float
    bracket_failure: bool = False
    purity_warning: bool = False


@dataclass(frozen=True)
class ObservablesRecord:
    """All observables at one output sample."""
    t: float
    n_a: float
    sigma2_a: float
    rho: float
    rho_inf: float
    work: float
    w_fric: float
    w_fric_limit: float
    r_opt: float
    fidelity: float
    valid_flag: bool
    n_b: float = math.nan
    energy: float = math.nan
    work_closed_form: float = math.nan

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)
