"""
Gaussian fluctuation dynamics around the mean fields.

The fundamental matrix Phi is integrated together with the mean fields as
one 20-component system; covariances are reconstructed as Phi W0 Phi^T.
"""

import math
from typing import Optional, Tuple

import numpy as np
import structlog

from dicke_toolkit.core.exceptions import GammaNonPositive, ValidationError
from dicke_toolkit.models.protocol import DriveProtocol
from dicke_toolkit.models.state import (
    J,
    VACUUM_DET,
    IntegratorConfig,
    JointTrajectory,
    MeanField,
    ValidityReason,
    ValidityReport,
    ValidityStatus,
)
from dicke_toolkit.services.integrator import integrate
from dicke_toolkit.services.meanfield import (
    BETA_LIMIT,
    beta_guard,
    sqrt_gamma,
    mean_field_to_vector,
    rhs_vector,
)

logger = structlog.get_logger(__name__)

PHYSICALITY_TOLERANCE = 1e-8
# Relative symplectic or purity defect above which samples are no longer trusted.
DEFECT_TOLERANCE = 1e-6


def vacuum_covariance() -> np.ndarray:
    return 0.5 * np.eye(4)


def thermal_covariance(n_bar: float) -> np.ndarray:
    """Equal thermal occupation ``n_bar`` in both modes."""
    if n_bar < 0:
        raise ValidationError("thermal occupation must be >= 0", field="n_bar")
    return (n_bar + 0.5) * np.eye(4)


def physicality_margin(W: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian matrix ``W + (i/2) J``."""
    return float(np.linalg.eigvalsh(np.asarray(W, dtype=complex) + 0.5j * J).min())


def covariance_is_physical(W: np.ndarray, tol: float = PHYSICALITY_TOLERANCE) -> bool:
    W = np.asarray(W, dtype=float)
    if W.shape != (4, 4) or not np.allclose(W, W.T, atol=1e-12):
        return False
    return physicality_margin(W) >= -tol


def build_M(mf: MeanField, omega_a: float, omega_b: float, g: float) -> np.ndarray:
    """Fluctuation kernel at the given mean fields, acting on (q_c, q_d, p_c, p_d)."""
    alpha_r = mf.alpha.real
    beta_r, beta_i = mf.beta.real, mf.beta.imag
    root = sqrt_gamma(beta_r, beta_i)
    return _kernel(alpha_r, beta_r, beta_i, root, omega_a, omega_b, g)


def _kernel(alpha_r, beta_r, beta_i, root, omega_a, omega_b, g) -> np.ndarray:
    gamma = root * root
    c = 2.0 * g / root
    return np.array([
        [0.0, 0.0, omega_a, 0.0],
        [
            -c * beta_r * beta_i,
            -c * alpha_r * beta_i * (1.0 + beta_r ** 2 / gamma),
            0.0,
            omega_b - c * alpha_r * beta_r * (1.0 + beta_i ** 2 / gamma),
        ],
        [
            -omega_a,
            -2.0 * g * root * (1.0 - beta_r ** 2 / gamma),
            0.0,
            c * beta_r * beta_i,
        ],
        [
            -2.0 * g * root * (1.0 - beta_r ** 2 / gamma),
            -omega_b + c * alpha_r * beta_r * (3.0 + beta_r ** 2 / gamma),
            0.0,
            c * alpha_r * beta_i * (1.0 + beta_r ** 2 / gamma),
        ],
    ])


def _joint_rhs(t: float, y: np.ndarray, protocol: DriveProtocol) -> np.ndarray:
    omega_a, omega_b, g = protocol.evaluate(t)
    mf_rate = rhs_vector(t, y[:4], protocol)
    alpha_r, beta_r, beta_i = y[0], y[1], y[3]
    M = _kernel(alpha_r, beta_r, beta_i, sqrt_gamma(beta_r, beta_i), omega_a, omega_b, g)
    phi_rate = M @ y[4:].reshape(4, 4)
    return np.concatenate([mf_rate, phi_rate.ravel()])


def _as_stack(Phi: np.ndarray) -> np.ndarray:
    return np.asarray(Phi, dtype=float).reshape(-1, 4, 4)


def _symplectic_defects(stack: np.ndarray) -> np.ndarray:
    defect = np.abs(np.einsum("nij,jk,nlk->nil", stack, J, stack) - J).max(axis=(1, 2))
    scale = np.maximum(1.0, np.abs(stack).max(axis=(1, 2)) ** 2)
    return defect / scale


def _det_defects(sign: np.ndarray, logdet: np.ndarray) -> np.ndarray:
    defects = np.abs(np.expm1(logdet - math.log(VACUUM_DET)))
    return np.where(sign > 0, defects, np.inf)


def _propagated_purity_defects(stack: np.ndarray, W0: np.ndarray) -> np.ndarray:
    # det(Phi W0 Phi^T) = det(Phi)^2 det(W0); Phi is far better conditioned than W.
    sign_phi, logdet_phi = np.linalg.slogdet(stack)
    sign_w0, logdet_w0 = np.linalg.slogdet(np.asarray(W0, dtype=float))
    return _det_defects(sign_phi * sign_phi * sign_w0, 2.0 * logdet_phi + logdet_w0)


def symplectic_defect(Phi: np.ndarray) -> float:
    """``max |Phi J Phi^T - J| / max(1, max|Phi_ij|^2)``; accepts a single matrix or a stack."""
    return float(_symplectic_defects(_as_stack(Phi)).max())


def purity_defect(W: np.ndarray) -> float:
    """Relative deviation of ``det W`` from the pure-state value 1/16.

    Computed from ``slogdet``; a stack of matrices yields the largest defect.
    """
    sign, logdet = np.linalg.slogdet(np.asarray(W, dtype=float))
    return float(_det_defects(np.atleast_1d(sign), np.atleast_1d(logdet)).max())


def propagated_purity_defect(Phi: np.ndarray, W0: np.ndarray) -> float:
    """Purity defect of ``Phi W0 Phi^T`` evaluated through ``det Phi``."""
    return float(_propagated_purity_defects(_as_stack(Phi), W0).max())


def validity_monitor(
    Phi: np.ndarray,
    N: float,
    t: Optional[np.ndarray] = None,
    W0: Optional[np.ndarray] = None,
    tolerance: float = DEFECT_TOLERANCE,
) -> ValidityReport:
    """Flag the first sample the Gaussian description can no longer be trusted.

    A sample fails when ``max |Phi_ij|`` reaches ``sqrt(N)``, when the
    relative symplectic defect exceeds ``tolerance``, or, for a pure ``W0``,
    when the propagated purity defect does. ``Phi`` may be one matrix or a
    stack sampled at times ``t``.
    """
    if N < 1:
        raise ValidationError("atom count must be >= 1", field="N")
    stack = _as_stack(Phi)
    peak = np.abs(stack).max(axis=(1, 2))
    symplectic = _symplectic_defects(stack)
    checks = [
        (ValidityReason.PHI_BOUND, peak >= math.sqrt(N)),
        (ValidityReason.SYMPLECTIC_DEFECT, symplectic > tolerance),
    ]
    purity: Optional[np.ndarray] = None
    if W0 is not None and purity_defect(W0) <= tolerance:
        purity = _propagated_purity_defects(stack, W0)
        checks.append((ValidityReason.PURITY_DEFECT, purity > tolerance))

    report = {
        "phi_max_abs": float(peak.max()),
        "max_symplectic_defect": float(symplectic.max()),
        "max_purity_defect": float(purity.max()) if purity is not None else None,
    }
    failures = [(int(np.argmax(mask)), reason) for reason, mask in checks if mask.any()]
    if not failures:
        return ValidityReport(ValidityStatus.VALID, **report)

    index, reason = min(failures, key=lambda failure: failure[0])
    t_exceeded = float(t[index]) if t is not None else None
    logger.warning(
        "Fluctuation expansion exceeded its validity",
        t=t_exceeded,
        reason=reason.value,
        phi_max_abs=float(peak[index]),
        symplectic_defect=float(symplectic[index]),
        N=N,
    )
    return ValidityReport(ValidityStatus.EXCEEDED, t_exceeded, reason=reason, **report)


def integrate_joint(
    mf0: MeanField,
    W0: np.ndarray,
    protocol: DriveProtocol,
    t_end: float,
    integrator: Optional[IntegratorConfig] = None,
    N: float = 1.0,
    t0: float = 0.0,
) -> JointTrajectory:
    """Co-integrate the mean fields and the fundamental matrix.

    Starting at ``t0`` restarts from a checkpoint: ``mf0`` and ``W0`` are the
    state at ``t0`` and the returned ``phi`` is Phi(t, t0), to be combined
    with the earlier segment via :func:`compose`.
    """
    integrator = integrator or IntegratorConfig()
    W0 = np.asarray(W0, dtype=float)
    if abs(mf0.beta) >= BETA_LIMIT:
        raise GammaNonPositive(abs(mf0.beta))
    if not covariance_is_physical(W0):
        raise ValidationError("initial covariance is not symmetric and physical", field="initial.covariance")

    y0 = np.concatenate([mean_field_to_vector(mf0), np.eye(4).ravel()])
    output = integrate(
        lambda t, y: _joint_rhs(t, y, protocol),
        y0,
        t0,
        t_end,
        integrator,
        guard=beta_guard,
    )
    phi = output.y[:, 4:].reshape(-1, 4, 4)
    validity = validity_monitor(phi, N, output.t, W0=W0)
    return JointTrajectory(
        t=output.t,
        y=output.y[:, :4],
        phi=phi,
        W0=W0,
        N=N,
        t0=t0,
        diagnostics=output.diagnostics,
        status=output.status,
        validity=validity,
    )


def compose(Phi2: np.ndarray, Phi1: np.ndarray) -> np.ndarray:
    """Propagator over two consecutive segments, ``Phi2 Phi1``."""
    return np.asarray(Phi2) @ np.asarray(Phi1)


def checkpoint(trajectory: JointTrajectory, index: int = -1) -> Tuple[float, MeanField, np.ndarray, np.ndarray]:
    """Restart data ``(t, mean field, W(t), Phi(t, t0))`` at a sample."""
    y = trajectory.y[index]
    Phi = trajectory.phi[index]
    W = Phi @ trajectory.W0 @ Phi.T
    return float(trajectory.t[index]), MeanField(complex(y[0], y[2]), complex(y[1], y[3])), W, Phi
