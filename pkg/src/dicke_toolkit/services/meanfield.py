"""
Nonlinear mean-field equations of motion.

The state is the canonical 4-vector (alpha_r, beta_r, alpha_i, beta_i):
alpha_r and beta_r are coordinates, alpha_i and beta_i their momenta, and
the flow is generated by :func:`classical_hamiltonian`.
"""

import math
from typing import Dict, Optional, Tuple

import numpy as np
import structlog

from dicke_toolkit.core.exceptions import GammaNonPositive
from dicke_toolkit.models.protocol import DriveProtocol, PointKind
from dicke_toolkit.models.state import (
    BETA_GUARD,
    IntegratorConfig,
    MeanField,
    MeanFieldTrajectory,
)
from dicke_toolkit.services.integrator import integrate

logger = structlog.get_logger(__name__)

# |beta| at or above this is outside the expansion domain.
BETA_LIMIT = 1.0 - 1e-9


def mean_field_to_vector(mf: MeanField) -> np.ndarray:
    return np.array([mf.alpha.real, mf.beta.real, mf.alpha.imag, mf.beta.imag], dtype=float)


def vector_to_mean_field(y: np.ndarray) -> MeanField:
    return MeanField(alpha=complex(y[0], y[2]), beta=complex(y[1], y[3]))


def sqrt_gamma(beta_r: float, beta_i: float) -> float:
    beta_sq = beta_r * beta_r + beta_i * beta_i
    if math.sqrt(beta_sq) >= BETA_LIMIT:
        raise GammaNonPositive(math.sqrt(beta_sq))
    return math.sqrt(1.0 - beta_sq)


def rhs_vector(t: float, y: np.ndarray, protocol: DriveProtocol) -> np.ndarray:
    """Real form of the mean-field equations."""
    alpha_r, beta_r, alpha_i, beta_i = y
    omega_a, omega_b, g = protocol.evaluate(t)
    root = sqrt_gamma(beta_r, beta_i)
    gamma = root * root
    return np.array([
        omega_a * alpha_i,
        omega_b * beta_i - 2.0 * g * alpha_r * beta_r * beta_i / root,
        -omega_a * alpha_r - 2.0 * g * root * beta_r,
        -omega_b * beta_r - 2.0 * g * root * alpha_r * (1.0 - beta_r * beta_r / gamma),
    ])


def mean_field_rhs(t: float, mf: MeanField, protocol: DriveProtocol) -> Tuple[complex, complex]:
    """Complex rates ``(d alpha/dt, d beta/dt)``."""
    d = rhs_vector(t, mean_field_to_vector(mf), protocol)
    return complex(d[0], d[2]), complex(d[1], d[3])


def classical_hamiltonian(mf: MeanField, omega_a: float, omega_b: float, g: float) -> float:
    """Energy function generating the mean-field flow."""
    root = sqrt_gamma(mf.beta.real, mf.beta.imag)
    return (
        0.5 * omega_a * abs(mf.alpha) ** 2
        + 0.5 * omega_b * abs(mf.beta) ** 2
        + 2.0 * g * root * mf.beta.real * mf.alpha.real
    )


def linearized_M0(omega_a, omega_b, g) -> np.ndarray:
    """Kernel of the flow linearized around the normal point.

    Accepts scalars or equally shaped arrays; array input yields a stack of
    shape ``(..., 4, 4)``.
    """
    omega_a, omega_b, g = np.broadcast_arrays(
        np.asarray(omega_a, dtype=float), np.asarray(omega_b, dtype=float), np.asarray(g, dtype=float)
    )
    M = np.zeros(omega_a.shape + (4, 4))
    M[..., 0, 2] = omega_a
    M[..., 1, 3] = omega_b
    M[..., 2, 0] = -omega_a
    M[..., 2, 1] = -2.0 * g
    M[..., 3, 0] = -2.0 * g
    M[..., 3, 1] = -omega_b
    return M


def beta_guard(y: np.ndarray) -> bool:
    return y[1] * y[1] + y[3] * y[3] > BETA_GUARD


def integrate_mean_field(
    initial: MeanField,
    protocol: DriveProtocol,
    t_end: float,
    integrator: Optional[IntegratorConfig] = None,
    t0: float = 0.0,
) -> MeanFieldTrajectory:
    """Integrate the nonlinear mean-field equations to ``t_end``."""
    integrator = integrator or IntegratorConfig()
    if abs(initial.beta) >= BETA_LIMIT:
        raise GammaNonPositive(abs(initial.beta))

    output = integrate(
        lambda t, y: rhs_vector(t, y, protocol),
        mean_field_to_vector(initial),
        t0,
        t_end,
        integrator,
        guard=beta_guard,
    )
    return MeanFieldTrajectory(t=output.t, y=output.y, diagnostics=output.diagnostics, status=output.status)


def integrate_linearized(
    initial: MeanField,
    protocol: DriveProtocol,
    t_end: float,
    integrator: Optional[IntegratorConfig] = None,
) -> MeanFieldTrajectory:
    """Flow of ``dx/dt = M0(t) x``, valid while the amplitudes stay small."""
    integrator = integrator or IntegratorConfig()

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return linearized_M0(*protocol.evaluate(t)) @ y

    output = integrate(rhs, mean_field_to_vector(initial), 0.0, t_end, integrator)
    return MeanFieldTrajectory(t=output.t, y=output.y, diagnostics=output.diagnostics, status=output.status)


def stationary_point_visits(
    trajectory: MeanFieldTrajectory,
    protocol: DriveProtocol,
    radius: float = 0.15,
) -> Dict[PointKind, float]:
    """First time the trajectory came within ``radius`` of each stationary point.

    Points are taken at each sample's instantaneous parameters; super-radiant
    points only count while mu(t) < 1.
    """
    omega_a, omega_b, g = protocol.evaluate(trajectory.t)
    alpha, beta = trajectory.alpha, trajectory.beta
    visits: Dict[PointKind, float] = {}

    near_normal = np.sqrt(np.abs(alpha) ** 2 + np.abs(beta) ** 2) < radius
    if near_normal.any():
        visits[PointKind.NORMAL] = float(trajectory.t[np.argmax(near_normal)])

    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(g > 0, omega_a * omega_b / (4.0 * g ** 2), np.inf)
        exists = (mu < 1) & (mu > 0)
        alpha_sr = np.where(exists, (g / omega_a) * np.sqrt(np.clip(1.0 - mu ** 2, 0.0, None)), 0.0)
        beta_sr = np.where(exists, np.sqrt(np.clip((1.0 - mu) / 2.0, 0.0, None)), 0.0)

    for kind, sign in ((PointKind.SR_PLUS, 1.0), (PointKind.SR_MINUS, -1.0)):
        distance = np.sqrt(np.abs(alpha - sign * alpha_sr) ** 2 + np.abs(beta + sign * beta_sr) ** 2)
        near = exists & (distance < radius)
        if near.any():
            visits[kind] = float(trajectory.t[np.argmax(near)])

    logger.debug("Stationary point visits", visits={k.value: v for k, v in visits.items()})
    return visits
