"""
Model parameters, the control parameter mu and stationary points.

All functions are pure and safe to call from any number of workers.
"""

import math
from typing import List, Optional, Tuple

import numpy as np
import structlog

from dicke_toolkit.core.exceptions import ValidationError, ZeroCoupling
from dicke_toolkit.models.protocol import (
    ArrayLike,
    DriveProtocol,
    DriveRegime,
    MuSummary,
    PointKind,
    StationaryPoint,
)

logger = structlog.get_logger(__name__)

# Samples per period when bracketing mu for a general-mode protocol.
GENERAL_MODE_SAMPLES = 4096


def evaluate_protocol(protocol: DriveProtocol, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Instantaneous ``(omega_a, omega_b, g)``."""
    return protocol.evaluate(t)


def mu_value(omega_a: float, omega_b: float, g: float) -> float:
    """``omega_a omega_b / (4 g^2)``; infinite when ``g = 0``."""
    if g == 0:
        return math.inf
    return omega_a * omega_b / (4.0 * g * g)


def mu_of_t(protocol: DriveProtocol, t: float) -> float:
    omega_a, omega_b, g = protocol.evaluate(t)
    if g == 0:
        raise ZeroCoupling(t)
    return omega_a * omega_b / (4.0 * g * g)


def mu_summary(protocol: DriveProtocol) -> MuSummary:
    """Static value and extremes of mu over a drive cycle."""
    if protocol.is_general:
        if not protocol.is_periodic:
            raise ValidationError("a general-mode protocol needs eta > 0 to bracket mu", field="eta")
        t = np.linspace(0.0, protocol.period, GENERAL_MODE_SAMPLES, endpoint=False)
        omega_a, omega_b, g = protocol.evaluate(t)
        if np.any(g == 0):
            raise ZeroCoupling(float(t[np.argmax(g == 0)]))
        mu = omega_a * omega_b / (4.0 * g ** 2)
        return MuSummary(mu0=float(mu[0]), mu_min=float(mu.min()), mu_max=float(mu.max()))

    if protocol.g == 0:
        raise ZeroCoupling(0.0)
    mu0 = protocol.lambda0 * protocol.omega_a ** 2 / (4.0 * protocol.g ** 2)
    ratio = protocol.lam / protocol.lambda0 if protocol.lambda0 != 0 else 0.0
    # Sorting keeps mu_min <= mu_max for a negative lambda0 as well.
    low, high = sorted((mu0 * (1.0 - ratio), mu0 * (1.0 + ratio)))
    return MuSummary(mu0=mu0, mu_min=low, mu_max=high)


def stationary_points(omega_a: float, omega_b: float, g: float) -> List[StationaryPoint]:
    """Fixed points of the mean-field flow at fixed parameters."""
    points = [StationaryPoint(alpha=0j, beta=0j, kind=PointKind.NORMAL)]
    mu = mu_value(omega_a, omega_b, g)
    if mu >= 1 or mu <= 0:
        return points

    alpha = (g / omega_a) * math.sqrt(1.0 - mu * mu)
    beta = math.sqrt((1.0 - mu) / 2.0)
    points.append(StationaryPoint(alpha=complex(alpha), beta=complex(-beta), kind=PointKind.SR_PLUS))
    points.append(StationaryPoint(alpha=complex(-alpha), beta=complex(beta), kind=PointKind.SR_MINUS))
    return points


def stationary_point_at(protocol: DriveProtocol, t: float) -> List[StationaryPoint]:
    omega_a, omega_b, g = protocol.evaluate(t)
    return stationary_points(omega_a, omega_b, g)


def super_radiant_point(protocol: DriveProtocol, kind: PointKind, t: float = 0.0) -> StationaryPoint:
    """The requested super-radiant point at time ``t``."""
    for point in stationary_point_at(protocol, t):
        if point.kind == kind:
            return point
    raise ValidationError(
        f"no {kind.value} stationary point at t={t}: mu(t) = {mu_of_t(protocol, t):.6g} >= 1",
        field="initial.point",
    )


def drive_regime(protocol: DriveProtocol) -> DriveRegime:
    """Qualitative regime from the position of mu0, mu_min and mu_max relative to 1."""
    summary = mu_summary(protocol)
    if summary.mu_min > 1:
        return DriveRegime.ALWAYS_NORMAL
    if summary.mu_max < 1:
        return DriveRegime.ALWAYS_SUPER_RADIANT
    if summary.mu0 > 1:
        return DriveRegime.NORMAL_ORBIT
    return DriveRegime.SWITCHING


def resonance_frequencies(protocol: DriveProtocol, k_max: int = 10) -> np.ndarray:
    """Centres ``eta_k = (omega_a + omega_b0) / k`` of the small-coupling instability tongues."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    k = np.arange(1, k_max + 1)
    return protocol.omega_a * (1.0 + protocol.lambda0) / k


def critical_amplitude(protocol: DriveProtocol) -> Optional[float]:
    """Drive amplitude at which mu(t) touches 1, ``lambda0 (1/mu0 - 1)``."""
    if protocol.g == 0:
        return None
    mu0 = mu_summary(protocol).mu0
    return protocol.lambda0 * (1.0 / mu0 - 1.0)


def check_protocol(protocol: DriveProtocol) -> None:
    """Log non-fatal concerns about a protocol."""
    if not protocol.is_general and protocol.lam > protocol.lambda0:
        logger.warning(
            "Drive amplitude exceeds lambda0; omega_b(t) turns negative during the cycle",
            lam=protocol.lam,
            lambda0=protocol.lambda0,
        )
