"""
Floquet analysis of the linearized dynamics and stability-diagram sweeps.

Instability is always read off the integrated monodromy matrix, never from
instantaneous eigenvalues of M0(t).
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from dicke_toolkit.core.config import PropagatorMethod, settings
from dicke_toolkit.core.exceptions import IntegrationError, ValidationError
from dicke_toolkit.models.floquet import (
    CellStatus,
    FloquetResult,
    GridSpec,
    StabilityGrid,
    ValidityRegime,
    ValidityTimes,
)
from dicke_toolkit.models.protocol import DriveProtocol
from dicke_toolkit.monitoring.metrics import record_sweep, timed
from dicke_toolkit.services.meanfield import linearized_M0

logger = structlog.get_logger(__name__)

# Gauss-Legendre nodes on [0, 1] for the fourth-order Magnus step.
_GAUSS_NODES = (0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0)
_COMMUTATOR_WEIGHT = math.sqrt(3.0) / 12.0


def _omega_scale(protocol: DriveProtocol) -> float:
    """Fastest frequency present in M0(t) or the drive."""
    if protocol.is_general:
        t = np.linspace(0.0, protocol.period if protocol.is_periodic else 1.0, 1024)
        omega_a, omega_b, g = protocol.evaluate(t)
        return float(max(np.abs(omega_a).max(), np.abs(omega_b).max(), 2.0 * np.abs(g).max(), protocol.eta, 1e-12))
    omega_b_max = protocol.omega_a * (abs(protocol.lambda0) + protocol.lam)
    return max(protocol.omega_a, omega_b_max, 2.0 * protocol.g, protocol.eta)


def _tree_product(factors: np.ndarray) -> np.ndarray:
    """Ordered product ``F[n-1] ... F[1] F[0]`` by pairwise reduction."""
    while len(factors) > 1:
        if len(factors) % 2:
            factors = np.concatenate([factors, np.eye(4)[None]], axis=0)
        factors = factors[1::2] @ factors[0::2]
    return factors[0]


def _magnus_propagator(protocol: DriveProtocol, t0: float, t1: float, magnus_step: float) -> np.ndarray:
    span = t1 - t0
    n_steps = max(1, int(math.ceil(span * _omega_scale(protocol) / magnus_step)))
    h = span / n_steps
    starts = t0 + h * np.arange(n_steps)
    A1 = linearized_M0(*protocol.evaluate(starts + _GAUSS_NODES[0] * h))
    A2 = linearized_M0(*protocol.evaluate(starts + _GAUSS_NODES[1] * h))
    Omega = 0.5 * h * (A1 + A2) - _COMMUTATOR_WEIGHT * h * h * (A1 @ A2 - A2 @ A1)
    return _tree_product(expm(Omega))


def _adaptive_propagator(protocol: DriveProtocol, t0: float, t1: float, rtol: float, atol: float) -> np.ndarray:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return (linearized_M0(*protocol.evaluate(t)) @ y.reshape(4, 4)).ravel()

    solution = solve_ivp(rhs, (t0, t1), np.eye(4).ravel(), method="DOP853", rtol=rtol, atol=atol)
    if not solution.success:
        raise IntegrationError(f"Propagator integration failed: {solution.message}", details={"t0": t0, "t1": t1})
    return solution.y[:, -1].reshape(4, 4)


def linear_propagator(
    protocol: DriveProtocol,
    t0: float,
    t1: float,
    method: PropagatorMethod = PropagatorMethod.ADAPTIVE,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
    magnus_step: Optional[float] = None,
) -> np.ndarray:
    """Propagator Phi(t1, t0) of ``dx/dt = M0(t) x``."""
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    if method == PropagatorMethod.MAGNUS:
        return _magnus_propagator(protocol, t0, t1, magnus_step or settings.floquet.magnus_step)
    return _adaptive_propagator(
        protocol, t0, t1, rtol or settings.floquet.rtol, atol or settings.floquet.atol
    )


def monodromy(protocol: DriveProtocol, method: PropagatorMethod = PropagatorMethod.ADAPTIVE, **kwargs) -> np.ndarray:
    """Propagator over one drive period from Phi(0) = I."""
    if not protocol.is_periodic:
        raise ValidationError("monodromy needs a periodic drive (eta > 0)", field="eta")
    return linear_propagator(protocol, 0.0, protocol.period, method=method, **kwargs)


def floquet_analysis(
    protocol: DriveProtocol,
    method: PropagatorMethod = PropagatorMethod.ADAPTIVE,
    threshold: Optional[float] = None,
    magnus_step: Optional[float] = None,
) -> FloquetResult:
    """Monodromy, multipliers, exponents and the instability rate."""
    threshold = threshold if threshold is not None else settings.floquet.gamma_threshold
    T = protocol.period
    M = monodromy(protocol, method=method, magnus_step=magnus_step)
    return analyse_monodromy(M, T, threshold)


def analyse_monodromy(M: np.ndarray, period: float, threshold: float) -> FloquetResult:
    multipliers = np.linalg.eigvals(M)
    exponents = np.log(multipliers.astype(complex)) / period
    max_real = float(np.max(exponents.real))
    gamma_star = max_real if max_real > threshold else 0.0

    # Both defects are relative to |M|_2^2.
    scale = max(1.0, float(np.linalg.norm(M, 2)) ** 2)
    det_defect = abs(float(np.linalg.det(M)) - 1.0) / scale
    products = np.abs(np.outer(multipliers, multipliers) - 1.0)
    np.fill_diagonal(products, np.inf)
    pairing_defect = float(products.min(axis=1).max()) / scale

    return FloquetResult(
        monodromy=M,
        multipliers=multipliers,
        exponents=exponents,
        gamma_star=gamma_star,
        period=period,
        det_defect=det_defect,
        pairing_defect=pairing_defect,
        marginal=threshold / 10.0 < max_real <= 10.0 * threshold,
    )


def instability_rate(result: FloquetResult, threshold: Optional[float] = None) -> float:
    """``max(0, Re nu_i)``, zero unless it clears the numerical threshold."""
    threshold = threshold if threshold is not None else settings.floquet.gamma_threshold
    max_real = float(np.max(np.real(result.exponents)))
    return max_real if max_real > threshold else 0.0


def gamma_star_static(omega_a: float, omega_b: float, g: float) -> float:
    """Closed-form instability rate of the undriven model."""
    inner = math.sqrt(((omega_a ** 2 - omega_b ** 2) / 2.0) ** 2 + 4.0 * omega_a * omega_b * g ** 2)
    inner -= (omega_a ** 2 + omega_b ** 2) / 2.0
    return math.sqrt(inner) if inner > 0 else 0.0


def validity_times(gamma_star: float, delta: float, N: float) -> ValidityTimes:
    """Linear-transient and expansion-validity time scales."""
    if not 0 < delta < 1:
        raise ValidationError("initial amplitude must satisfy 0 < delta < 1", field="delta")
    if N < 1:
        raise ValidationError("atom count must be >= 1", field="N")

    regime = ValidityRegime.MACROSCOPIC if delta > 1.0 / math.sqrt(N) else ValidityRegime.FLUCTUATION_LIMITED
    if gamma_star <= 0:
        return ValidityTimes(math.inf, math.inf, math.inf, regime)
    tau_star = 1.0 / gamma_star
    return ValidityTimes(
        tau_star=tau_star,
        t_lin=tau_star * math.log(1.0 / delta),
        t_max=0.5 * tau_star * math.log(N),
        regime=regime,
    )


def reference_curves(protocol_template: DriveProtocol, eta_values: Sequence[float]) -> pd.DataFrame:
    """Couplings at which mu0, mu_min and mu_max equal one.

    Raw couplings do not depend on eta; the ``*_over_eta`` columns give the
    same lines in normalized ``2 g / eta`` coordinates. Lines that do not
    exist (non-positive effective splitting) are NaN.
    """
    omega_a = protocol_template.omega_a
    lambda0, lam = protocol_template.lambda0, protocol_template.lam

    def critical_g(effective: float) -> float:
        return 0.5 * omega_a * math.sqrt(effective) if effective > 0 else math.nan

    eta = np.asarray(eta_values, dtype=float)
    frame = pd.DataFrame({"eta": eta, "eta_over_omega_a": eta / omega_a})
    for name, effective in (("red", lambda0), ("green", lambda0 - lam), ("black", lambda0 + lam)):
        g = critical_g(effective)
        frame[f"g_{name}"] = g
        with np.errstate(divide="ignore", invalid="ignore"):
            frame[f"two_g_over_eta_{name}"] = np.where(eta > 0, 2.0 * g / eta, np.nan)
    return frame


def _sweep_row(args: Tuple) -> List[Tuple[float, str]]:
    """Worker task: one row of constant eta."""
    omega_a, lambda0, lam, eta_row, g_row, method, threshold, magnus_step = args
    results = []
    for eta, g in zip(eta_row, g_row):
        try:
            protocol = DriveProtocol.sinusoidal(omega_a, lambda0, lam, float(eta), float(g))
            result = floquet_analysis(protocol, method=method, threshold=threshold, magnus_step=magnus_step)
            results.append((result.gamma_star, result.status.value))
        except Exception as exc:  # noqa: BLE001
            logger.warning("Sweep cell failed", eta=float(eta), g=float(g), error=str(exc))
            results.append((math.nan, CellStatus.FAILED.value))
    return results


def stability_sweep(
    grid_spec: GridSpec,
    protocol_template: DriveProtocol,
    workers: int = 1,
    method: Optional[PropagatorMethod] = None,
    threshold: Optional[float] = None,
    magnus_step: Optional[float] = None,
) -> StabilityGrid:
    """Instability rate at every grid point.

    Rows of constant eta are independent tasks merged by index, so the
    result does not depend on the worker count.
    """
    method = method or settings.floquet.sweep_method
    threshold = threshold if threshold is not None else settings.floquet.gamma_threshold
    magnus_step = magnus_step or settings.floquet.magnus_step
    eta, g = grid_spec.physical_points(protocol_template.omega_a)
    if not np.all(eta > 0):
        raise ValidationError("eta must be positive on every grid point", field="sweep.x")

    tasks = [
        (protocol_template.omega_a, protocol_template.lambda0, protocol_template.lam,
         eta[i], g[i], method, threshold, magnus_step)
        for i in range(eta.shape[0])
    ]
    logger.info("Starting stability sweep", shape=grid_spec.shape, workers=workers, method=method.value)

    with timed() as elapsed:
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_sweep_row, tasks))
        else:
            rows = [_sweep_row(task) for task in tasks]
        seconds = elapsed()

    gamma = np.array([[cell[0] for cell in row] for row in rows], dtype=float)
    status = np.array([[cell[1] for cell in row] for row in rows], dtype=object)

    counts = {s.value: int(np.sum(status == s.value)) for s in CellStatus}
    record_sweep(method.value, counts, seconds)
    if counts[CellStatus.MARGINAL.value]:
        logger.warning("Marginal sweep cells near the instability threshold", count=counts[CellStatus.MARGINAL.value])
    logger.info("Stability sweep finished", seconds=round(seconds, 3), **counts)

    return StabilityGrid(
        spec=grid_spec,
        eta=eta,
        g=g,
        gamma_star=gamma,
        status=status,
        metadata={
            "omega_a": protocol_template.omega_a,
            "lambda0": protocol_template.lambda0,
            "lambda": protocol_template.lam,
            "axis_mode": grid_spec.mode.value,
            "x_axis": f"{grid_spec.axis_names[0]}:{grid_spec.x.start}:{grid_spec.x.stop}:{grid_spec.x.num}",
            "y_axis": f"{grid_spec.axis_names[1]}:{grid_spec.y.start}:{grid_spec.y.stop}:{grid_spec.y.num}",
            "method": method.value,
            "threshold": threshold,
        },
    )
