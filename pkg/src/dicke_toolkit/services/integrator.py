"""
Time-stepping engine shared by the mean-field and joint integrations.

Adaptive runs drive scipy's explicit Runge-Kutta steppers one step at a
time so that step statistics, the boundary guard and output sampling stay
under our control. The fixed-step classical RK4 scheme is deterministic
bit for bit and is meant for cross-checks between machines.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import structlog
from scipy.integrate import DOP853, RK45

from dicke_toolkit.core.config import IntegratorMethod
from dicke_toolkit.core.exceptions import GammaNonPositive, StepSizeUnderflow
from dicke_toolkit.models.state import IntegrationStatus, IntegratorConfig, StepDiagnostics
from dicke_toolkit.monitoring.metrics import record_integration, timed

logger = structlog.get_logger(__name__)

RightHandSide = Callable[[float, np.ndarray], np.ndarray]
Guard = Callable[[np.ndarray], bool]

SOLVERS = {
    IntegratorMethod.RK45: RK45,
    IntegratorMethod.DOP853: DOP853,
}

# Relative slack when comparing sample times against step ends.
_TIME_SLACK = 1e-12
# Step reduction after a trial stage left the |beta| < 1 domain.
STEP_SHRINK = 0.25


@dataclass(frozen=True)
class IntegrationOutput:
    t: np.ndarray
    y: np.ndarray
    diagnostics: StepDiagnostics
    status: IntegrationStatus


def sample_times(t0: float, t_end: float, interval: Optional[float]) -> Optional[np.ndarray]:
    """Evenly spaced output times from ``t0``, always ending at ``t_end``."""
    if interval is None:
        return None
    n = int(math.floor((t_end - t0) / interval + 1e-9))
    times = t0 + interval * np.arange(n + 1)
    if t_end - times[-1] > _TIME_SLACK * max(1.0, abs(t_end)):
        times = np.append(times, t_end)
    else:
        times[-1] = min(times[-1], t_end)
    return times


def integrate(
    rhs: RightHandSide,
    y0: np.ndarray,
    t0: float,
    t_end: float,
    config: IntegratorConfig,
    guard: Optional[Guard] = None,
) -> IntegrationOutput:
    """Integrate ``dy/dt = rhs(t, y)`` from ``t0`` to ``t_end``.

    Integration stops early with ``BETA_BOUNDARY`` status when ``guard``
    reports a violation or the right-hand side raises
    :class:`GammaNonPositive`; samples up to the last valid state are kept.
    """
    if not t_end > t0:
        raise ValueError(f"t_end ({t_end}) must exceed t0 ({t0})")

    method = "RK4" if config.is_fixed_step else config.method.value
    with timed() as elapsed:
        if config.is_fixed_step:
            output = _integrate_fixed_step(rhs, np.asarray(y0, dtype=float), t0, t_end, config, guard)
        else:
            output = _integrate_adaptive(rhs, np.asarray(y0, dtype=float), t0, t_end, config, guard)
        seconds = elapsed()

    record_integration(
        method,
        output.status.value,
        output.diagnostics.accepted_steps,
        output.diagnostics.rejected_steps,
        seconds,
    )
    logger.debug(
        "Integration finished",
        method=method,
        status=output.status.value,
        t_reached=float(output.t[-1]),
        **output.diagnostics.to_dict(),
    )
    return output


def _integrate_adaptive(
    rhs: RightHandSide,
    y0: np.ndarray,
    t0: float,
    t_end: float,
    config: IntegratorConfig,
    guard: Optional[Guard],
) -> IntegrationOutput:
    solver = SOLVERS[config.method](rhs, t0, y0, t_end, rtol=config.rtol, atol=config.atol, max_step=config.max_step)
    estimate_error = getattr(solver, "_estimate_error_norm", None)
    diagnostics = StepDiagnostics(n_evaluations=solver.nfev)
    times = sample_times(t0, t_end, config.sample_interval)

    out_t = [t0]
    out_y = [y0.copy()]
    next_sample = 1
    status = IntegrationStatus.COMPLETED

    while solver.status == "running":
        y_old = solver.y.copy()
        nfev_before = solver.nfev
        try:
            message = solver.step()
        except GammaNonPositive:
            if not _shrink_step(solver):
                status = IntegrationStatus.BETA_BOUNDARY
                break
            diagnostics.rejected_steps += 1
            continue

        if solver.status == "failed":
            raise StepSizeUnderflow(float(solver.t), message or "")

        attempts = max(1, (solver.nfev - nfev_before) // solver.n_stages)
        diagnostics.accepted_steps += 1
        diagnostics.rejected_steps += attempts - 1
        if estimate_error is not None and solver.h_previous is not None:
            scale = config.atol + np.maximum(np.abs(y_old), np.abs(solver.y)) * config.rtol
            error = float(estimate_error(solver.K, solver.h_previous, scale))
            diagnostics.max_error_norm = max(diagnostics.max_error_norm, error)

        if guard is not None and guard(solver.y):
            status = IntegrationStatus.BETA_BOUNDARY
            break

        if times is None:
            out_t.append(float(solver.t))
            out_y.append(solver.y.copy())
            continue

        dense = None
        slack = _TIME_SLACK * max(1.0, abs(solver.t))
        while next_sample < len(times) and times[next_sample] <= solver.t + slack:
            t_sample = float(times[next_sample])
            if abs(t_sample - solver.t) <= slack:
                out_y.append(solver.y.copy())
            else:
                if dense is None:
                    dense = solver.dense_output()
                out_y.append(np.asarray(dense(t_sample), dtype=float))
            out_t.append(t_sample)
            next_sample += 1

    diagnostics.n_evaluations = solver.nfev
    if status is IntegrationStatus.BETA_BOUNDARY:
        logger.warning("Integration stopped at the |beta| = 1 boundary", t=float(solver.t))
    return IntegrationOutput(np.asarray(out_t), np.vstack(out_y), diagnostics, status)


def _shrink_step(solver) -> bool:
    """Retry from the last accepted state with a smaller step; False once the step cannot shrink."""
    spacing = abs(np.nextafter(solver.t, solver.direction * np.inf) - solver.t)
    h_abs = solver.h_abs * STEP_SHRINK
    if h_abs < 100.0 * spacing:
        return False
    solver.h_abs = h_abs
    return True


def _rk4_step(rhs: RightHandSide, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate_fixed_step(
    rhs: RightHandSide,
    y0: np.ndarray,
    t0: float,
    t_end: float,
    config: IntegratorConfig,
    guard: Optional[Guard],
) -> IntegrationOutput:
    span = t_end - t0
    dt = config.fixed_step
    if dt is None:
        dt = config.sample_interval / 10.0 if config.sample_interval else span / 10000.0
    n_steps = max(1, int(math.ceil(span / dt - 1e-9)))
    every = max(1, int(round(config.sample_interval / dt))) if config.sample_interval else 1

    diagnostics = StepDiagnostics()
    status = IntegrationStatus.COMPLETED
    out_t = [t0]
    out_y = [y0.copy()]
    y = y0.copy()
    t = t0
    for k in range(1, n_steps + 1):
        t_next = t_end if k == n_steps else t0 + k * dt
        try:
            y = _rk4_step(rhs, t, y, t_next - t)
        except GammaNonPositive:
            status = IntegrationStatus.BETA_BOUNDARY
            break
        t = t_next
        diagnostics.accepted_steps += 1
        diagnostics.n_evaluations += 4
        if guard is not None and guard(y):
            status = IntegrationStatus.BETA_BOUNDARY
            break
        if k % every == 0 or k == n_steps:
            out_t.append(t)
            out_y.append(y.copy())

    if status is IntegrationStatus.BETA_BOUNDARY:
        logger.warning("Integration stopped at the |beta| = 1 boundary", t=t)
    return IntegrationOutput(np.asarray(out_t), np.vstack(out_y), diagnostics, status)
