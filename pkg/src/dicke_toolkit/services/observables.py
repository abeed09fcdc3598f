"""
Photon statistics, energies, work and inner friction.
"""

import math
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy.optimize import brentq, minimize_scalar

from dicke_toolkit.core.exceptions import NoSRWindow, ValidationError
from dicke_toolkit.models.observables import (
    GroundStateEnergy,
    InnerFriction,
    MandelStatistics,
    ObservablesRecord,
    SqueezingResult,
    WorkResult,
)
from dicke_toolkit.models.protocol import DriveProtocol, Phase
from dicke_toolkit.models.state import J, MeanField
from dicke_toolkit.services.fluctuations import build_M
from dicke_toolkit.services.meanfield import sqrt_gamma
from dicke_toolkit.services.model_core import critical_amplitude, mu_summary, mu_value

logger = structlog.get_logger(__name__)

# Photon-number formula regime: N |alpha|^2 must exceed this many fluctuation quanta.
MEAN_FIELD_DOMINANCE = 10.0
TANGENCY_TOLERANCE = 1e-12


def photon_number(mf: MeanField, W: np.ndarray, N: float) -> float:
    return N * abs(mf.alpha) ** 2 + (W[0, 0] + W[2, 2] - 1.0) / 2.0


def atomic_excitation(mf: MeanField, W: np.ndarray, N: float) -> float:
    """Mean number of excited atoms; ``<J_z> = n_b - N/2``."""
    return N * abs(mf.beta) ** 2 + (W[1, 1] + W[3, 3] - 1.0) / 2.0


def photon_variance_and_mandel(mf: MeanField, W: np.ndarray, N: float) -> MandelStatistics:
    """Leading-order photon-number variance and Mandel parameters."""
    a_r, a_i = mf.alpha.real, mf.alpha.imag
    contraction = a_r * a_r * W[0, 0] + a_i * a_i * W[2, 2] + 2.0 * a_r * a_i * W[0, 2]
    sigma2 = 2.0 * N * contraction
    n_a = photon_number(mf, W, N)
    rho = sigma2 / n_a if n_a > 0 else math.nan
    alpha_sq = abs(mf.alpha) ** 2
    rho_inf = 2.0 * contraction / alpha_sq if alpha_sq > 0 else math.nan

    too_small = N * alpha_sq < MEAN_FIELD_DOMINANCE * (W[0, 0] + W[2, 2]) / 2.0
    return MandelStatistics(sigma2_a=sigma2, rho=rho, rho_infinity=rho_inf, mean_field_too_small=bool(too_small))


def lambda_n(mf: MeanField, omega_a: float, omega_b: float, g: float, N: float) -> float:
    """c-number part of the expanded Hamiltonian."""
    root = sqrt_gamma(mf.beta.real, mf.beta.imag)
    a_r, b_r = mf.alpha.real, mf.beta.real
    beta_sq = abs(mf.beta) ** 2
    leading = omega_a * abs(mf.alpha) ** 2 + omega_b * (beta_sq - 0.5) + 4.0 * g * root * a_r * b_r
    return N * leading - g * a_r * b_r * beta_sq / (2.0 * root)


def quadratic_form(mf: MeanField, omega_a: float, omega_b: float, g: float) -> np.ndarray:
    """Symmetric S with ``H2 = Q^T S Q / 2`` up to a constant; ``M = J S``."""
    return -J @ build_M(mf, omega_a, omega_b, g)


def mean_energy(mf: MeanField, W: np.ndarray, protocol: DriveProtocol, t: float, N: float) -> float:
    """``<H>`` for zero-mean Gaussian fluctuations with covariance W around ``mf``."""
    omega_a, omega_b, g = protocol.evaluate(t)
    S = quadratic_form(mf, omega_a, omega_b, g)
    # Normal ordering removes the vacuum contribution tr(S)/4.
    quadratic = 0.5 * float(np.sum(S * W)) - 0.25 * float(np.trace(S))
    return lambda_n(mf, omega_a, omega_b, g, N) + quadratic


def work_closed_form(W_t: np.ndarray, n_a_t: float, protocol: DriveProtocol, t: float, N: float) -> float:
    """Published average-work expression, exact for vanishing mean fields."""
    omega_a, omega_b, g = protocol.evaluate(t)
    _, omega_b0, _ = protocol.evaluate(0.0)
    return (
        omega_a * n_a_t
        + N * omega_b0 / 2.0
        + 2.0 * g * W_t[0, 1]
        + omega_b * (W_t[1, 1] + W_t[3, 3] - (N + 1.0)) / 2.0
    )


def average_work(
    mf_t: MeanField,
    W_t: np.ndarray,
    t: float,
    mf_0: MeanField,
    W_0: np.ndarray,
    protocol: DriveProtocol,
    N: float,
) -> WorkResult:
    """Average work done by the drive between 0 and t.

    With zero mean fields the closed form is used; otherwise the energy
    difference is authoritative and the closed form is reported alongside.
    """
    closed = work_closed_form(W_t, photon_number(mf_t, W_t, N), protocol, t, N)
    if mf_t.is_zero and mf_0.is_zero:
        return WorkResult(work=closed, work_closed_form=closed, mean_field_gated=False)
    difference = mean_energy(mf_t, W_t, protocol, t, N) - mean_energy(mf_0, W_0, protocol, 0.0, N)
    return WorkResult(work=difference, work_closed_form=closed, mean_field_gated=True)


def ground_state_energy_per_atom(omega_a: float, omega_b: float, g: float) -> GroundStateEnergy:
    mu = mu_value(omega_a, omega_b, g)
    if mu >= 1:
        return GroundStateEnergy(e_per_atom=-omega_b / 2.0, phase=Phase.NORMAL, mu=mu)
    return GroundStateEnergy(e_per_atom=-(omega_b / 4.0) * (mu + 1.0 / mu), phase=Phase.SUPER_RADIANT, mu=mu)


def ground_state_energy_oracle(omega_a: float, omega_b: float, g: float) -> float:
    """Numerical minimum of Lambda_N / N over real (alpha, beta).

    Lambda_N is quadratic in alpha, so alpha is set to its stationary value
    and the remaining profile is minimized over beta in [0, 1].
    """

    def energy(beta: float) -> float:
        root = math.sqrt(max(1.0 - beta * beta, 0.0))
        alpha = -2.0 * g * root * beta / omega_a
        return omega_a * alpha * alpha + omega_b * (beta * beta - 0.5) + 4.0 * g * root * alpha * beta

    result = minimize_scalar(energy, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    return min(float(result.fun), energy(0.0))


def inner_friction(
    work: float,
    protocol: DriveProtocol,
    t: float,
    N: float,
) -> InnerFriction:
    """Excess work over the adiabatic ground-state energy change."""
    omega_a_t, omega_b_t, g_t = protocol.evaluate(t)
    omega_a_0, omega_b_0, g_0 = protocol.evaluate(0.0)
    e_t = ground_state_energy_per_atom(omega_a_t, omega_b_t, g_t).e_per_atom
    e_0 = ground_state_energy_per_atom(omega_a_0, omega_b_0, g_0).e_per_atom
    return InnerFriction(
        w_fric=work - N * e_t + N * e_0,
        w_fric_per_atom_limit=friction_limit_per_atom(mu_value(omega_a_t, omega_b_t, g_t), omega_b_t),
    )


def friction_limit_per_atom(mu: float, omega_b: float) -> float:
    """Thermodynamic-limit inner friction per atom."""
    if mu >= 1:
        return 0.0
    return omega_b * (1.0 - 1.0 / mu) ** 2 / 4.0


def sr_entry_times(protocol: DriveProtocol, t_end: Optional[float] = None) -> List[Tuple[float, float]]:
    """Time intervals in ``[0, t_end]`` during which mu(t) < 1.

    ``t_end`` defaults to one drive period. Boundaries come from root
    finding on mu(t) - 1 and are cross-checked against the closed form
    built from the critical amplitude.
    """
    if protocol.is_general:
        raise ValidationError("SR windows are only defined for the sinusoidal drive", field="protocol")
    summary = mu_summary(protocol)
    if summary.mu_min > 1.0 + TANGENCY_TOLERANCE:
        raise NoSRWindow(summary.mu_min)

    if protocol.is_static:
        # Undriven: either always super-radiant or tangent at mu0 = 1.
        end = t_end if t_end is not None else math.inf
        return [(0.0, end)]

    T = protocol.period
    t_end = t_end if t_end is not None else T
    eta = protocol.eta
    if summary.mu_max < 1.0:
        return [(0.0, t_end)]

    # mu(t) is smallest at eta t = 3 pi / 2 + 2 k pi.
    if abs(summary.mu_min - 1.0) <= TANGENCY_TOLERANCE:
        phases = 1.5 * math.pi + 2.0 * math.pi * np.arange(0, int(t_end / T) + 2)
        return [(p / eta, p / eta) for p in phases if p / eta <= t_end]

    mu0 = summary.mu0

    def excess(phase: float) -> float:
        return mu0 * (1.0 + (protocol.lam / protocol.lambda0) * math.sin(phase)) - 1.0

    enter = brentq(excess, 0.5 * math.pi, 1.5 * math.pi, xtol=1e-14)
    leave = brentq(excess, 1.5 * math.pi, 2.5 * math.pi, xtol=1e-14)

    ratio = critical_amplitude(protocol) / protocol.lam
    closed_enter = math.pi - math.asin(ratio)
    if abs(closed_enter - enter) > 1e-8:
        logger.warning("Closed-form SR window disagrees with root finding", closed=closed_enter, root=enter)

    intervals = []
    k = -1
    while True:
        start = (enter + 2.0 * math.pi * k) / eta
        end = (leave + 2.0 * math.pi * k) / eta
        if start > t_end:
            break
        if end > 0:
            intervals.append((max(start, 0.0), min(end, t_end)))
        k += 1
    return intervals


def observables_record(
    t: float,
    mf: MeanField,
    W: np.ndarray,
    mf_0: MeanField,
    W_0: np.ndarray,
    protocol: DriveProtocol,
    N: float,
    squeezing: SqueezingResult,
    valid: bool,
) -> ObservablesRecord:
    """All observables at one joint-trajectory sample."""
    mandel = photon_variance_and_mandel(mf, W, N)
    work = average_work(mf, W, t, mf_0, W_0, protocol, N)
    friction = inner_friction(work.work, protocol, t, N)
    return ObservablesRecord(
        t=t,
        n_a=photon_number(mf, W, N),
        sigma2_a=mandel.sigma2_a,
        rho=mandel.rho,
        rho_inf=mandel.rho_infinity,
        work=work.work,
        w_fric=friction.w_fric,
        w_fric_limit=friction.w_fric_per_atom_limit,
        r_opt=squeezing.r_opt,
        fidelity=squeezing.fidelity,
        valid_flag=valid,
        n_b=atomic_excitation(mf, W, N),
        energy=mean_energy(mf, W, protocol, t, N),
        work_closed_form=work.work_closed_form,
    )
