"""
Optimal two-mode squeezing of the fluctuation covariance.

The target family is the two-mode squeezed vacuum displaced to the
instantaneous mean fields, so first moments cancel and the fidelity is the
pure-Gaussian overlap ``F(r) = 1 / sqrt(det(W + W_sq(r)))``.

``W_sq(r)`` is diagonal in the rotated quadratures
``u_pm = (q_c pm q_d)/sqrt 2``, ``v_pm = (p_c pm p_d)/sqrt 2`` with entries
``exp(2 r s_i) / 2``, ``s = (1, -1, -1, 1)``. Factoring it out gives
``F(r) = 4 / sqrt(det(I + X(r)))``, ``X_ij = 2 W'_ij exp(-(s_i + s_j) r)``,
which stays well conditioned for large r.
"""

import math
from typing import Optional

import numpy as np
import structlog
from scipy.optimize import minimize_scalar

from dicke_toolkit.models.observables import SqueezingResult
from dicke_toolkit.models.state import VACUUM_DET

logger = structlog.get_logger(__name__)

R_MAX = 25.0
SCAN_POINTS = 501
PURITY_TOLERANCE = 1e-4
# Scan values closer than this are treated as equal when counting minima.
UNIMODAL_TOLERANCE = 1e-12

_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])
_ROTATION = np.array([
    [1.0, 1.0, 0.0, 0.0],
    [1.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 1.0],
    [0.0, 0.0, 1.0, -1.0],
]) / math.sqrt(2.0)


def two_mode_squeeze(r: float) -> np.ndarray:
    """Symplectic map of ``exp(r (c^dag d^dag - c d))`` on (q_c, q_d, p_c, p_d)."""
    ch, sh = math.cosh(r), math.sinh(r)
    return np.array([
        [ch, sh, 0.0, 0.0],
        [sh, ch, 0.0, 0.0],
        [0.0, 0.0, ch, -sh],
        [0.0, 0.0, -sh, ch],
    ])


def squeezed_covariance(r: float) -> np.ndarray:
    """``S_r (I/2) S_r^T``."""
    S = two_mode_squeeze(r)
    return 0.5 * S @ S.T


def _log_det_objective(W_rot: np.ndarray, r: np.ndarray) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    weights = np.exp(-np.add.outer(_SIGNS, _SIGNS)[None] * r[:, None, None])
    X = 2.0 * W_rot[None] * weights
    _, logdet = np.linalg.slogdet(np.eye(4)[None] + X)
    return logdet


def squeezing_fidelity(W: np.ndarray, r: float) -> float:
    W_rot = _ROTATION @ np.asarray(W, dtype=float) @ _ROTATION.T
    return float(min(1.0, 4.0 * math.exp(-0.5 * _log_det_objective(W_rot, r)[0])))


def _count_local_minima(values: np.ndarray) -> int:
    diffs = np.diff(values)
    diffs[np.abs(diffs) <= UNIMODAL_TOLERANCE * np.maximum(1.0, np.abs(values[1:]))] = 0.0
    signs = np.sign(diffs[diffs != 0])
    interior = int(np.sum((signs[:-1] < 0) & (signs[1:] > 0)))
    starts_rising = len(signs) > 0 and signs[0] > 0
    return interior + int(starts_rising)


def optimal_squeezing(W: np.ndarray, r_max: float = R_MAX, scan_points: Optional[int] = None) -> SqueezingResult:
    """Squeezing degree r >= 0 maximizing the fidelity with W.

    A coarse scan over ``[0, r_max]`` brackets the optimum, bounded Brent
    refines it. A scan with several minima, or an optimum at ``r_max``,
    sets ``bracket_failure`` and returns the best value found.
    """
    W = np.asarray(W, dtype=float)
    purity_warning = abs(np.linalg.det(W) / VACUUM_DET - 1.0) > PURITY_TOLERANCE
    if purity_warning:
        logger.warning("Covariance is not pure; fidelity is best effort", det=float(np.linalg.det(W)))

    W_rot = _ROTATION @ W @ _ROTATION.T
    grid = np.linspace(0.0, r_max, scan_points or SCAN_POINTS)
    values = _log_det_objective(W_rot, grid)
    best = int(np.argmin(values))
    bracket_failure = _count_local_minima(values) > 1 or best == len(grid) - 1

    low = grid[max(best - 1, 0)]
    high = grid[min(best + 1, len(grid) - 1)]
    result = minimize_scalar(
        lambda r: float(_log_det_objective(W_rot, r)[0]),
        bounds=(low, high),
        method="bounded",
        options={"xatol": 1e-10},
    )
    r_opt, value = float(result.x), float(result.fun)
    if values[best] < value:
        r_opt, value = float(grid[best]), float(values[best])

    if bracket_failure:
        logger.warning("Fidelity is not unimodal in r or the optimum lies at the scan edge", r_opt=r_opt, r_max=r_max)

    fidelity = min(1.0, 4.0 * math.exp(-0.5 * value))
    return SqueezingResult(
        r_opt=max(r_opt, 0.0),
        fidelity=fidelity,
        bracket_failure=bracket_failure,
        purity_warning=bool(purity_warning),
    )
