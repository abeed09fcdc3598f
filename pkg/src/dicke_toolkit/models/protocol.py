"""
Drive protocols and the derived control-parameter types.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np

from dicke_toolkit.core.exceptions import ValidationError

ArrayLike = Union[float, np.ndarray]
TimeFunction = Callable[[float], float]


class PointKind(str, Enum):
    """Stationary points of the mean-field flow."""
    NORMAL = "normal"
    SR_PLUS = "sr+"
    SR_MINUS = "sr-"


class Phase(str, Enum):
    """Equilibrium phase at fixed parameters."""
    NORMAL = "normal"
    SUPER_RADIANT = "super_radiant"


class DriveRegime(str, Enum):
    """Qualitative regime of a sinusoidal drive in the slow-drive limit."""
    ALWAYS_NORMAL = "always_normal"
    NORMAL_ORBIT = "normal_orbit"
    SWITCHING = "switching"
    ALWAYS_SUPER_RADIANT = "always_super_radiant"


@dataclass(frozen=True)
class DriveProtocol:
    """Time-dependent model parameters.

    The built-in protocol keeps omega_a and g constant and drives the atomic
    splitting as ``omega_b(t) = omega_a * (lambda0 + lam * sin(eta * t))``.
    Supplying any of the ``*_fn`` callables switches the corresponding
    parameter to general mode.
    """

    omega_a: float
    lambda0: float
    lam: float = 0.0
    eta: float = 0.0
    g: float = 0.0
    omega_a_fn: Optional[TimeFunction] = None
    omega_b_fn: Optional[TimeFunction] = None
    g_fn: Optional[TimeFunction] = None

    def __post_init__(self):
        if not (self.omega_a > 0 and math.isfinite(self.omega_a)):
            raise ValidationError("must be a positive finite frequency", field="omega_a")
        if not math.isfinite(self.lambda0):
            raise ValidationError("must be finite", field="lambda0")
        if self.lam < 0 or not math.isfinite(self.lam):
            raise ValidationError("must be >= 0", field="lambda")
        if self.eta < 0 or not math.isfinite(self.eta):
            raise ValidationError("must be >= 0", field="eta")
        if self.g < 0 or not math.isfinite(self.g):
            raise ValidationError("must be >= 0", field="g")

    @classmethod
    def sinusoidal(cls, omega_a: float, lambda0: float, lam: float, eta: float, g: float) -> "DriveProtocol":
        return cls(omega_a=omega_a, lambda0=lambda0, lam=lam, eta=eta, g=g)

    @classmethod
    def static(cls, omega_a: float, omega_b: float, g: float) -> "DriveProtocol":
        """Undriven model with fixed frequencies."""
        return cls(omega_a=omega_a, lambda0=omega_b / omega_a, lam=0.0, eta=0.0, g=g)

    @classmethod
    def general(
        cls,
        omega_a: TimeFunction,
        omega_b: TimeFunction,
        g: TimeFunction,
        eta: float = 0.0,
    ) -> "DriveProtocol":
        """Arbitrary user-supplied parameter functions.

        ``eta`` is only used to define a period for Floquet analysis and must
        match the true periodicity of the callables when given.
        """
        a0 = float(omega_a(0.0))
        return cls(
            omega_a=a0 if a0 > 0 else 1.0,
            lambda0=float(omega_b(0.0)) / (a0 if a0 > 0 else 1.0),
            eta=eta,
            g=max(float(g(0.0)), 0.0),
            omega_a_fn=omega_a,
            omega_b_fn=omega_b,
            g_fn=g,
        )

    @property
    def is_general(self) -> bool:
        return any(fn is not None for fn in (self.omega_a_fn, self.omega_b_fn, self.g_fn))

    @property
    def is_static(self) -> bool:
        return not self.is_general and (self.lam == 0.0 or self.eta == 0.0)

    @property
    def is_periodic(self) -> bool:
        return self.eta > 0

    @property
    def period(self) -> float:
        """Drive period ``2 pi / eta``; infinite for an undriven protocol."""
        return 2.0 * math.pi / self.eta if self.eta > 0 else math.inf

    @property
    def omega_b0(self) -> float:
        return self.lambda0 * self.omega_a

    def with_point(self, eta: float, g: float) -> "DriveProtocol":
        """Copy of a sinusoidal protocol at another (eta, g) grid point."""
        return DriveProtocol(omega_a=self.omega_a, lambda0=self.lambda0, lam=self.lam, eta=eta, g=g)

    def evaluate(self, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
        """Instantaneous ``(omega_a, omega_b, g)``; accepts scalars or arrays."""
        scalar = np.ndim(t) == 0
        t_arr = np.asarray(t, dtype=float)

        def _call(fn: Optional[TimeFunction], constant: ArrayLike) -> ArrayLike:
            if fn is None:
                return constant
            if scalar:
                return float(fn(float(t_arr)))
            return np.vectorize(fn, otypes=[float])(t_arr)

        omega_b_builtin = self.omega_a * (self.lambda0 + self.lam * np.sin(self.eta * t_arr))
        if scalar:
            omega_b_builtin = float(omega_b_builtin)
            constant_a, constant_g = self.omega_a, self.g
        else:
            constant_a = np.full_like(t_arr, self.omega_a)
            constant_g = np.full_like(t_arr, self.g)

        return (
            _call(self.omega_a_fn, constant_a),
            _call(self.omega_b_fn, omega_b_builtin),
            _call(self.g_fn, constant_g),
        )


@dataclass(frozen=True)
class MuSummary:
    """Range of the control parameter over one drive cycle."""
    mu0: float
    mu_min: float
    mu_max: float


@dataclass(frozen=True)
class StationaryPoint:
    """A fixed point of the mean-field equations."""
    alpha: complex
    beta: complex
    kind: PointKind
