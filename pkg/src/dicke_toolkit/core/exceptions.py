"""
Custom exceptions for the Driven Dicke Toolkit.

Every exception carries an ``exit_code`` that the CLI returns unchanged:
1 for configuration problems, 2 for integration failures, 3 for sweeps in
which some cells failed.
"""

from typing import Any, Dict, Optional


class DickeToolkitException(Exception):
    """Base exception for the Driven Dicke Toolkit."""

    def __init__(
        self,
        message: str,
        error_code: str = "UNKNOWN_ERROR",
        exit_code: int = 2,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.error_code = error_code
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationError(DickeToolkitException):
    """Configuration related errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            error_code="CONFIGURATION_ERROR",
            exit_code=1,
            details=details
        )


class ValidationError(DickeToolkitException):
    """Run-config validation errors naming the offending field."""

    def __init__(self, message: str, field: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        self.field = field
        super().__init__(
            message=f"{field}: {message}" if field else message,
            error_code="VALIDATION_ERROR",
            exit_code=1,
            details={**(details or {}), "field": field} if field else details
        )


class ZeroCoupling(DickeToolkitException):
    """The control parameter mu is undefined because g(t) = 0."""

    def __init__(self, t: float):
        super().__init__(
            message=f"Coupling vanishes at t={t!r}; mu is undefined",
            error_code="ZERO_COUPLING",
            exit_code=2,
            details={"t": t}
        )


class GammaNonPositive(DickeToolkitException):
    """Gamma = 1 - |beta|^2 left the domain of the Holstein-Primakoff expansion."""

    def __init__(self, beta_abs: float, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"|beta| = {beta_abs:.12g} is at or beyond the unit-disk boundary",
            error_code="GAMMA_NON_POSITIVE",
            exit_code=2,
            details={**(details or {}), "beta_abs": beta_abs}
        )


class StepSizeUnderflow(DickeToolkitException):
    """The adaptive step-size controller stalled."""

    def __init__(self, t: float, message: str = ""):
        super().__init__(
            message=f"Step size underflow at t={t!r}: {message}".rstrip(": "),
            error_code="STEP_SIZE_UNDERFLOW",
            exit_code=2,
            details={"t": t}
        )


class IntegrationError(DickeToolkitException):
    """A trajectory could not be integrated to its end time."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            error_code="INTEGRATION_ERROR",
            exit_code=2,
            details=details
        )


class NoSRWindow(DickeToolkitException):
    """The drive never brings mu below one."""

    def __init__(self, mu_min: float):
        super().__init__(
            message=f"mu_min = {mu_min:.12g} >= 1: the drive never enters the super-radiant region",
            error_code="NO_SR_WINDOW",
            exit_code=2,
            details={"mu_min": mu_min}
        )


class PartialSweepError(DickeToolkitException):
    """Some cells of a stability sweep failed."""

    def __init__(self, failed: int, total: int):
        super().__init__(
            message=f"{failed} of {total} sweep cells failed",
            error_code="PARTIAL_SWEEP",
            exit_code=3,
            details={"failed": failed, "total": total}
        )
