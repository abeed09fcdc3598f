"""
Logging configuration for the Driven Dicke Toolkit.

Logs go to stderr as JSON (console rendering when DEBUG is set), so CSV or
JSON written to stdout stays machine-readable.
"""

import logging
import sys
from contextlib import contextmanager
from typing import Any, Iterator, MutableMapping, Optional

import numpy as np
import structlog
from structlog.stdlib import LoggerFactory

from dicke_toolkit.core.config import LogLevel, settings
from dicke_toolkit.core.exceptions import ConfigurationError


def _numpy_to_builtin(_, __, event_dict: MutableMapping[str, Any]) -> MutableMapping[str, Any]:
    """Make numpy scalars and small arrays JSON-serializable."""
    for key, value in event_dict.items():
        if isinstance(value, np.generic):
            event_dict[key] = value.item()
        elif isinstance(value, np.ndarray):
            event_dict[key] = value.tolist() if value.size <= 16 else f"<array shape={value.shape}>"
        elif isinstance(value, tuple) and any(isinstance(v, np.generic) for v in value):
            event_dict[key] = [v.item() if isinstance(v, np.generic) else v for v in value]
    return event_dict


def setup_logging(level: Optional[str] = None) -> None:
    """Setup structured logging with structlog."""
    try:
        log_level = LogLevel(level or settings.log_level.value)
    except ValueError as exc:
        choices = ", ".join(lvl.value for lvl in LogLevel)
        raise ConfigurationError(f"Unknown log level {level!r}; expected one of {choices}") from exc

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, log_level.value),
        force=True,
    )
    # Integrator RuntimeWarnings (overflow near |beta| = 1) become log records.
    logging.captureWarnings(True)

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            _numpy_to_builtin,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer() if not settings.debug else structlog.dev.ConsoleRenderer(),
        ],
        context_class=dict,
        logger_factory=LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


@contextmanager
def run_context(**values: Any) -> Iterator[None]:
    """Attach ``values`` (run name, command) to every log event inside the block."""
    with structlog.contextvars.bound_contextvars(**values):
        yield
