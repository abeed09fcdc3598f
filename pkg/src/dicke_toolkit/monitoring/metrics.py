"""
Run metrics for the Driven Dicke Toolkit.

Metrics live in a private registry and are written to a textfile-collector
file next to the run outputs; no HTTP exporter is started.
"""

import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Union

import structlog
from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

logger = structlog.get_logger(__name__)

REGISTRY = CollectorRegistry()

INTEGRATION_COUNT = Counter(
    'dicke_toolkit_integrations_total',
    'Total number of trajectory integrations',
    ['method', 'status'],
    registry=REGISTRY
)

INTEGRATION_STEPS = Counter(
    'dicke_toolkit_integration_steps_total',
    'Integrator steps by outcome',
    ['method', 'outcome'],
    registry=REGISTRY
)

INTEGRATION_DURATION = Histogram(
    'dicke_toolkit_integration_duration_seconds',
    'Wall time per integration in seconds',
    ['method'],
    registry=REGISTRY
)

SWEEP_CELLS = Counter(
    'dicke_toolkit_sweep_cells_total',
    'Stability sweep cells by status',
    ['status'],
    registry=REGISTRY
)

SWEEP_DURATION = Histogram(
    'dicke_toolkit_sweep_duration_seconds',
    'Wall time per stability sweep in seconds',
    ['method'],
    buckets=(1, 5, 15, 30, 60, 120, 300, 600, 1800),
    registry=REGISTRY
)


def record_integration(method: str, status: str, accepted: int, rejected: int, seconds: float) -> None:
    """Record one finished integration."""
    INTEGRATION_COUNT.labels(method=method, status=status).inc()
    INTEGRATION_STEPS.labels(method=method, outcome="accepted").inc(accepted)
    INTEGRATION_STEPS.labels(method=method, outcome="rejected").inc(rejected)
    INTEGRATION_DURATION.labels(method=method).observe(seconds)


def record_sweep(method: str, status_counts: Dict[str, int], seconds: float) -> None:
    """Record a finished stability sweep."""
    for status, count in status_counts.items():
        SWEEP_CELLS.labels(status=status).inc(count)
    SWEEP_DURATION.labels(method=method).observe(seconds)


@contextmanager
def timed():
    """Yield a callable returning seconds elapsed since entry."""
    start = time.perf_counter()
    yield lambda: time.perf_counter() - start


def write_metrics(path: Union[str, Path]) -> Path:
    """Write the registry in Prometheus text format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
    logger.debug("Metrics written", path=str(path))
    return path
