"""Core functionality for the Driven Dicke Toolkit."""

from .config import settings, Settings, IntegratorMethod, PropagatorMethod

__all__ = ["settings", "Settings", "IntegratorMethod", "PropagatorMethod"]
