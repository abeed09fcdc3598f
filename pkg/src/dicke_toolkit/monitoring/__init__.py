"""Run metrics for the Driven Dicke Toolkit."""
