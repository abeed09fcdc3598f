"""Utilities package for the Driven Dicke Toolkit."""
