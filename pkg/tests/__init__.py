"""Tests package for the Driven Dicke Toolkit."""
