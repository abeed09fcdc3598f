"""Models package for the Driven Dicke Toolkit."""
