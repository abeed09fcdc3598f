"""Services package for the Driven Dicke Toolkit."""
