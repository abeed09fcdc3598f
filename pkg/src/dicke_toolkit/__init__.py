"""
Driven Dicke Toolkit - mean-field, Gaussian-fluctuation and Floquet
simulation of the periodically driven Dicke model in the thermodynamic limit.
"""

__version__ = "0.1.0"
__author__ = "Driven Dicke Toolkit Team"
__description__ = "Mean-field and Gaussian fluctuation dynamics, Floquet stability and quantum-thermodynamic observables of the driven Dicke model"

# Version of the run-config / run-summary JSON schema.
SCHEMA_VERSION = "1.0"
