"""Volume of violation of Bell inequalities for two-qubit states."""

__version__ = "0.1.0"
