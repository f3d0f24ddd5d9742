"""Exact checks for truncated Reed-Muller generator matrices and polynomial bias over F_p."""

__version__ = "0.1.0"
