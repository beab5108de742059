"""Exact Hesselink and Harder-Narasimhan stratifications for torus weights,
quiver representations and sheaves on the projective line."""
from .core import BudgetExceeded, CertificateError, ComparableNormValue, HesselinkError

__version__ = "0.1.0"

__all__ = ["BudgetExceeded", "CertificateError", "ComparableNormValue", "HesselinkError", "__version__"]
