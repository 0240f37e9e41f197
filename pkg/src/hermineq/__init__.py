"""Executable matrix inequalities for compressions, contractions and expansive operators."""

from hermineq.errors import LabError
from hermineq.numerics import Tolerance, eig_hermitian, is_psd

__version__ = "0.1.0"

__all__ = ["LabError", "Tolerance", "eig_hermitian", "is_psd", "__version__"]
