"""Discrete time-crystal toolkit for driven, disordered dipolar spin ensembles."""
__version__ = "0.1.0"

from dtckit.kernels import BACKEND  # noqa: E402,F401
