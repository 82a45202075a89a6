"""Interval exchange transformations: Rauzy-Veech renormalization, substitutions,
twisted cocycles and correlation-decay experiments."""
from .errors import ConfigError, IETLabError, NumericError
from .iet import IET, make_iet, rotation_iet
from .permutation import Permutation

__version__ = "0.1.0"

__all__ = ["IET", "Permutation", "make_iet", "rotation_iet", "IETLabError", "ConfigError", "NumericError"]
