"""Bandlimited interpolation of bounded samples at zeros of sine-type functions."""

from . import analysis, examples, experiments, grid, interp, specfun

__version__ = "0.1.0"

__all__ = ["analysis", "examples", "experiments", "grid", "interp", "specfun", "__version__"]
