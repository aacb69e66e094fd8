"""Numerical tools for convolution Ritt operators on l1(Z).

Modules
-------
measure       signed measures on Z, convolution, truncation, sequences
symbols       Fourier symbols and their derivatives
fractional    fractional difference coefficients and trajectories
kernels       closed-form convolution powers on multiscale site grids
functionals   square, maximal, variation, oscillation and block functionals
certificates  Fourier-side certificate quantities and symbol conditions
experiments   config-driven probes and report writers
estimators    scikit-learn style wrappers around the functionals
"""

__version__ = "0.1.0"

from .measure import SignedMeasure, SpatialSequence, convolution_power, convolve, dirac, lazy_walk
from .fractional import difference_measure, frac_coeff, nu_alpha_measure, trajectory
from .registry import resolve_measure, resolve_symbol

__all__ = [
    "__version__",
    "SignedMeasure",
    "SpatialSequence",
    "convolution_power",
    "convolve",
    "dirac",
    "lazy_walk",
    "difference_measure",
    "frac_coeff",
    "nu_alpha_measure",
    "trajectory",
    "resolve_measure",
    "resolve_symbol",
]
