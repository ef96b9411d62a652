"""Numerical laboratory for Fourier decay of fractal measures.

Submodules
----------
measures
    Discrete measures in the unit ball and brute-force c_alpha estimates.
spectral
    Spherical L^2 averages of Fourier transforms and decay-exponent fits.
exponents
    Closed-form exponent bounds and the implications between them.
knapp
    The integer-point Knapp example and its phase argument.
caps
    Caps, normals, rescalings, dual boxes, scale ladders and diagnostics.
evolution
    Schrodinger and wave propagators and maximal-function experiments.
"""

from .measures import DiscreteMeasure, c_alpha_estimate, make_cantor_measure, make_lattice_measure, \
    make_sphere_measure, scale_measure
from .spectral import build_sphere_quadrature, decay_scan, fit_decay_exponent, spherical_average
from .exponents import beta_lower, beta_upper

__version__ = "0.1.0"

__all__ = [
    "DiscreteMeasure", "c_alpha_estimate", "make_cantor_measure", "make_lattice_measure",
    "make_sphere_measure", "scale_measure", "build_sphere_quadrature", "decay_scan",
    "fit_decay_exponent", "spherical_average", "beta_lower", "beta_upper",
]
