"""Fourier quasicrystals from genus-zero strict Lee-Yang curves.

Modules:
    varcomb     sign variations, Plücker coordinates, kernel of L
    curve       separating functions, curves, phase lift
    pointset    enumeration of the point set and Delone statistics
    spectrum    spectrum sites and the polytope governing their growth
    fourier     Fourier coefficients and the summation formula
    diffraction exponential sums, number variance, autocorrelation
    cli         command line interface
"""
from .curve import (LeeYangCurve, PhaseLift, ProductCurve, RealRationalFunction, build_curve,
                    mobius_deg1, phase_lift, product_curve, validate_separating)
from .varcomb import PositiveMatrix, plucker, var, varbar

__all__ = ["LeeYangCurve", "PhaseLift", "ProductCurve", "RealRationalFunction", "build_curve",
           "mobius_deg1", "phase_lift", "product_curve", "validate_separating", "PositiveMatrix",
           "plucker", "var", "varbar"]
__version__ = "0.1.0"
