"""Fast Fourier spectral solver for the 4-wave kinetic equation."""

from .grid import SpectralCoeffs, SpectralField, SpectralGrid, build_grid, to_coefficients, to_field
from .kernel import KernelPlan, TermId, apply_K_direct, apply_K_fast, collision, make_plan

__all__ = [
    "SpectralCoeffs",
    "SpectralField",
    "SpectralGrid",
    "build_grid",
    "to_coefficients",
    "to_field",
    "KernelPlan",
    "TermId",
    "apply_K_direct",
    "apply_K_fast",
    "collision",
    "make_plan",
]
