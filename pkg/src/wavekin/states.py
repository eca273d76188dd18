"""Stationary states and initial conditions sampled on the collocation grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import SpectralField, SpectralGrid


class StateError(ValueError):
    pass


@dataclass(frozen=True)
class RJParams:
    mu: float
    nu: tuple[float, ...]
    xi: float


@dataclass(frozen=True)
class BiMaxwellianParams:
    rho1: float
    rho2: float
    T1: float
    T2: float


# Example 3 of the 2D experiments: unit mass, energy 2
EXAMPLE3 = BiMaxwellianParams(rho1=6 / 5, rho2=4 / 5, T1=2 / 3, T2=3 / 2)


def rayleigh_jeans(grid: SpectralGrid, params: RJParams) -> SpectralField:
    """``1 / (mu + nu.k + xi |k|^2)``; the denominator must be positive on every node."""
    nu = np.asarray(params.nu, dtype=float)
    if nu.shape != (grid.d,):
        raise StateError(f"nu must have {grid.d} components, got {nu.shape}")
    K = grid.mesh()
    denom = params.mu + sum(n * k for n, k in zip(nu, K)) + params.xi * grid.k2
    if np.any(denom <= 0):
        idx = np.unravel_index(np.argmin(denom), denom.shape)
        node = tuple(float(k[idx]) for k in K)
        raise StateError(f"Rayleigh-Jeans denominator is {denom[idx]:.6g} <= 0 at node {node}")
    return SpectralField(grid, 1.0 / denom)


def _maxwellian(grid: SpectralGrid, rho: float, T: float, center=None) -> np.ndarray:
    if center is None:
        r2 = grid.k2
    else:
        r2 = sum((k - c) ** 2 for k, c in zip(grid.mesh(), center))
    return rho / (2 * np.pi * T) ** (grid.d / 2) * np.exp(-r2 / (2 * T))


def bi_maxwellian(grid: SpectralGrid, params: BiMaxwellianParams = EXAMPLE3) -> SpectralField:
    """Two Gaussians joined along ``k_1 = 0``; nodes on the plane get the average."""
    p = params
    if min(p.rho1, p.rho2, p.T1, p.T2) <= 0:
        raise StateError(f"bi-Maxwellian parameters must be positive: {p}")
    k1 = grid.mesh()[0]
    right = _maxwellian(grid, p.rho1, p.T1)
    left = _maxwellian(grid, p.rho2, p.T2)
    f = np.where(k1 > 0, right, left)
    on_plane = k1 == 0
    f[on_plane] = 0.5 * (right[on_plane] + left[on_plane])
    return SpectralField(grid, f)


def raised_cosine(x: np.ndarray, u: float) -> np.ndarray:
    """Smoothed delta ``(1 + cos(pi x / u)) / (2u)`` on ``|x| <= u``."""
    return np.where(np.abs(x) <= u, (1 + np.cos(np.pi * x / u)) / (2 * u), 0.0)


def delta_ring(grid: SpectralGrid, radii: Sequence[tuple[float, float]] = ((0.0, 1 / 3), (0.2, 1 / 3)), u: float | None = None) -> SpectralField:
    """Sum of smoothed deltas in ``|k|`` centred on each ``(radius, coefficient)``.

    The default width is ``0.5 * sqrt(dk)``; the default rings are Example 2.
    """
    if u is None:
        u = 0.5 * np.sqrt(grid.dk)
    if not u > 0:
        raise StateError(f"delta width u must be positive, got {u}")
    k = np.sqrt(grid.k2)
    f = np.zeros(grid.shape)
    for radius, coef in radii:
        f += coef * raised_cosine(k - radius, u)
    return SpectralField(grid, f)


def kz_state(grid: SpectralGrid, exponent: float = 7 / 6, eps: float = 1.0) -> SpectralField:
    """Regularised power law ``(|k|^2/2 + eps)^(-exponent)``."""
    if not eps > 0:
        raise StateError(f"eps must be positive, got {eps}")
    return SpectralField(grid, (0.5 * grid.k2 + eps) ** (-exponent))


def gaussian(grid: SpectralGrid, center=None, T: float = 1.0, rho: float = 1.0) -> SpectralField:
    if T <= 0 or rho <= 0:
        raise StateError(f"T and rho must be positive, got T={T}, rho={rho}")
    if center is not None and len(center) != grid.d:
        raise StateError(f"center must have {grid.d} components")
    return SpectralField(grid, _maxwellian(grid, rho, T, center))
