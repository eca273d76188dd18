"""Truncated periodic domain, collocation grid and the mode-space transform pair.

Coefficient arrays are stored in *centered* order: array index ``i`` along an
axis holds mode ``j = i - N/2``, so index ``0`` is mode ``-N/2`` and index
``N/2`` is the zero mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft

# lower bound on L/S that keeps the periodic image of the collision output off the support
ALIAS_FACTOR = (3.0 + math.sqrt(2.0)) / 2.0


class GridError(ValueError):
    """Base class for grid validation failures."""


class OddResolutionError(GridError):
    pass


class NonPositiveSupportError(GridError):
    pass


class BoxTooSmallError(GridError):
    pass


class ShapeMismatchError(GridError):
    pass


class NonFiniteError(ArithmeticError):
    """A field or coefficient array contains NaN or inf."""


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform collocation grid on ``[-L, L)^d`` with ``N`` modes per axis.

    ``S`` is the support radius assumed for f, ``R = 2S`` the radius of the
    interaction variable ``q = k - k2``.
    """

    d: int
    N: int
    S: float
    L: float

    @property
    def R(self) -> float:
        return 2.0 * self.S

    @property
    def dk(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @cached_property
    def nodes(self) -> np.ndarray:
        """Per-axis nodes ``k_i = -L + i dk``."""
        return -self.L + self.dk * np.arange(self.N)

    @cached_property
    def modes(self) -> np.ndarray:
        """Per-axis integer modes ``-N/2 .. N/2-1`` in storage order."""
        return np.arange(-self.N // 2, self.N // 2)

    def mesh(self) -> list[np.ndarray]:
        """Coordinate arrays ``[k_1, ..., k_d]``, each of shape ``N^d``."""
        return np.meshgrid(*([self.nodes] * self.d), indexing="ij")

    def mode_mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*([self.modes] * self.d), indexing="ij")

    @cached_property
    def k2(self) -> np.ndarray:
        """``|k|^2`` at every node."""
        return sum(k * k for k in self.mesh())

    @property
    def cell_volume(self) -> float:
        return self.dk**self.d

    def mode_index(self, j) -> tuple[int, ...]:
        """Storage index of the mode tuple ``j``; raises if out of range."""
        j = tuple(int(x) for x in np.atleast_1d(j))
        if len(j) != self.d or any(x < -self.N // 2 or x >= self.N // 2 for x in j):
            raise IndexError(f"mode {j} outside [-{self.N // 2}, {self.N // 2 - 1}]^{self.d}")
        return tuple(x + self.N // 2 for x in j)


def build_grid(d: int, N: int, S: float, L_override: float | None = None) -> SpectralGrid:
    """Build the computational grid.

    ``L`` defaults to the anti-aliasing bound ``(3 + sqrt 2)/2 * S``; an
    override must not go below it.
    """
    if d not in (2, 3):
        raise GridError(f"dimension must be 2 or 3, got {d}")
    if N < 4 or N % 2:
        raise OddResolutionError(f"N must be an even integer >= 4, got {N}")
    if not S > 0:
        raise NonPositiveSupportError(f"support radius S must be positive, got {S}")
    bound = ALIAS_FACTOR * S
    if L_override is None:
        L = bound
    else:
        # relative slack so that L_factor * S round trips through text configs
        if L_override < bound * (1 - 1e-12):
            raise BoxTooSmallError(f"L={L_override} is below the anti-aliasing bound {bound}")
        L = float(L_override)
    return SpectralGrid(d=int(d), N=int(N), S=float(S), L=float(L))


@dataclass
class SpectralField:
    """Real values of f on the collocation nodes.

    ``imag_max`` records the largest imaginary magnitude discarded when the
    field was produced from coefficients (0 for fields built directly).
    """

    grid: SpectralGrid
    values: np.ndarray
    imag_max: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ShapeMismatchError(f"field shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteError("field contains non-finite values")


@dataclass
class SpectralCoeffs:
    """Complex Fourier coefficients in centered storage order."""

    grid: SpectralGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != self.grid.shape:
            raise ShapeMismatchError(f"coefficient shape {self.coeffs.shape} != grid shape {self.grid.shape}")

    def __getitem__(self, j) -> complex:
        return self.coeffs[self.grid.mode_index(j)]


def _alternating_sign(grid: SpectralGrid) -> np.ndarray:
    # e^{i pi j} for the -L offset of the first node
    s = (-1.0) ** (grid.modes % 2)
    out = s
    for _ in range(grid.d - 1):
        out = np.multiply.outer(out, s)
    return out


def to_coefficients(field: SpectralField | np.ndarray, grid: SpectralGrid | None = None, workers: int | None = None) -> SpectralCoeffs:
    """Rectangle-rule Fourier coefficients ``1/N^d sum_i f_i exp(-i pi/L j.k_i)``."""
    if isinstance(field, SpectralField):
        grid, values = field.grid, field.values
    else:
        values = np.asarray(field)
    if values.shape != grid.shape:
        raise ShapeMismatchError(f"field shape {values.shape} != grid shape {grid.shape}")
    c = scipy.fft.fftn(values, norm="forward", workers=workers)
    c = scipy.fft.fftshift(c)
    return SpectralCoeffs(grid, c * _alternating_sign(grid))


def to_field(coeffs: SpectralCoeffs, workers: int | None = None) -> SpectralField:
    """Evaluate the truncated series at the nodes; keeps the real part."""
    grid = coeffs.grid
    if coeffs.coeffs.shape != grid.shape:
        raise ShapeMismatchError(f"coefficient shape {coeffs.coeffs.shape} != grid shape {grid.shape}")
    c = scipy.fft.ifftshift(coeffs.coeffs * _alternating_sign(grid))
    v = scipy.fft.ifftn(c, norm="forward", workers=workers)
    imag = float(np.max(np.abs(v.imag))) if v.size else 0.0
    return SpectralField(grid, v.real.copy(), imag_max=imag)


def outside_support_fraction(field: SpectralField) -> float:
    """Fraction of the (absolute) discrete mass lying outside the ball of radius S."""
    g = field.grid
    a = np.abs(field.values)
    total = a.sum()
    if total == 0:
        return 0.0
    return float(a[g.k2 > g.S**2].sum() / total)
