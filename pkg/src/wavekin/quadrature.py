"""Quadrature rules for the interaction variable: radius, direction, and sigma.

Radial integrals over ``[0, R]`` use Gauss-Legendre; directions use the
midpoint rule on the circle (2D) or equal-weight spherical designs (3D).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import sph_harm_y


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class RadialRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class SphericalRule:
    """Nodes on the unit sphere in R^d with positive weights.

    ``strength`` is the largest degree integrated exactly (trigonometric
    degree on the circle, harmonic degree on the sphere); ``antipodal`` is
    set only when every node's negation is also a node with equal weight.
    """

    d: int
    nodes: np.ndarray
    weights: np.ndarray
    antipodal: bool
    strength: int | None = None
    source: str = ""
    antipode: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def count(self) -> int:
        return len(self.nodes)

    def __eq__(self, other):
        if not isinstance(other, SphericalRule):
            return NotImplemented
        return (
            self.d == other.d
            and self.nodes.shape == other.nodes.shape
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


def gauss_legendre_radial(N_r: int, R: float) -> RadialRule:
    if N_r < 1:
        raise QuadratureError(f"N_r must be >= 1, got {N_r}")
    if not R > 0:
        raise QuadratureError(f"R must be positive, got {R}")
    x, w = np.polynomial.legendre.leggauss(N_r)
    return RadialRule(nodes=0.5 * R * (x + 1.0), weights=0.5 * R * w)


def _antipode_map(nodes: np.ndarray, weights: np.ndarray, tol: float = 1e-12) -> np.ndarray | None:
    """Index of each node's negation, or None if the set is not closed under it."""
    dist = np.linalg.norm(nodes[:, None, :] + nodes[None, :, :], axis=-1)
    idx = np.argmin(dist, axis=1)
    if np.max(dist[np.arange(len(nodes)), idx]) > tol:
        return None
    if not np.allclose(weights[idx], weights, rtol=1e-13, atol=0):
        return None
    return idx


def _make_rule(d, nodes, weights, strength, source, claim_antipodal=None) -> SphericalRule:
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    amap = _antipode_map(nodes, weights)
    if claim_antipodal and amap is None:
        raise QuadratureError(f"{source}: table claims antipodal symmetry but nodes are not closed under negation")
    anti = amap is not None if claim_antipodal is None else bool(claim_antipodal)
    return SphericalRule(d, nodes, weights, anti, strength, source, amap if anti else None)


def circle_midpoint(N_s: int) -> SphericalRule:
    """Equal-weight rule at angles ``2 pi (p + 1/2) / N_s``."""
    if N_s < 2 or N_s % 2:
        raise QuadratureError(f"N_s must be even and >= 2, got {N_s}")
    theta = 2.0 * np.pi * (np.arange(N_s) + 0.5) / N_s
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    weights = np.full(N_s, 2.0 * np.pi / N_s)
    return _make_rule(2, nodes, weights, N_s - 1, f"circle midpoint, {N_s} nodes")


_HEADER = re.compile(r"#\s*(\w+)\s*:\s*(.+)")


def load_design(path) -> SphericalRule:
    """Read a node table: rows of ``x y z [w]``, ``#`` comments.

    Header comments of the form ``# strength: t`` and ``# antipodal: yes``
    are honoured. Missing weights mean equal weights summing to 4 pi.
    """
    text = Path(path).read_text() if not hasattr(path, "read_text") else path.read_text()
    meta = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                meta[m.group(1).lower()] = m.group(2).strip()
            continue
        rows.append([float(v) for v in line.split()])
    if not rows:
        raise QuadratureError(f"{path}: no nodes")
    widths = {len(r) for r in rows}
    if widths not in ({3}, {4}):
        raise QuadratureError(f"{path}: rows must all have 3 or all have 4 columns")
    arr = np.array(rows)
    nodes = arr[:, :3]
    norms = np.linalg.norm(nodes, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-14:
        raise QuadratureError(f"{path}: nodes are not unit vectors (max deviation {np.max(np.abs(norms - 1)):.2e})")
    if arr.shape[1] == 4:
        weights = arr[:, 3]
        if np.any(weights <= 0):
            raise QuadratureError(f"{path}: weights must be positive")
    else:
        weights = np.full(len(nodes), 4.0 * np.pi / len(nodes))
    strength = int(meta["strength"]) if "strength" in meta else None
    claim = None
    if "antipodal" in meta:
        claim = meta["antipodal"].lower() in ("yes", "true", "1")
    return _make_rule(3, nodes, weights, strength, str(path), claim)


def _design_path(n: int):
    return resources.files("wavekin") / "data" / f"design_{n:03d}.txt"


def available_designs() -> list[int]:
    out = []
    for entry in (resources.files("wavekin") / "data").iterdir():
        m = re.fullmatch(r"design_(\d+)\.txt", entry.name)
        if m:
            out.append(int(m.group(1)))
    return sorted(out)


def spherical_design(N_sig: int) -> SphericalRule:
    """Shipped equal-weight spherical design with ``N_sig`` points."""
    sizes = available_designs()
    if N_sig not in sizes:
        raise QuadratureError(f"no spherical design with {N_sig} points; available sizes: {sizes}")
    rule = load_design(_design_path(N_sig))
    return SphericalRule(3, rule.nodes, rule.weights, rule.antipodal, rule.strength,
                         f"spherical design, {N_sig} points", rule.antipode)


def default_angular_rule(d: int, count: int) -> SphericalRule:
    return circle_midpoint(count) if d == 2 else spherical_design(count)


def real_spherical_harmonics(degree: int, points: np.ndarray) -> np.ndarray:
    """All ``2*degree+1`` orthonormal real harmonics of one degree at unit ``points``.

    Returns an array of shape ``(2*degree+1, len(points))``.
    """
    points = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(points[:, 2], -1.0, 1.0))
    phi = np.arctan2(points[:, 1], points[:, 0])
    rows = []
    for m in range(-degree, degree + 1):
        y = sph_harm_y(degree, abs(m), theta, phi)
        if m < 0:
            rows.append(math.sqrt(2) * (-1) ** m * y.imag)
        elif m == 0:
            rows.append(y.real)
        else:
            rows.append(math.sqrt(2) * (-1) ** m * y.real)
    return np.array(rows)


def harmonic_defect(rule: SphericalRule, degree: int) -> float:
    """Largest |quadrature of a degree-``degree`` harmonic| (exact value is 0)."""
    if rule.d == 2:
        theta = np.arctan2(rule.nodes[:, 1], rule.nodes[:, 0])
        return float(abs(np.sum(rule.weights * np.exp(1j * degree * theta))))
    return float(np.max(np.abs(real_spherical_harmonics(degree, rule.nodes) @ rule.weights)))


def monomial_defect(rule: RadialRule, degree: int, R: float) -> float:
    """Relative error of the rule on ``int_0^R r^degree dr``."""
    exact = R ** (degree + 1) / (degree + 1)
    approx = float(np.sum(rule.weights * rule.nodes**degree))
    return abs(approx - exact) / exact


def legendre_defect(rule: RadialRule, degree: int, R: float) -> float:
    """``|quadrature of P_degree(2r/R - 1)| / R`` (exact value 0 for degree >= 1).

    Unlike a plain monomial, this stays O(1) just past the exactness limit,
    which makes it the right probe for where exactness stops.
    """
    c = np.zeros(degree + 1)
    c[-1] = 1.0
    vals = np.polynomial.legendre.legval(2.0 * rule.nodes / R - 1.0, c)
    return float(abs(np.sum(rule.weights * vals))) / R
