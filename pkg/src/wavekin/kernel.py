"""Mode-space evaluation of the wave kinetic operator.

Two routes compute the same Galerkin sums

    K_hat_j = 2^{1-d} sum_{l+m+n=j} [G1(l,m,n) - G2(m,n) + G3(l,n) - G4(l,m)] f_l f_m f_n

with every weight G replaced by its separable quadrature approximation:

* :func:`apply_K_direct` enumerates all index triples (O(N^{3d}), oracle);
* :func:`apply_K_fast` factors each weight into per-mode phase vectors and
  evaluates the nested convolutions with FFTs.

In ``exact`` mode the FFT length per axis is padded to ``P >= 2N``, which is
enough for the retained output modes to be free of wraparound, so both routes
agree to roundoff. ``circular`` mode uses length-N transforms and accepts the
aliased triples.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .grid import SpectralCoeffs, SpectralField, SpectralGrid, ShapeMismatchError, to_coefficients, to_field
from .quadrature import RadialRule, SphericalRule, default_angular_rule, gauss_legendre_radial


class TermId(enum.Enum):
    K1 = 1
    K2 = 2
    K3 = 3
    K4 = 4

    @property
    def sign(self) -> int:
        return 1 if self in (TermId.K1, TermId.K3) else -1


TERMS = tuple(TermId)

DIRECT_LIMIT = {2: 16, 3: 8}


class KernelError(ValueError):
    pass


class OracleGuardError(KernelError):
    """Direct evaluation requested above the feasible resolution."""


@dataclass
class KernelPlan:
    """Everything one operator evaluation needs: grid, rules, transform size.

    A plan holds scratch state and must not be shared between threads.
    """

    grid: SpectralGrid
    radial: RadialRule
    q_rule: SphericalRule
    sigma_rule: SphericalRule
    mode: str = "exact"
    P: int = 0
    workers: int | None = None
    reuse_antipodes: bool = True
    _scratch: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.mode not in ("exact", "circular"):
            raise KernelError(f"unknown convolution mode {self.mode!r}")
        d = self.grid.d
        if self.q_rule.d != d or self.sigma_rule.d != d:
            raise KernelError("angular rules do not match the grid dimension")
        N = self.grid.N
        if self.mode == "exact":
            if self.P == 0:
                self.P = scipy.fft.next_fast_len(2 * N)
            if self.P < 2 * N:
                raise KernelError(f"exact mode needs P >= 2N = {2 * N}, got {self.P}")
        else:
            self.P = N
        if np.any(self.radial.nodes <= 0) or np.any(self.radial.nodes > self.grid.R):
            raise KernelError("radial nodes must lie in (0, R]")

    @property
    def radial_weights(self) -> np.ndarray:
        """``w_r |q|^{2d-3}`` per radial node."""
        return self.radial.weights * self.radial.nodes ** (2 * self.grid.d - 3)

    @property
    def same_angular_rules(self) -> bool:
        return self.q_rule == self.sigma_rule


def make_plan(
    grid: SpectralGrid,
    N_r: int | None = None,
    N_s: int | None = None,
    N_sig: int | None = None,
    mode: str = "exact",
    q_rule: SphericalRule | None = None,
    sigma_rule: SphericalRule | None = None,
    workers: int | None = None,
    P: int = 0,
) -> KernelPlan:
    """Plan with defaults ``N_r = N`` and ``N_s = N_sig = 12`` (2D) / ``6`` (3D)."""
    default_s = 12 if grid.d == 2 else 6
    N_r = grid.N if N_r is None else N_r
    if q_rule is None:
        q_rule = default_angular_rule(grid.d, N_s or default_s)
    if sigma_rule is None:
        sigma_rule = default_angular_rule(grid.d, N_sig or N_s or default_s)
    return KernelPlan(
        grid=grid,
        radial=gauss_legendre_radial(N_r, grid.R),
        q_rule=q_rule,
        sigma_rule=sigma_rule,
        mode=mode,
        P=P,
        workers=workers,
    )


# ---------------------------------------------------------------------------
# phase factors and weights


def phase_vector(grid: SpectralGrid, r: float, direction, scale: str = "full", sign: int = -1) -> np.ndarray:
    """``exp(sign * i * pi/L * c * r * m.dir)`` on all modes (c = 1 or 1/2)."""
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (grid.d,) or abs(np.linalg.norm(direction) - 1.0) > 1e-12:
        raise KernelError(f"direction must be a unit {grid.d}-vector, got {direction}")
    if scale not in ("full", "half"):
        raise KernelError(f"scale must be 'full' or 'half', got {scale!r}")
    if sign not in (1, -1):
        raise KernelError(f"sign must be +1 or -1, got {sign}")
    c = 1.0 if scale == "full" else 0.5
    return _separable_phase(grid, sign * c * math.pi / grid.L * r * direction)


def _separable_phase(grid: SpectralGrid, vecs: np.ndarray) -> np.ndarray:
    """``exp(i m.v)`` on the mode set for one vector ``v`` or a stack of them."""
    vecs = np.asarray(vecs, dtype=float)
    single = vecs.ndim == 1
    vecs = np.atleast_2d(vecs)
    axes = [np.exp(1j * np.multiply.outer(vecs[:, a], grid.modes)) for a in range(grid.d)]
    out = axes[0]
    for e in axes[1:]:
        out = out[..., None] * e.reshape(e.shape[:1] + (1,) * (out.ndim - 1) + e.shape[1:])
    return out[0] if single else out


def weight_G(term: TermId, l, m, n, plan: KernelPlan) -> complex:
    """Quadrature value of the weight ``G_term`` for one mode triple.

    Evaluated straight from the product of phase factors; the modes a term
    does not depend on are ignored.
    """
    g = plan.grid
    l, m, n = (np.asarray(x, dtype=float).reshape(g.d) for x in (l, m, n))
    for x in (l, m, n):
        g.mode_index(x)
    k = math.pi / g.L
    use_l_q = term in (TermId.K1, TermId.K3, TermId.K4)
    use_m_q = term in (TermId.K1, TermId.K2, TermId.K4)
    use_n_q = term in (TermId.K1, TermId.K2, TermId.K3)
    use_l_s = term in (TermId.K1, TermId.K3, TermId.K4)
    use_n_s = term in (TermId.K1, TermId.K2, TermId.K3)
    total = 0.0j
    qd = plan.q_rule.nodes
    sd = plan.sigma_rule.nodes
    for r, W in zip(plan.radial.nodes, plan.radial_weights):
        expo = np.zeros(len(qd))
        if use_m_q:
            expo -= k * r * (qd @ m)  # alpha
        if use_l_q:
            expo -= 0.5 * k * r * (qd @ l)  # beta
        if use_n_q:
            expo -= 0.5 * k * r * (qd @ n)  # gamma
        q_bracket = np.sum(plan.q_rule.weights * np.exp(1j * expo))
        expo = np.zeros(len(sd))
        if use_l_s:
            expo += 0.5 * k * r * (sd @ l)  # beta tilde
        if use_n_s:
            expo -= 0.5 * k * r * (sd @ n)  # gamma tilde
        s_bracket = np.sum(plan.sigma_rule.weights * np.exp(1j * expo))
        total += W * q_bracket * s_bracket
    return complex(total)


# ---------------------------------------------------------------------------
# direct O(N^{3d}) evaluation


def _check_coeffs(coeffs: SpectralCoeffs, plan: KernelPlan):
    if coeffs.grid != plan.grid or coeffs.coeffs.shape != plan.grid.shape:
        raise ShapeMismatchError("coefficients are not on the plan's grid")


def _bracket_tables(plan: KernelPlan):
    """Direction brackets tabulated over every integer combination they can see.

    ``A[p1, u] = sum_p2 w_s exp(-i pi/L |q|/2 u.qhat)`` for ``u`` in
    ``[-2N, 2N]^d`` and ``B[p1, v] = sum_p3 w_sig exp(+i pi/L |q|/2 v.sigma)``
    for ``v`` in ``[-N, N]^d``.
    """
    g = plan.grid
    N, d = g.N, g.d
    k = math.pi / g.L

    def table(span, rule, sgn):
        ax = np.arange(-span, span + 1)
        vecs = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
        proj = vecs @ rule.nodes.T  # (V, nodes)
        out = np.empty((plan.radial.count, len(vecs)), dtype=complex)
        for i, r in enumerate(plan.radial.nodes):
            out[i] = np.exp(sgn * 0.5j * k * r * proj) @ rule.weights
        return out

    return table(2 * N, plan.q_rule, -1), table(N, plan.sigma_rule, +1)


def _flat_index(vecs: np.ndarray, span: int) -> np.ndarray:
    width = 2 * span + 1
    idx = np.zeros(vecs.shape[:-1], dtype=np.int64)
    for a in range(vecs.shape[-1]):
        idx = idx * width + (vecs[..., a] + span)
    return idx


def direct_terms(coeffs: SpectralCoeffs, plan: KernelPlan, force: bool = False) -> dict[TermId, np.ndarray]:
    """The four Galerkin sums ``K_hat_{l,j}`` (no ``2^{1-d}`` prefactor) by full enumeration."""
    _check_coeffs(coeffs, plan)
    g = plan.grid
    N, d = g.N, g.d
    if N > DIRECT_LIMIT[d] and not force:
        raise OracleGuardError(f"direct evaluation refused for N={N} in {d}D (limit {DIRECT_LIMIT[d]}); pass force=True")
    A, B = _bracket_tables(plan)
    W = plan.radial_weights
    modes = np.stack(g.mode_mesh(), axis=-1).reshape(-1, d)
    fhat = coeffs.coeffs.reshape(-1)
    lo, hi = -N // 2, N // 2 - 1

    # all (l, m) pairs once; n is fixed by j
    li, mi = np.meshgrid(np.arange(len(modes)), np.arange(len(modes)), indexing="ij")
    li, mi = li.ravel(), mi.ravel()
    lv, mv = modes[li], modes[mi]
    flm = fhat[li] * fhat[mi]

    out = {t: np.zeros(len(modes), dtype=complex) for t in TERMS}
    for jj, j in enumerate(modes):
        nv = j - lv - mv
        ok = np.all((nv >= lo) & (nv <= hi), axis=1)
        l, m, n = lv[ok], mv[ok], nv[ok]
        nidx = np.zeros(len(n), dtype=np.int64)
        for a in range(d):
            nidx = nidx * N + (n[:, a] - lo)
        fff = flm[ok] * fhat[nidx]
        pairs = {
            TermId.K1: (2 * m + l + n, l - n),
            TermId.K2: (2 * m + n, -n),
            TermId.K3: (l + n, l - n),
            TermId.K4: (2 * m + l, l),
        }
        for t, (u, v) in pairs.items():
            G = W @ (A[:, _flat_index(u, 2 * N)] * B[:, _flat_index(v, N)])
            out[t][jj] = np.dot(G, fff)
    return {t: a.reshape(g.shape) for t, a in out.items()}


def combine_terms(terms: dict[TermId, np.ndarray], d: int) -> np.ndarray:
    return (terms[TermId.K1] - terms[TermId.K2] + terms[TermId.K3] - terms[TermId.K4]) / 2 ** (d - 1)


def apply_K_direct(coeffs: SpectralCoeffs, plan: KernelPlan, force: bool = False) -> SpectralCoeffs:
    """Reference evaluation by explicit triple sums over the bounded mode set."""
    return SpectralCoeffs(plan.grid, combine_terms(direct_terms(coeffs, plan, force), plan.grid.d))


# ---------------------------------------------------------------------------
# fast double-convolution evaluation


class _Transforms:
    """Zero-padded transforms between centered mode arrays and length-P sample space."""

    def __init__(self, plan: KernelPlan):
        g = plan.grid
        self.d = g.d
        self.P = plan.P
        self.workers = plan.workers
        self.axes = tuple(range(-g.d, 0))
        self.s = (plan.P,) * g.d
        # output mode j sits at linear index j + 3N/2 of a triple product
        keep = (g.N + np.arange(g.N)) % plan.P
        self.keep = np.ix_(*([keep] * g.d))

    def forward(self, x: np.ndarray) -> np.ndarray:
        # one axis at a time, so the all-zero padding rows are never transformed
        for ax in reversed(self.axes):
            x = scipy.fft.ifft(x, n=self.P, axis=ax, norm="forward", workers=self.workers,
                               overwrite_x=ax != self.axes[-1])
        return x

    def back(self, acc: np.ndarray) -> np.ndarray:
        c = scipy.fft.fftn(acc, axes=self.axes, norm="forward", workers=self.workers)
        return c[self.keep]


def apply_terms_fast(coeffs: SpectralCoeffs, plan: KernelPlan, terms=TERMS) -> dict[TermId, np.ndarray]:
    """Each requested Galerkin sum evaluated on its own (no prefactor).

    Used for per-term timing; :func:`apply_K_fast` shares work between terms.
    """
    _check_coeffs(coeffs, plan)
    g = plan.grid
    T = _Transforms(plan)
    fhat = coeffs.coeffs
    k = math.pi / g.L
    qn, qw = plan.q_rule.nodes, plan.q_rule.weights
    sn, sw = plan.sigma_rule.nodes, plan.sigma_rule.weights
    anti = plan.sigma_rule.antipode if (plan.reuse_antipodes and plan.sigma_rule.antipodal) else None
    out = {}
    for term in terms:
        Tf = T.forward(fhat)
        acc = np.zeros(T.s, dtype=complex)
        for r, W in zip(plan.radial.nodes, plan.radial_weights):
            h = 0.5 * k * r
            if term is TermId.K2:
                # sum_p3 w gamma~(n) collapses to one mode-space array
                sig_sum = np.tensordot(sw, _separable_phase(g, -h * sn), axes=1)
            elif term is TermId.K4:
                sig_sum = np.tensordot(sw, _separable_phase(g, h * sn), axes=1)
            for p2 in range(len(qn)):
                qh = qn[p2]
                c = W * qw[p2]
                if term is TermId.K2:
                    Ta_ = T.forward(fhat * _separable_phase(g, -2 * h * qh))
                    Sb = T.forward(fhat * _separable_phase(g, -h * qh) * sig_sum)
                    acc += c * Ta_ * Tf * Sb
                elif term is TermId.K4:
                    Ta_ = T.forward(fhat * _separable_phase(g, -2 * h * qh))
                    Sa = T.forward(fhat * _separable_phase(g, -h * qh) * sig_sum)
                    acc += c * Ta_ * Tf * Sa
                else:
                    Ta = T.forward(fhat * _separable_phase(g, -h * (qh - sn)))
                    if anti is not None:
                        Tb = Ta[anti]
                    else:
                        Tb = T.forward(fhat * _separable_phase(g, -h * (qh + sn)))
                    F1 = np.tensordot(sw, Ta * Tb, axes=1)
                    if term is TermId.K1:
                        acc += c * T.forward(fhat * _separable_phase(g, -2 * h * qh)) * F1
                    else:
                        acc += c * Tf * F1
        out[term] = T.back(acc)
    return out


def apply_K_fast(coeffs: SpectralCoeffs, plan: KernelPlan) -> SpectralCoeffs:
    """FFT evaluation of the full operator, sharing the inner convolution of K1 and K3."""
    _check_coeffs(coeffs, plan)
    g = plan.grid
    T = _Transforms(plan)
    fhat = coeffs.coeffs
    k = math.pi / g.L
    qn, qw = plan.q_rule.nodes, plan.q_rule.weights
    sn, sw = plan.sigma_rule.nodes, plan.sigma_rule.weights
    anti = plan.sigma_rule.antipode if (plan.reuse_antipodes and plan.sigma_rule.antipodal) else None

    Tf = T.forward(fhat)
    acc = np.zeros(T.s, dtype=complex)
    for r, W in zip(plan.radial.nodes, plan.radial_weights):
        h = 0.5 * k * r
        for p2 in range(len(qn)):
            qh = qn[p2]
            Talpha = T.forward(fhat * _separable_phase(g, -2 * h * qh))
            Ta = T.forward(fhat * _separable_phase(g, -h * (qh - sn)))
            Tb = Ta[anti] if anti is not None else T.forward(fhat * _separable_phase(g, -h * (qh + sn)))
            F = np.tensordot(sw, Ta * Tb, axes=1)
            S = np.tensordot(sw, Ta + Tb, axes=1)
            # K1 - K2 + K3 - K4 for this (|q|, qhat) node
            acc += (W * qw[p2]) * ((Talpha + Tf) * F - Talpha * Tf * S)
    return SpectralCoeffs(g, T.back(acc) / 2 ** (g.d - 1))


def collision(field: SpectralField, plan: KernelPlan) -> SpectralField:
    """Physical-space collision term; ``imag_max`` carries the discarded imaginary part."""
    if field.grid != plan.grid:
        raise ShapeMismatchError("field is not on the plan's grid")
    c = to_coefficients(field, workers=plan.workers)
    return to_field(apply_K_fast(c, plan), workers=plan.workers)
