"""Command line entry point: ``wavekin {stationary,evolve,compare,bench,quadcheck}``.

Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 failed check.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .evolve import EvolutionConfig, EvolutionError, run
from .grid import NonFiniteError, SpectralField, build_grid, to_coefficients, to_field
from .kernel import (
    TERMS,
    KernelPlan,
    apply_K_direct,
    apply_K_fast,
    apply_terms_fast,
    make_plan,
    weight_G,
    TermId,
)
from .quadrature import (
    circle_midpoint,
    gauss_legendre_radial,
    harmonic_defect,
    legendre_defect,
    monomial_defect,
    spherical_design,
)
from .states import BiMaxwellianParams, RJParams, bi_maxwellian, delta_ring, gaussian, kz_state, rayleigh_jeans
from .storage import DirectorySink

log = logging.getLogger("wavekin")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3

COMPARE_TOL = 1e-12
QUAD_TOL = 1e-12


class CheckFailed(Exception):
    pass


def grid_from_config(cfg: RunConfig):
    L = None if cfg.L_factor is None else cfg.L_factor * cfg.S
    return build_grid(cfg.dimension, cfg.N, cfg.S, L)


def plan_from_config(cfg: RunConfig, grid=None) -> KernelPlan:
    grid = grid or grid_from_config(cfg)
    return make_plan(grid, N_r=cfg.n_r, N_s=cfg.n_s, N_sig=cfg.n_sig, mode=cfg.conv_mode, workers=cfg.workers)


def _vec(value, d, name):
    v = list(np.atleast_1d(value).astype(float))
    if len(v) < d:
        # a short vector is padded with zeros (the 3D RJ example lists two components)
        v = v + [0.0] * (d - len(v))
    if len(v) != d:
        raise ConfigError(f"{name} must have {d} components")
    return tuple(v)


def initial_field(cfg: RunConfig, grid) -> SpectralField:
    ic = dict(cfg.ic)
    kind = ic.get("kind", "rayleigh_jeans")
    d = grid.d
    if kind == "rayleigh_jeans":
        p = RJParams(float(ic.get("mu", 50.0)), _vec(ic.get("nu", [5.0, 5.0]), d, "ic.nu"), float(ic.get("xi", 100.0)))
        return rayleigh_jeans(grid, p)
    if kind == "bi_maxwellian":
        p = BiMaxwellianParams(*(float(ic.get(k, v)) for k, v in (("rho1", 1.2), ("rho2", 0.8), ("T1", 2 / 3), ("T2", 1.5))))
        return bi_maxwellian(grid, p)
    if kind == "delta_ring":
        radii = np.atleast_1d(ic.get("radii", [0.0, 0.2])).astype(float)
        coefs = np.atleast_1d(ic.get("coefs", [1 / 3, 1 / 3])).astype(float)
        if len(radii) != len(coefs):
            raise ConfigError("ic.radii and ic.coefs must have equal length")
        u = ic.get("u")
        return delta_ring(grid, list(zip(radii, coefs)), None if u is None else float(u))
    if kind == "gaussian":
        center = _vec(ic.get("center", [0.0] * d), d, "ic.center")
        return gaussian(grid, center, float(ic.get("T", 1.0)), float(ic.get("rho", 1.0)))
    if kind == "two_gaussians":
        a = gaussian(grid, _vec(ic.get("center1"), d, "ic.center1"), float(ic.get("T1", 1.0)), float(ic.get("rho1", 1.0)))
        b = gaussian(grid, _vec(ic.get("center2"), d, "ic.center2"), float(ic.get("T2", 1.0)), float(ic.get("rho2", 1.0)))
        return SpectralField(grid, a.values + b.values)
    if kind == "kz":
        return kz_state(grid, float(ic.get("exponent", 7 / 6)), float(ic.get("eps", 1.0)))
    if kind == "zero":
        return SpectralField(grid, np.zeros(grid.shape))
    raise ConfigError(f"unknown initial condition kind {kind!r}")


def _norms(field: SpectralField) -> tuple[float, float]:
    g = field.grid
    v = field.values
    return float(np.abs(v).max()), float(math.sqrt(g.cell_volume * float((v * v).sum())))


# ---------------------------------------------------------------------------
# commands


def cmd_stationary(cfg: RunConfig, out=None) -> dict:
    """Residual of the collision operator on a stationary state."""
    out = out or sys.stdout
    grid = grid_from_config(cfg)
    if cfg.ic.get("kind", "rayleigh_jeans") not in ("rayleigh_jeans", "zero"):
        raise ConfigError("stationary needs ic.kind = rayleigh_jeans (or zero)")
    plan = plan_from_config(cfg, grid)
    f = initial_field(cfg, grid)
    coeffs = to_coefficients(f, workers=plan.workers)
    times = {}
    for term in TERMS:
        t0 = time.perf_counter()
        apply_terms_fast(coeffs, plan, (term,))
        times[term.name] = time.perf_counter() - t0
    t0 = time.perf_counter()
    K = to_field(apply_K_fast(coeffs, plan), workers=plan.workers)
    fused = time.perf_counter() - t0
    linf, l2 = _norms(K)
    report = {
        "d": grid.d, "N": grid.N, "N_r": plan.radial.count, "N_s": plan.q_rule.count, "N_sig": plan.sigma_rule.count,
        "linf": linf, "l2": l2, "imag_max": K.imag_max,
        **{f"time_{k}": v for k, v in times.items()},
        "time_total": sum(times.values()), "time_fused": fused,
    }
    print(f"{'N':>5} | {'||K(f)||_inf':>12} | {'||K(f)||_2':>12}", file=out)
    print(f"{grid.N:>5} | {linf:12.4e} | {l2:12.4e}", file=out)
    print(" | ".join(f"{k:>7}" for k in ("K1", "K2", "K3", "K4", "K")) + f" | {'fused':>7}", file=out)
    print(" | ".join(f"{times[t.name]:6.2f}s" for t in TERMS) + f" | {report['time_total']:6.2f}s | {fused:6.2f}s", file=out)
    if cfg.output:
        p = Path(cfg.output)
        p.mkdir(parents=True, exist_ok=True)
        _write_rows(p / "stationary.csv", [report])
    return report


def cmd_evolve(cfg: RunConfig, out=None) -> dict:
    out = out or sys.stdout
    grid = grid_from_config(cfg)
    plan = plan_from_config(cfg, grid)
    f0 = initial_field(cfg, grid)
    ecfg = EvolutionConfig(cfg.dt, cfg.t_end, cfg.record_every, cfg.snapshot_every)
    sink = DirectorySink(cfg.output or "wavekin_out", grid.d, cfg.conv_mode)
    result = run(f0, plan, ecfg, sink)
    for rec in result.records:
        print(f"t={rec.t:8.4f} mass={rec.mass:.16e} energy={rec.energy:.16e} linf={rec.linf:.6e}", file=out)
    return {"records": result.records, "snapshots": sink.snapshot_paths, "outdir": sink.outdir}


def random_hermitian_coeffs(grid, seed: int):
    """Coefficients of a seeded random real field (Hermitian on every paired mode)."""
    rng = np.random.default_rng(seed)
    return to_coefficients(SpectralField(grid, rng.standard_normal(grid.shape)))


def max_relative_discrepancy(a: np.ndarray, b: np.ndarray) -> float:
    """``max |a - b| / max |b|``, with 0/0 taken as 0."""
    scale = float(np.max(np.abs(b)))
    diff = float(np.max(np.abs(a - b)))
    if scale == 0:
        return 0.0 if diff == 0 else math.inf
    return diff / scale


def cmd_compare(cfg: RunConfig, out=None) -> dict:
    out = out or sys.stdout
    grid = grid_from_config(cfg)
    plan = plan_from_config(cfg, grid)
    if cfg.ic.get("kind") == "zero":
        coeffs = to_coefficients(SpectralField(grid, np.zeros(grid.shape)))
    else:
        coeffs = random_hermitian_coeffs(grid, cfg.seed)
    direct = apply_K_direct(coeffs, plan).coeffs
    fast = apply_K_fast(coeffs, plan).coeffs
    disc = max_relative_discrepancy(fast, direct)
    checked = plan.mode == "exact"
    passed = disc <= COMPARE_TOL
    verdict = ("PASS" if passed else "FAIL") if checked else "measured"
    print(f"compare d={grid.d} N={grid.N} mode={plan.mode}: max relative discrepancy {disc:.3e} [{verdict}]", file=out)
    report = {"discrepancy": disc, "passed": passed, "checked": checked}
    if checked and not passed:
        raise CheckFailed(f"fast and direct evaluations differ by {disc:.3e} > {COMPARE_TOL}")
    return report


def bench_sizes(cfg: RunConfig) -> list[int]:
    sizes = cfg.bench.get("N", [16, 32, 64])
    return [int(n) for n in np.atleast_1d(sizes)]


def time_terms(plan: KernelPlan, coeffs, repeats: int) -> dict[str, float]:
    """Median wall time of each term evaluated on its own, plus the fused operator."""
    out = {}
    for term in TERMS:
        samples = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            apply_terms_fast(coeffs, plan, (term,))
            samples.append(time.perf_counter() - t0)
        out[term.name] = statistics.median(samples)
    out["total"] = sum(out[t.name] for t in TERMS)
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        apply_K_fast(coeffs, plan)
        samples.append(time.perf_counter() - t0)
    out["fused"] = statistics.median(samples)
    return out


def cmd_bench(cfg: RunConfig, out=None) -> list[dict]:
    out = out or sys.stdout
    repeats = max(3, int(cfg.bench.get("repeats", 3)))
    rows = []
    prev = None
    print(f"{'N':>5} | " + " | ".join(f"{k:>8}" for k in ("K1", "K2", "K3", "K4", "K", "fused", "ratio")), file=out)
    for N in bench_sizes(cfg):
        grid = build_grid(cfg.dimension, N, cfg.S, None if cfg.L_factor is None else cfg.L_factor * cfg.S)
        n_r = int(cfg.bench.get("N_r_factor", 1) * N) if cfg.N_r is None else cfg.N_r
        plan = make_plan(grid, N_r=n_r, N_s=cfg.n_s, N_sig=cfg.n_sig, mode=cfg.conv_mode, workers=cfg.workers)
        coeffs = random_hermitian_coeffs(grid, cfg.seed)
        apply_K_fast(coeffs, plan)  # warm-up
        t = time_terms(plan, coeffs, repeats)
        ratio = t["total"] / prev if prev else None
        prev = t["total"]
        row = {"d": cfg.dimension, "N": N, "N_r": n_r, **{f"time_{k}": v for k, v in t.items()}, "ratio": ratio}
        rows.append(row)
        cells = [f"{t[k]:7.3f}s" for k in ("K1", "K2", "K3", "K4", "total", "fused")]
        cells.append(f"{ratio:8.2f}" if ratio else f"{'-':>8}")
        print(f"{N:>5} | " + " | ".join(cells), file=out)
    if cfg.output:
        p = Path(cfg.output)
        p.mkdir(parents=True, exist_ok=True)
        _write_rows(p / "bench.csv", rows)
    return rows


def quadrature_report(cfg: RunConfig) -> list[dict]:
    """Exactness checks for the configured rules; each entry has ``expected`` and ``observed``."""
    rows = []

    def add(name, defect, expect_exact):
        exact = defect <= QUAD_TOL
        rows.append({"check": name, "defect": defect, "expected": "exact" if expect_exact else "inexact",
                     "observed": "exact" if exact else "inexact", "ok": exact == expect_exact})

    R = 2 * cfg.S
    n_r = cfg.n_r
    rad = gauss_legendre_radial(n_r, R)
    for deg in range(2 * n_r):
        add(f"radial GL N_r={n_r} degree {deg}", monomial_defect(rad, deg, R), True)
    add(f"radial GL N_r={n_r} Legendre degree {2 * n_r}", legendre_defect(rad, 2 * n_r, R), False)
    if cfg.dimension == 2:
        rules = {("midpoint", cfg.n_s): circle_midpoint(cfg.n_s)}
        if cfg.n_sig != cfg.n_s:
            rules[("midpoint", cfg.n_sig)] = circle_midpoint(cfg.n_sig)
    else:
        rules = {("design", n): spherical_design(n) for n in sorted({cfg.n_s, cfg.n_sig})}
    for (kind, n), rule in rules.items():
        wsum = 2 * math.pi if rule.d == 2 else 4 * math.pi
        add(f"{kind} {n}: weight sum", abs(rule.weights.sum() - wsum) / wsum, True)
        for deg in range(1, rule.strength + 1):
            add(f"{kind} {n}: degree {deg}", harmonic_defect(rule, deg), True)
        add(f"{kind} {n}: degree {rule.strength + 1}", harmonic_defect(rule, rule.strength + 1), False)
    for d, closed in ((2, 2 * math.pi**2 * R**2), (3, 4 * math.pi**2 * R**4)):
        g = build_grid(d, 4, cfg.S)
        plan = make_plan(g, N_r=max(2, n_r))
        z = (0,) * d
        add(f"G1(0,0,0) {d}D closed form", abs(weight_G(TermId.K1, z, z, z, plan) - closed) / closed, True)
    return rows


def cmd_quadcheck(cfg: RunConfig, out=None) -> list[dict]:
    out = out or sys.stdout
    rows = quadrature_report(cfg)
    for r in rows:
        status = "pass" if r["ok"] else "FAIL"
        print(f"[{status}] {r['check']}: defect {r['defect']:.2e} (expected {r['expected']}, observed {r['observed']})", file=out)
    bad = [r for r in rows if not r["ok"]]
    if bad:
        raise CheckFailed(f"{len(bad)} quadrature checks failed")
    return rows


def _write_rows(path: Path, rows: list[dict]):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\r\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else format(v, ".17g") if isinstance(v, float) else v) for k, v in row.items()})


COMMANDS = {
    "stationary": cmd_stationary,
    "evolve": cmd_evolve,
    "compare": cmd_compare,
    "bench": cmd_bench,
    "quadcheck": cmd_quadcheck,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wavekin", description="Fast spectral solver for the 4-wave kinetic equation")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", metavar="PATH", help="key = value configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key (repeatable)")
    p.add_argument("--threads", type=int, help="FFT worker threads (default: $WAVEKIN_THREADS or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.overrides)
        if args.threads is not None:
            cfg.threads = args.threads
        COMMANDS[args.command](cfg)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (EvolutionError, NonFiniteError) as exc:
        extra = f" (last good t={exc.last_good_t})" if getattr(exc, "last_good_t", None) is not None else ""
        print(f"numeric failure: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
