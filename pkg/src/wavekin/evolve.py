"""Explicit RK4 integration of df/dt = K(f,f,f) with observable recording."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .grid import NonFiniteError, SpectralField
from .kernel import KernelPlan, collision

log = logging.getLogger(__name__)


class EvolutionError(ArithmeticError):
    """The state became non-finite; ``last_good_t`` is the last finite time."""

    def __init__(self, message, step=None, last_good_t=None):
        super().__init__(message)
        self.step = step
        self.last_good_t = last_good_t


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    mass: float
    momentum: tuple[float, ...]
    energy: float
    linf: float
    l2: float
    neg_min: float = 0.0


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_end: float
    record_every: int = 1
    snapshot_every: int = 0  # 0 disables snapshots except the initial one

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if self.record_every < 1 or self.snapshot_every < 0:
            raise ValueError("record_every must be >= 1 and snapshot_every >= 0")

    @property
    def n_steps(self) -> int:
        n = self.t_end / self.dt
        return int(round(n)) if abs(n - round(n)) < 1e-9 * max(1.0, n) else int(np.ceil(n))


def observables(field: SpectralField, t: float = 0.0) -> ObservableRecord:
    """Rectangle-rule moments on the periodic box."""
    g = field.grid
    f = field.values
    vol = g.cell_volume
    K = g.mesh()
    return ObservableRecord(
        t=float(t),
        mass=float(vol * f.sum()),
        momentum=tuple(float(vol * (f * k).sum()) for k in K),
        energy=float(vol * (f * g.k2).sum()),
        linf=float(np.abs(f).max()),
        l2=float(np.sqrt(vol * (f * f).sum())),
        neg_min=float(min(f.min(), 0.0)),
    )


def _rhs(values: np.ndarray, field: SpectralField, plan: KernelPlan, step: int) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise EvolutionError(f"non-finite stage values in step {step}", step=step)
    try:
        # overflow shows up as inf/nan and is reported by the finiteness checks
        with np.errstate(over="ignore", invalid="ignore"):
            return collision(SpectralField(field.grid, values), plan).values
    except NonFiniteError as exc:
        raise EvolutionError(f"non-finite collision term in step {step}", step=step) from exc


def rk4_step(field: SpectralField, plan: KernelPlan, dt: float, step: int = 0) -> SpectralField:
    """Classical four-stage Runge-Kutta step."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    f = field.values
    k1 = _rhs(f, field, plan, step)
    k2 = _rhs(f + 0.5 * dt * k1, field, plan, step)
    k3 = _rhs(f + 0.5 * dt * k2, field, plan, step)
    k4 = _rhs(f + dt * k3, field, plan, step)
    with np.errstate(over="ignore", invalid="ignore"):
        new = f + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(new)):
        raise EvolutionError(f"non-finite state after step {step}", step=step)
    return SpectralField(field.grid, new)


class MemorySink:
    """Collects records and snapshots in lists."""

    def __init__(self):
        self.records: list[ObservableRecord] = []
        self.snapshots: list[tuple[float, SpectralField]] = []

    def record(self, rec: ObservableRecord):
        self.records.append(rec)

    def snapshot(self, field: SpectralField, t: float):
        self.snapshots.append((t, field))

    def flush(self):
        pass


@dataclass
class RunResult:
    field: SpectralField
    records: list[ObservableRecord] = field(default_factory=list)


def run(initial: SpectralField, plan: KernelPlan, config: EvolutionConfig, sink=None) -> RunResult:
    """Integrate from t = 0 to ``config.t_end`` with fixed steps.

    The initial state is always recorded and snapshotted; later records and
    snapshots follow the configured cadence, and the final state is always
    recorded. On a non-finite state the sink is flushed before the error
    propagates.
    """
    sink = sink if sink is not None else MemorySink()
    records = []

    def emit(f, t):
        rec = observables(f, t)
        records.append(rec)
        sink.record(rec)

    f = initial
    t = 0.0
    emit(f, t)
    sink.snapshot(f, t)
    n = config.n_steps
    for step in range(1, n + 1):
        dt = min(config.dt, config.t_end - t) if step == n else config.dt
        try:
            f = rk4_step(f, plan, dt, step)
        except EvolutionError as exc:
            exc.last_good_t = t
            sink.flush()
            raise
        t = step * config.dt if step < n else config.t_end
        if step % config.record_every == 0 or step == n:
            emit(f, t)
        if config.snapshot_every and (step % config.snapshot_every == 0 or step == n):
            sink.snapshot(f, t)
        log.debug("step %d t=%.6g mass=%.16g", step, t, records[-1].mass)
    sink.flush()
    return RunResult(f, records)
