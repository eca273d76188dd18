"""Snapshot files, time-series CSV and the plot bundle.

Snapshot layout (little endian)::

    offset  size  field
    0       4     magic b"WKES"
    4       2     format version (uint16)
    6       2     d (uint16)
    8       4     N (uint32)
    12      8     S (float64)
    20      8     L (float64)
    28      8     t (float64)
    36      8     conv_mode, ASCII, NUL padded
    44      ...   N^d float64 values, row major (last axis fastest)
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evolve import ObservableRecord
from .grid import SpectralField, SpectralGrid

MAGIC = b"WKES"
VERSION = 1
_HEADER = struct.Struct("<4sHHIddd8s")


class SnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class SnapshotHeader:
    d: int
    N: int
    S: float
    L: float
    t: float
    conv_mode: str = "exact"
    version: int = VERSION


def encode_snapshot(field: SpectralField, t: float, conv_mode: str = "exact") -> bytes:
    g = field.grid
    mode = conv_mode.encode("ascii")
    if len(mode) > 8:
        raise SnapshotError(f"conv_mode {conv_mode!r} longer than 8 bytes")
    head = _HEADER.pack(MAGIC, VERSION, g.d, g.N, g.S, g.L, float(t), mode)
    return head + np.ascontiguousarray(field.values, dtype="<f8").tobytes()


def decode_snapshot(data: bytes) -> tuple[SnapshotHeader, SpectralField]:
    if len(data) < _HEADER.size:
        raise SnapshotError("truncated snapshot header")
    magic, version, d, N, S, L, t, mode = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    n = N**d
    payload = data[_HEADER.size:]
    if len(payload) != 8 * n:
        raise SnapshotError(f"payload has {len(payload)} bytes, expected {8 * n}")
    header = SnapshotHeader(d, N, S, L, t, mode.rstrip(b"\0").decode("ascii"), version)
    values = np.frombuffer(payload, dtype="<f8").reshape((N,) * d).astype(float)
    return header, SpectralField(SpectralGrid(d, N, S, L), values)


def write_snapshot(path, field: SpectralField, t: float, conv_mode: str = "exact") -> Path:
    path = Path(path)
    path.write_bytes(encode_snapshot(field, t, conv_mode))
    return path


def read_snapshot(path) -> tuple[SnapshotHeader, SpectralField]:
    return decode_snapshot(Path(path).read_bytes())


def _g(x: float) -> str:
    return format(float(x), ".17g")


def timeseries_columns(d: int) -> list[str]:
    return ["t", "mass"] + [f"momentum_{i + 1}" for i in range(d)] + ["energy", "linf", "l2", "neg_min"]


def record_row(rec: ObservableRecord) -> list[str]:
    return [_g(rec.t), _g(rec.mass), *map(_g, rec.momentum), _g(rec.energy), _g(rec.linf), _g(rec.l2), _g(rec.neg_min)]


def write_timeseries(path, records, d: int) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(timeseries_columns(d))
        for rec in records:
            w.writerow(record_row(rec))
    return path


def read_timeseries(path) -> list[dict[str, float]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_slice(path, field: SpectralField) -> Path:
    """Plot-bundle CSV: the full plane in 2D, the ``k_3 = 0`` plane in 3D."""
    g = field.grid
    vals = field.values if g.d == 2 else field.values[:, :, g.N // 2]
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["k1", "k2", "f"])
        for i, a in enumerate(g.nodes):
            for j, b in enumerate(g.nodes):
                w.writerow([_g(a), _g(b), _g(vals[i, j])])
    return path


class DirectorySink:
    """Writes ``timeseries.csv``, ``snapshots/*.wkes`` and ``plots/*.csv`` under one directory.

    The time series is rewritten on every flush so a failed run leaves the
    records gathered so far on disk.
    """

    def __init__(self, outdir, d: int, conv_mode: str = "exact"):
        self.outdir = Path(outdir)
        self.d = d
        self.conv_mode = conv_mode
        self.records: list[ObservableRecord] = []
        self.snapshot_paths: list[Path] = []
        try:
            (self.outdir / "snapshots").mkdir(parents=True, exist_ok=True)
            (self.outdir / "plots").mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {self.outdir}: {exc.strerror}") from exc

    def record(self, rec: ObservableRecord):
        self.records.append(rec)

    def snapshot(self, field: SpectralField, t: float):
        i = len(self.snapshot_paths)
        p = write_snapshot(self.outdir / "snapshots" / f"snap_{i:05d}.wkes", field, t, self.conv_mode)
        write_slice(self.outdir / "plots" / f"slice_{i:05d}.csv", field)
        self.snapshot_paths.append(p)

    def flush(self):
        write_timeseries(self.outdir / "timeseries.csv", self.records, self.d)
