"""Run configuration: a flat ``key = value`` text format with dotted keys.

Example::

    # Example 3 of the 2D runs
    dimension = 2
    N = 64
    S = 3.0
    dt = 0.1
    t_end = 1.0
    ic.kind = bi_maxwellian
    ic.rho1 = 1.2

Lists are comma separated. ``ic.*`` keys are passed to the initial-condition
builder; ``bench.*`` keys configure the benchmark.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    dimension: int = 2
    N: int = 16
    N_r: int | None = None
    N_s: int | None = None
    N_sig: int | None = None
    S: float = 5.0
    L_factor: float | None = None
    conv_mode: str = "exact"
    dt: float = 0.1
    t_end: float = 1.0
    record_every: int = 1
    snapshot_every: int = 1
    output: str | None = None
    threads: int | None = None
    seed: int = 0
    ic: dict = field(default_factory=lambda: {"kind": "rayleigh_jeans"})
    bench: dict = field(default_factory=dict)

    @property
    def angular_default(self) -> int:
        return 12 if self.dimension == 2 else 6

    @property
    def n_r(self) -> int:
        return self.N if self.N_r is None else self.N_r

    @property
    def n_s(self) -> int:
        return self.angular_default if self.N_s is None else self.N_s

    @property
    def n_sig(self) -> int:
        return self.n_s if self.N_sig is None else self.N_sig

    @property
    def workers(self) -> int:
        if self.threads is not None:
            return self.threads
        env = os.environ.get("WAVEKIN_THREADS")
        if env:
            try:
                return max(1, int(env))
            except ValueError as exc:
                raise ConfigError(f"WAVEKIN_THREADS must be an integer, got {env!r}") from exc
        return 1


_SCALARS = {f.name: f for f in dataclasses.fields(RunConfig) if f.name not in ("ic", "bench")}
_GROUPS = ("ic", "bench")


def _coerce(name: str, text: str):
    tp = _SCALARS[name].type
    text = text.strip()
    optional = "None" in tp
    if optional and text == "":
        return None
    try:
        if tp.startswith("int"):
            return int(text)
        if tp.startswith("float"):
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r} as {tp}") from exc
    return text


def _group_value(text: str):
    text = text.strip()
    parts = [p.strip() for p in text.split(",")]
    vals = []
    for p in parts:
        try:
            vals.append(int(p) if p.lstrip("+-").isdigit() else float(p))
        except ValueError:
            return text
    return vals if len(vals) > 1 or "," in text else vals[0]


def set_key(cfg: RunConfig, key: str, value: str) -> None:
    key = key.strip()
    if "." in key:
        group, sub = key.split(".", 1)
        if group not in _GROUPS or not sub:
            raise ConfigError(f"unknown key {key!r}")
        getattr(cfg, group)[sub] = _group_value(value)
    elif key in _SCALARS:
        setattr(cfg, key, _coerce(key, value))
    else:
        raise ConfigError(f"unknown key {key!r}")


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    cfg = base if base is not None else RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        k, v = line.split("=", 1)
        try:
            set_key(cfg, k, v)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return cfg


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg: RunConfig) -> str:
    lines = [f"{name} = {_fmt(getattr(cfg, name))}".rstrip() for name in _SCALARS]
    for group in _GROUPS:
        for k in sorted(getattr(cfg, group)):
            lines.append(f"{group}.{k} = {_fmt(getattr(cfg, group)[k])}")
    return "\n".join(lines) + "\n"


def load_config(path, overrides=()) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        cfg = parse_config(text, cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        set_key(cfg, k, v)
    return cfg
