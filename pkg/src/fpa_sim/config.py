"""Simulation configuration and its ``key = value`` file format.

Example::

    # two arithmetic units and one of everything else
    fpus = arith:2, dsp:1, graphics:1, string:1, io:1, system:1
    decode_width = 4
    local_store_capacity = 8
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from .program import FunctionKind

DEFAULT_FPUS = (
    (FunctionKind.ARITHMETIC, 2),
    (FunctionKind.DSP, 2),
    (FunctionKind.GRAPHICS, 1),
    (FunctionKind.STRING, 1),
    (FunctionKind.IO, 1),
    (FunctionKind.SYSTEM, 1),
)

MODES = ("push", "fetch", "compare")


class ConfigError(ValueError):
    def __init__(self, line: Optional[int], message: str):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line
        self.message = message


@dataclass(frozen=True)
class SimulationConfig:
    fpus: tuple[tuple[FunctionKind, int], ...] = DEFAULT_FPUS
    decode_width: int = 8
    priority_levels: int = 8
    hit_latency: int = 1
    miss_per_word: int = 1
    bus_overhead: int = 2
    fetch_latency: int = 2
    local_store_capacity: int = 16
    mode: str = "push"
    strict_kinds: bool = True
    seed: int = 0  # reserved for stochastic workloads; the engine ignores it

    def __post_init__(self):
        self.validate()

    def validate(self, line: Optional[int] = None) -> None:
        kinds = [k for k, _ in self.fpus]
        if len(set(kinds)) != len(kinds):
            raise ConfigError(line, "fpus lists a kind more than once")
        if any(n < 0 for _, n in self.fpus):
            raise ConfigError(line, "FPU counts must be >= 0")
        if self.total_fpus < 1:
            raise ConfigError(line, "need at least one FPU")
        if self.decode_width < 1:
            raise ConfigError(line, "decode_width must be >= 1")
        if self.priority_levels < 2:
            raise ConfigError(line, "priority_levels must be >= 2")
        for name in ("hit_latency", "miss_per_word", "bus_overhead", "fetch_latency", "local_store_capacity"):
            if getattr(self, name) < 0:
                raise ConfigError(line, f"{name} must be >= 0")
        if self.mode not in MODES:
            raise ConfigError(line, f"mode must be one of {', '.join(MODES)}")
        if self.seed < 0:
            raise ConfigError(line, "seed must be unsigned")

    @property
    def total_fpus(self) -> int:
        return sum(n for _, n in self.fpus)

    def fpu_count(self, kind: FunctionKind) -> int:
        return dict(self.fpus).get(kind, 0)

    def fpu_kinds(self) -> list[FunctionKind]:
        """Kind of each FPU in id order."""
        return [k for k, n in self.fpus for _ in range(n)]

    def replace(self, **changes) -> "SimulationConfig":
        return dataclasses.replace(self, **changes)


def parse_fpus(value: str, line: Optional[int] = None) -> tuple[tuple[FunctionKind, int], ...]:
    out = []
    for item in value.split(","):
        item = item.strip()
        kind_tok, sep, count = item.partition(":")
        if not sep:
            raise ConfigError(line, f"expected kind:count, got {item!r}")
        try:
            kind = FunctionKind(kind_tok.strip())
        except ValueError:
            raise ConfigError(line, f"unknown FPU kind {kind_tok.strip()!r}") from None
        try:
            out.append((kind, int(count)))
        except ValueError:
            raise ConfigError(line, f"bad FPU count {count.strip()!r}") from None
    return tuple(out)


def format_fpus(fpus) -> str:
    return ",".join(f"{k.token}:{n}" for k, n in fpus)


_INT_FIELDS = {
    "decode_width",
    "priority_levels",
    "hit_latency",
    "miss_per_word",
    "bus_overhead",
    "fetch_latency",
    "local_store_capacity",
    "seed",
}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_config(text: str) -> SimulationConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        if key in values:
            raise ConfigError(lineno, f"{key} set twice")
        if key == "fpus":
            values[key] = parse_fpus(value, lineno)
        elif key in _INT_FIELDS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(lineno, f"{key} expects an integer, got {value!r}") from None
        elif key == "mode":
            values[key] = value
        elif key == "strict_kinds":
            if value.lower() in _TRUE:
                values[key] = True
            elif value.lower() in _FALSE:
                values[key] = False
            else:
                raise ConfigError(lineno, f"strict_kinds expects a boolean, got {value!r}")
        else:
            raise ConfigError(lineno, f"unknown key {key!r}")
        # validate eagerly so the error points at the offending line
        try:
            SimulationConfig(**values)
        except ConfigError as exc:
            raise ConfigError(lineno, exc.message) from None
    return SimulationConfig(**values) if values else SimulationConfig()


def load_config(path) -> SimulationConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(None, f"cannot open {path}: {exc.strerror}") from None
    return parse_config(text)


def format_config(config: SimulationConfig) -> str:
    lines = [f"fpus = {format_fpus(config.fpus)}"]
    for f in dataclasses.fields(config):
        if f.name == "fpus":
            continue
        value = getattr(config, f.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
