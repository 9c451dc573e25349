"""FPU colony model: execution units, per-unit local stores, and the bus."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .funpiler import FunctionInstance, FunctionState, route
from .program import FunctionKind


class KindMismatch(ValueError):
    pass


class FpuBusy(RuntimeError):
    pass


@dataclass(frozen=True)
class Interconnect:
    per_word_latency: int = 1
    fixed_overhead: int = 2

    def transfer_time(self, words: int) -> int:
        return self.fixed_overhead + self.per_word_latency * words


@dataclass
class LocalStore:
    """LRU library of function bodies; ``resident[0]`` is most recently used."""

    capacity: int = 16
    hit_latency: int = 1
    resident: list = field(default_factory=list)

    def __post_init__(self):
        if self.capacity < 0:
            raise ValueError("capacity must be >= 0")
        del self.resident[self.capacity:]

    def preload(self, names: Iterable[str]) -> None:
        for name in names:
            if len(self.resident) >= self.capacity:
                break
            if name not in self.resident:
                self.resident.append(name)

    def __contains__(self, name: str) -> bool:
        return name in self.resident


def local_store_lookup(store: LocalStore, name: str, size: int, bus: Interconnect) -> tuple[int, bool, LocalStore]:
    """Return ``(latency, hit, store)``; ``store`` is updated in place."""
    if name in store.resident:
        store.resident.remove(name)
        store.resident.insert(0, name)
        return store.hit_latency, True, store
    latency = store.hit_latency + bus.transfer_time(size)
    if store.capacity > 0:
        store.resident.insert(0, name)
        del store.resident[store.capacity:]
    return latency, False, store


@dataclass(frozen=True)
class Segment:
    """One uninterrupted stay of a function on an FPU."""

    start: int
    lookup: int
    hit: bool
    cycles: int
    outcome: str  # "complete", "yield" or "sleep"

    @property
    def end(self) -> int:
        return self.start + self.lookup + self.cycles


@dataclass
class FPUnit:
    id: int
    kind: FunctionKind
    local_store: LocalStore = field(default_factory=LocalStore)
    busy_until: int = 0
    current: Optional[FunctionInstance] = None
    busy_cycles: int = 0
    segment: Optional[Segment] = None

    def is_idle(self, now: int) -> bool:
        return self.current is None and now >= self.busy_until

    def release(self, now: int) -> FunctionInstance:
        f = self.current
        if f is None:
            raise RuntimeError(f"FPU {self.id} has nothing to release")
        seg = self.segment
        self.busy_cycles += max(0, min(seg.cycles, now - seg.start - seg.lookup))
        self.busy_until = now
        self.current = None
        self.segment = None
        return f


def begin_execution(fpu: FPUnit, f: FunctionInstance, now: int, bus: Interconnect) -> Segment:
    """Start (or resume) ``f`` on ``fpu`` at cycle ``now``.

    The segment runs for the local-store lookup latency plus the remaining
    cost, or stops early at a pending yield point.  ``Segment.end`` is the
    cycle at which the FPU frees up again.
    """
    if route(f.fid) is not fpu.kind:
        raise KindMismatch(f"{f.fid} cannot run on {fpu.kind.token} FPU {fpu.id}")
    if not fpu.is_idle(now):
        raise FpuBusy(f"FPU {fpu.id} busy until {fpu.busy_until}")
    if f.state is FunctionState.QUEUED:
        f.transition(FunctionState.RUNNING, now)
    elif f.state is not FunctionState.RUNNING:
        raise RuntimeError(f"{f.fid} is {f.state.name}, cannot start executing")

    latency, hit, _ = local_store_lookup(fpu.local_store, f.spec.name, f.spec.code_size, bus)
    if f.yield_pending:
        cycles, outcome = f.spec.yield_after - f.executed, "yield"
    else:
        cycles = f.remaining
        outcome = "sleep" if f.sleep_pending else "complete"
    seg = Segment(now, latency, hit, cycles, outcome)
    fpu.current = f
    fpu.segment = seg
    fpu.busy_until = seg.end
    f.fpu = fpu.id
    return seg


def utilization(fpu: FPUnit, horizon: int) -> float:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return fpu.busy_cycles / horizon
