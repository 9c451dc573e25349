"""Functional decoder and fine-decoding stage.

The decoder splits a program into function instances in program order; the
funpiler stamps each with a class-prefixed function ID (``A1``, ``D2``, ...)
whose prefix is the address that routes it to an FPU of the matching kind.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .program import FunctionKind, FunctionSpec, PriorityDescriptor, ProgramGraph

PREFIX = {
    FunctionKind.ARITHMETIC: "A",
    FunctionKind.DSP: "D",
    FunctionKind.GRAPHICS: "G",
    FunctionKind.STRING: "S",
    FunctionKind.IO: "I",
    FunctionKind.SYSTEM: "Y",
}
KIND_OF_PREFIX = {v: k for k, v in PREFIX.items()}


class UnknownPrefix(ValueError):
    def __init__(self, fid):
        super().__init__(f"FID {str(fid)!r} has no known kind prefix")
        self.fid = fid


class InvalidTransition(RuntimeError):
    def __init__(self, fid, old, new):
        super().__init__(f"{fid}: illegal state change {old.name} -> {new.name}")


@dataclass(frozen=True, order=True)
class FID:
    prefix: str
    sequence: int

    def __str__(self) -> str:
        return f"{self.prefix}{self.sequence}"

    @classmethod
    def parse(cls, text: str) -> "FID":
        if len(text) < 2 or not text[1:].isdigit() or int(text[1:]) < 1:
            raise UnknownPrefix(text)
        return cls(text[0], int(text[1:]))


class FidCounters(dict):
    """Per-kind sequence counters, all starting at zero."""

    def __init__(self):
        super().__init__({k: 0 for k in FunctionKind})


def assign_fid(kind: FunctionKind, counters: FidCounters) -> FID:
    counters[kind] += 1
    return FID(PREFIX[kind], counters[kind])


def route(fid) -> FunctionKind:
    """Map a FID (object or rendered string) back to the FPU kind it addresses."""
    prefix = fid.prefix if isinstance(fid, FID) else str(fid)[:1]
    try:
        return KIND_OF_PREFIX[prefix]
    except KeyError:
        raise UnknownPrefix(fid) from None


class FunctionState(enum.Enum):
    DECODED = "decoded"
    READY = "ready"
    QUEUED = "queued"
    RUNNING = "running"
    SLEEPING = "sleeping"
    COMPLETED = "completed"
    INTEGRATED = "integrated"


_S = FunctionState
# Running -> Queued is the yield path.
TRANSITIONS = {
    _S.DECODED: {_S.READY},
    _S.READY: {_S.QUEUED},
    _S.QUEUED: {_S.RUNNING},
    _S.RUNNING: {_S.SLEEPING, _S.QUEUED, _S.COMPLETED},
    _S.SLEEPING: {_S.QUEUED},
    _S.COMPLETED: {_S.INTEGRATED},
    _S.INTEGRATED: set(),
}


@dataclass(eq=False)
class FunctionInstance:
    """Run-time context of one decoded function: its FID, state and priority,
    plus the timestamps and progress counters the engine maintains."""

    spec: FunctionSpec
    fid: FID
    index: int
    decode_time: int = 0
    state: FunctionState = FunctionState.DECODED
    priority: PriorityDescriptor = None
    ready_at: Optional[int] = None
    queued_at: Optional[int] = None
    dispatched_at: Optional[int] = None
    completed_at: Optional[int] = None
    integrated_at: Optional[int] = None
    first_queued_at: Optional[int] = None
    remaining: int = 0
    executed: int = 0
    yield_pending: bool = False
    sleep_pending: bool = False
    total_wait: int = 0
    dispatch_count: int = 0
    enqueue_seq: Optional[int] = None
    fpu: Optional[int] = None
    history: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.priority is None:
            self.priority = self.spec.priority
        self.remaining = self.spec.cost
        self.yield_pending = self.spec.yield_after is not None
        self.sleep_pending = self.spec.io_wait > 0
        self.history.append((self.state, self.decode_time))

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def kind(self) -> FunctionKind:
        return self.spec.kind

    def transition(self, new: FunctionState, now: int) -> None:
        if new not in TRANSITIONS[self.state]:
            raise InvalidTransition(self.fid, self.state, new)
        last = self.history[-1][1]
        if now < last:
            raise ValueError(f"{self.fid}: time went backwards ({now} < {last})")
        self.state = new
        self.history.append((new, now))
        if new is FunctionState.READY:
            self.ready_at = now
        elif new is FunctionState.QUEUED:
            self.queued_at = now
            if self.first_queued_at is None:
                self.first_queued_at = now
        elif new is FunctionState.RUNNING:
            self.dispatched_at = now
            self.total_wait += now - self.queued_at
            self.dispatch_count += 1
        elif new is FunctionState.COMPLETED:
            self.completed_at = now
        elif new is FunctionState.INTEGRATED:
            self.integrated_at = now


def decode(graph: ProgramGraph, decode_width: int) -> list[tuple[FunctionInstance, int]]:
    """Split ``graph`` into instances in program order, ``decode_width`` per cycle."""
    if decode_width < 1:
        raise ValueError("decode_width must be >= 1")
    counters = FidCounters()
    out = []
    for i, spec in enumerate(graph.nodes):
        cycle = i // decode_width
        inst = FunctionInstance(spec=spec, fid=assign_fid(spec.kind, counters), index=i, decode_time=cycle)
        out.append((inst, cycle))
    return out
