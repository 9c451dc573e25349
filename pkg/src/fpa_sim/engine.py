"""Discrete-event engine: decode, schedule, execute, sleep/wake, integrate.

Within one cycle events are handled in a fixed rank order: segment
completions, yield points, wakes, decode emits, ready transitions, and
finally a single dispatch scan.  Ties within a rank go by program index,
which is also FID decode order.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Optional

from .config import SimulationConfig
from .fpu import FPUnit, Interconnect, LocalStore, begin_execution
from .funpiler import FID, FunctionInstance, FunctionState, decode
from .program import FunctionKind, ProgramGraph
from .scheduler import MultilevelPriorityQueue
from .stats import FunctionStat, RunStats, make_stats
from .trace import Trace, format_detail


class SimulationError(RuntimeError):
    pass


class NoFpuForKind(SimulationError):
    def __init__(self, kind: FunctionKind):
        super().__init__(f"program uses {kind.token} functions but no {kind.token} FPU is configured")
        self.kind = kind


class Deadlock(SimulationError):
    def __init__(self, cycle: int, stuck: list[str]):
        super().__init__(f"no pending events at cycle {cycle}; unfinished: {', '.join(stuck)}")
        self.cycle = cycle
        self.stuck = stuck


class DoubleCommit(SimulationError):
    pass


class NoIoWait(SimulationError):
    pass


class EventKind(enum.IntEnum):
    COMPLETION = 0
    YIELD_POINT = 1
    WAKE = 2
    DECODE_EMIT = 3
    BECAME_READY = 4
    DISPATCH_SCAN = 5


@dataclass(frozen=True, order=True)
class Event:
    at: int
    kind: EventKind
    seq: int
    subject: Optional[FID] = field(default=None, compare=False)


class IntegrationBuffer:
    """Holds out-of-order completions and commits them in program order."""

    def __init__(self):
        self.next_commit_index = 0
        self.held: dict[int, FunctionInstance] = {}
        self.committed: list[FunctionInstance] = []

    def commit(self, f: FunctionInstance, now: int) -> list[FunctionInstance]:
        if f.index in self.held or f.index < self.next_commit_index:
            raise DoubleCommit(f"{f.fid} was already handed to the integration block")
        if f.state is not FunctionState.COMPLETED:
            raise SimulationError(f"{f.fid} is {f.state.name}; only completed functions integrate")
        self.held[f.index] = f
        delta = []
        while self.next_commit_index in self.held:
            g = self.held.pop(self.next_commit_index)
            g.transition(FunctionState.INTEGRATED, now)
            self.committed.append(g)
            delta.append(g)
            self.next_commit_index += 1
        return delta


def integrate_commit(buf: IntegrationBuffer, f: FunctionInstance, now: int) -> list[FunctionInstance]:
    return buf.commit(f, now)


def handle_sleep(f: FunctionInstance, now: int) -> Event:
    """Put ``f`` to sleep for its I/O wait and return the matching wake event.

    After waking it needs one more cycle on an FPU to finish.
    """
    if f.spec.io_wait <= 0:
        raise NoIoWait(f"{f.fid} has no I/O wait")
    f.transition(FunctionState.SLEEPING, now)
    f.sleep_pending = False
    f.remaining = 1
    return Event(now + f.spec.io_wait, EventKind.WAKE, f.index, f.fid)


class Simulation:
    """One push-mode run over a program.  Build it, call :meth:`run` once."""

    def __init__(self, graph: ProgramGraph, config: SimulationConfig):
        self.graph = graph
        self.config = config
        for spec in graph.nodes:
            spec.priority.check_range(config.priority_levels)
        if config.strict_kinds:
            for spec in graph.nodes:
                if config.fpu_count(spec.kind) == 0:
                    raise NoFpuForKind(spec.kind)

        self.bus = Interconnect(config.miss_per_word, config.bus_overhead)
        self.fpus: list[FPUnit] = []
        for i, kind in enumerate(config.fpu_kinds()):
            store = LocalStore(config.local_store_capacity, config.hit_latency)
            store.preload(s.name for s in graph.nodes if s.kind is kind)
            self.fpus.append(FPUnit(i, kind, store))

        self.queue = MultilevelPriorityQueue(config.priority_levels)
        self.integration = IntegrationBuffer()
        self.trace = Trace()
        self.instances = [inst for inst, _ in decode(graph, config.decode_width)]
        self._by_name = {f.name: f for f in self.instances}
        self._waiting_on = [len(graph.predecessors(f.name)) for f in self.instances]
        self._decoded = [False] * len(self.instances)
        self._events: list[Event] = []
        self._scans: set[int] = set()
        self.now = 0
        self.peak_parallelism = 0
        self._ran = False

    def _push(self, ev: Event) -> None:
        heapq.heappush(self._events, ev)

    def _emit(self, event: str, f: FunctionInstance, fpu: Optional[int] = None, detail: str = "") -> None:
        self.trace.emit(self.now, event, f.fid, f.name, fpu, detail)

    def _enqueued(self, f: FunctionInstance) -> None:
        self._emit("enqueue", f, detail=format_detail(level=f.priority.level))

    def run(self) -> tuple[RunStats, Trace]:
        if self._ran:
            raise SimulationError("a Simulation runs only once")
        self._ran = True
        for f in self.instances:
            self._push(Event(f.decode_time, EventKind.DECODE_EMIT, f.index, f.fid))

        handlers = {
            EventKind.COMPLETION: self._on_completion,
            EventKind.YIELD_POINT: self._on_yield,
            EventKind.WAKE: self._on_wake,
            EventKind.DECODE_EMIT: self._on_decode,
            EventKind.BECAME_READY: self._on_ready,
        }
        while self._events:
            ev = heapq.heappop(self._events)
            self.now = ev.at
            if ev.kind is EventKind.DISPATCH_SCAN:
                self._dispatch_scan()
                continue
            handlers[ev.kind](self.instances[ev.seq])
            if ev.at not in self._scans:
                self._scans.add(ev.at)
                self._push(Event(ev.at, EventKind.DISPATCH_SCAN, 0))

        stuck = [str(f.fid) for f in self.instances if f.state is not FunctionState.INTEGRATED]
        if stuck:
            raise Deadlock(self.now, stuck)
        return self.stats(), self.trace

    # -- handlers -------------------------------------------------------------

    def _on_decode(self, f: FunctionInstance) -> None:
        self._decoded[f.index] = True
        self._emit("decode", f)
        if self._waiting_on[f.index] == 0:
            self._push(Event(self.now, EventKind.BECAME_READY, f.index, f.fid))

    def _on_ready(self, f: FunctionInstance) -> None:
        f.transition(FunctionState.READY, self.now)
        self._emit("ready", f)
        self.queue.enqueue(f, self.now)
        self._enqueued(f)

    def _finish_segment(self, f: FunctionInstance) -> FPUnit:
        fpu = self.fpus[f.fpu]
        seg = fpu.segment
        f.executed += seg.cycles
        f.remaining -= seg.cycles
        return fpu

    def _on_completion(self, f: FunctionInstance) -> None:
        fpu = self._finish_segment(f)
        fpu.release(self.now)
        f.fpu = None
        if f.sleep_pending:
            wake = handle_sleep(f, self.now)
            self._push(wake)
            self._emit("sleep", f, fpu.id, format_detail(wake=wake.at))
            return

        f.transition(FunctionState.COMPLETED, self.now)
        self._emit("complete", f, fpu.id)
        for succ in self.graph.successors(f.name):
            g = self._by_name[succ]
            self._waiting_on[g.index] -= 1
            if self._waiting_on[g.index] == 0 and self._decoded[g.index]:
                self._push(Event(self.now, EventKind.BECAME_READY, g.index, g.fid))
        for g in integrate_commit(self.integration, f, self.now):
            self._emit("integrate", g, detail=format_detail(commit=g.index))

    def _on_yield(self, f: FunctionInstance) -> None:
        fpu = self._finish_segment(f)
        f.yield_pending = False
        self.queue.yield_requeue(f, self.now, fpu)
        self._emit("yield", f, fpu.id, format_detail(remaining=f.remaining))
        self._enqueued(f)

    def _on_wake(self, f: FunctionInstance) -> None:
        self._emit("wake", f)
        self.queue.requeue_on_wake(f, self.now)
        self._enqueued(f)

    def _dispatch_scan(self) -> None:
        free = [(u.id, u.kind) for u in self.fpus if u.is_idle(self.now)]
        if not free or not len(self.queue):
            return
        for f, fpu_id in self.queue.dispatch(free, self.now):
            seg = begin_execution(self.fpus[fpu_id], f, self.now, self.bus)
            self._emit(
                "dispatch",
                f,
                fpu_id,
                format_detail(level=f.priority.level, lookup=seg.lookup, hit=seg.hit, run=seg.cycles, end=seg.end),
            )
            kind = EventKind.YIELD_POINT if seg.outcome == "yield" else EventKind.COMPLETION
            self._push(Event(seg.end, kind, f.index, f.fid))
        running = sum(1 for u in self.fpus if u.current is not None)
        self.peak_parallelism = max(self.peak_parallelism, running)

    # -- accounting -------------------------------------------------------------

    def stats(self) -> RunStats:
        """Statistics accumulated online, independent of the trace rows."""
        makespan = max((f.integrated_at for f in self.instances), default=0)
        per_function = [
            FunctionStat(str(f.fid), f.total_wait, f.completed_at - f.first_queued_at) for f in self.instances
        ]
        return make_stats(
            "push",
            makespan,
            [u.busy_cycles for u in self.fpus],
            per_function,
            sum(self._decoded),
            sum(1 for f in self.instances if f.dispatch_count > 0),
            sum(1 for f in self.instances if f.completed_at is not None),
            len(self.integration.committed),
            self.peak_parallelism,
        )


def run(graph: ProgramGraph, config: SimulationConfig | None = None) -> tuple[RunStats, Trace]:
    """Simulate ``graph`` in push mode."""
    return Simulation(graph, config or SimulationConfig()).run()


def run_fetch_baseline(graph: ProgramGraph, config: SimulationConfig | None = None) -> tuple[RunStats, Trace]:
    """Single processor, program order, one function at a time.

    Each function pays ``fetch_latency`` before executing its cost, and an
    I/O wait stalls the processor since nothing else can run meanwhile.
    """
    config = config or SimulationConfig()
    trace = Trace()
    instances = [inst for inst, _ in decode(graph, 1)]
    busy = 0
    t = 0
    for f in instances:
        f.decode_time = t
        trace.emit(t, "decode", f.fid, f.name)
        f.transition(FunctionState.READY, t)
        trace.emit(t, "ready", f.fid, f.name)
        f.transition(FunctionState.QUEUED, t)
        trace.emit(t, "enqueue", f.fid, f.name, detail=format_detail(level=f.priority.level))
        f.transition(FunctionState.RUNNING, t)
        end = t + config.fetch_latency + f.spec.cost + f.spec.io_wait
        trace.emit(
            t,
            "dispatch",
            f.fid,
            f.name,
            0,
            format_detail(level=f.priority.level, lookup=config.fetch_latency, hit=False, run=f.spec.cost, end=end),
        )
        busy += f.spec.cost
        t = end
        f.transition(FunctionState.COMPLETED, t)
        trace.emit(t, "complete", f.fid, f.name, 0)
        f.transition(FunctionState.INTEGRATED, t)
        trace.emit(t, "integrate", f.fid, f.name, detail=format_detail(commit=f.index))

    per_function = [FunctionStat(str(f.fid), 0, f.completed_at - f.first_queued_at) for f in instances]
    n = len(instances)
    stats = make_stats("fetch", t, [busy], per_function, n, n, n, n, 1 if n else 0)
    return stats, trace


def compare(graph: ProgramGraph, config: SimulationConfig | None = None) -> tuple[dict, Trace, Trace]:
    """Run both modes on fresh state and report them side by side.

    ``ratio`` is fetch makespan over push makespan (how many times faster the
    push-fed farm finishes); it is ``None`` for an empty program.
    """
    config = config or SimulationConfig()
    push, push_trace = run(graph, config)
    fetch, fetch_trace = run_fetch_baseline(graph, config)
    ratio = fetch.makespan / push.makespan if push.makespan else None
    report = {
        "mode": "compare",
        "push_makespan": push.makespan,
        "fetch_makespan": fetch.makespan,
        "ratio": ratio,
        "push": push.to_report(),
        "fetch": fetch.to_report(),
    }
    return report, push_trace, fetch_trace
