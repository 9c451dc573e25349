"""Run statistics, recomputed from a trace or accumulated by the engine."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .config import SimulationConfig
from .trace import Trace, atomic_write


class IncompleteTrace(ValueError):
    pass


@dataclass(frozen=True)
class FunctionStat:
    fid: str
    wait: int
    turnaround: int


@dataclass(frozen=True)
class RunStats:
    mode: str
    makespan: int
    throughput: float
    per_fpu_utilization: tuple[float, ...]
    per_function: tuple[FunctionStat, ...]
    decoded: int = 0
    dispatched: int = 0
    completed: int = 0
    integrated: int = 0
    peak_parallelism: int = 0
    per_fpu_busy: tuple[int, ...] = ()

    def to_report(self) -> dict:
        return {
            "mode": self.mode,
            "makespan": self.makespan,
            "throughput": self.throughput,
            "per_fpu_utilization": list(self.per_fpu_utilization),
            "per_function": [
                {"fid": s.fid, "wait": s.wait, "turnaround": s.turnaround} for s in self.per_function
            ],
            "peak_parallelism": self.peak_parallelism,
            "counts": {
                "decoded": self.decoded,
                "dispatched": self.dispatched,
                "completed": self.completed,
                "integrated": self.integrated,
            },
        }


def make_stats(mode, makespan, busy, per_function, decoded, dispatched, completed, integrated, peak) -> RunStats:
    """Common tail of both accounting routes, so the float arithmetic matches."""
    util = tuple(b / makespan if makespan else 0.0 for b in busy)
    return RunStats(
        mode=mode,
        makespan=makespan,
        throughput=integrated / makespan if makespan else 0.0,
        per_fpu_utilization=util,
        per_function=tuple(per_function),
        decoded=decoded,
        dispatched=dispatched,
        completed=completed,
        integrated=integrated,
        peak_parallelism=peak,
        per_fpu_busy=tuple(busy),
    )


def peak_from_intervals(intervals) -> int:
    """Max number of half-open ``[start, end)`` intervals covering one cycle."""
    points = []
    for start, end in intervals:
        points.append((start, 1))
        points.append((end, -1))
    points.sort()  # -1 sorts before +1 at equal cycles
    peak = cur = 0
    for _, d in points:
        cur += d
        peak = max(peak, cur)
    return peak


def compute_stats(trace: Trace, config: SimulationConfig, mode: str = "push") -> RunStats:
    """Derive run statistics from trace rows alone."""
    n_fpus = 1 if mode == "fetch" else config.total_fpus
    busy = [0] * n_fpus
    order: list[str] = []
    first_enqueue: dict[str, int] = {}
    last_enqueue: dict[str, int] = {}
    wait: dict[str, int] = {}
    completed_at: dict[str, int] = {}
    running: dict[str, int] = {}
    intervals = []
    dispatched = set()
    counts = dict.fromkeys(("decode", "complete", "integrate"), 0)
    makespan = 0

    for r in trace:
        if r.event in counts:
            counts[r.event] += 1
        if r.event == "decode":
            order.append(r.fid)
            wait[r.fid] = 0
        elif r.event == "enqueue":
            first_enqueue.setdefault(r.fid, r.cycle)
            last_enqueue[r.fid] = r.cycle
        elif r.event == "dispatch":
            dispatched.add(r.fid)
            wait[r.fid] += r.cycle - last_enqueue[r.fid]
            busy[r.fpu] += r.fields()["run"]
            running[r.fid] = r.cycle
        elif r.event in ("complete", "yield", "sleep"):
            intervals.append((running.pop(r.fid), r.cycle))
            if r.event == "complete":
                completed_at[r.fid] = r.cycle
        elif r.event == "integrate":
            makespan = max(makespan, r.cycle)

    if counts["integrate"] != len(order):
        raise IncompleteTrace(f"{len(order) - counts['integrate']} functions never integrated")

    per_function = [FunctionStat(fid, wait[fid], completed_at[fid] - first_enqueue[fid]) for fid in order]
    return make_stats(
        mode,
        makespan,
        busy,
        per_function,
        counts["decode"],
        len(dispatched),
        counts["complete"],
        counts["integrate"],
        peak_from_intervals(intervals),
    )


def write_report(report: dict, path) -> None:
    atomic_write(path, json.dumps(report, indent=2) + "\n")
