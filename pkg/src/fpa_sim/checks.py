"""Scheduling invariants checked against a finished trace.

Every check works from trace rows plus the program and configuration, so it
can audit traces written by any tool that follows the CSV layout.
"""

from __future__ import annotations

from collections import defaultdict

from .config import SimulationConfig
from .funpiler import route
from .program import ProgramGraph
from .trace import Trace


def check_trace(trace: Trace, graph: ProgramGraph, config: SimulationConfig) -> dict[str, list[str]]:
    """Return violations grouped by invariant name (empty lists when clean)."""
    v = {
        "fifo": [],
        "level_precedence": [],
        "non_preemption": [],
        "dependency": [],
        "conservation": [],
        "commit_order": [],
        "kind_routing": [],
    }
    fpu_kind = config.fpu_kinds()
    waiting = defaultdict(list)  # (level, kind) -> fids in enqueue order
    level_of = {}
    occupant = {}
    completed_at = {}
    dispatched_now = []
    cycle = None

    def close_cycle(t):
        for fid, level in dispatched_now:
            kind = route(fid)
            for (lv, k), q in waiting.items():
                if k is kind and lv > level and q:
                    v["level_precedence"].append(f"cycle {t}: {fid} (level {level}) dispatched while {q[0]} (level {lv}) waits")
        dispatched_now.clear()

    for r in trace:
        if cycle is not None and r.cycle != cycle:
            close_cycle(cycle)
        if cycle is not None and r.cycle < cycle:
            v["conservation"].append(f"trace goes back in time at {r}")
        cycle = r.cycle

        if r.event == "enqueue":
            level = r.fields()["level"]
            level_of[r.fid] = level
            waiting[(level, route(r.fid))].append(r.fid)
        elif r.event == "dispatch":
            level = level_of.get(r.fid, r.fields().get("level"))
            q = waiting[(level, route(r.fid))]
            if r.fid not in q:
                v["fifo"].append(f"cycle {r.cycle}: {r.fid} dispatched without being queued")
            elif q[0] != r.fid:
                v["fifo"].append(f"cycle {r.cycle}: {r.fid} dispatched ahead of {q[0]}")
            if r.fid in q:
                q.remove(r.fid)
            dispatched_now.append((r.fid, level))
            if r.fpu in occupant:
                v["non_preemption"].append(f"cycle {r.cycle}: {r.fid} sent to FPU {r.fpu} held by {occupant[r.fpu]}")
            occupant[r.fpu] = r.fid
            if r.fpu >= len(fpu_kind) or fpu_kind[r.fpu] is not route(r.fid):
                v["kind_routing"].append(f"{r.fid} ran on FPU {r.fpu}")
            for p in graph.predecessors(r.name):
                if completed_at.get(p, r.cycle + 1) > r.cycle:
                    v["dependency"].append(f"cycle {r.cycle}: {r.name} dispatched before {p} completed")
        elif r.event in ("complete", "yield", "sleep"):
            if occupant.get(r.fpu) != r.fid:
                v["non_preemption"].append(f"cycle {r.cycle}: {r.fid} left FPU {r.fpu} it did not hold")
            occupant.pop(r.fpu, None)
            if r.event == "complete":
                completed_at[r.name] = r.cycle
    if cycle is not None:
        close_cycle(cycle)

    n = len(graph)
    counts = {e: len(trace.of(e)) for e in ("decode", "complete", "integrate")}
    counts["dispatched"] = len({r.fid for r in trace.of("dispatch")})
    for what, c in counts.items():
        if c != n:
            v["conservation"].append(f"{what} count {c} != {n}")
    committed = [r.name for r in trace.of("integrate")]
    if committed != graph.names:
        v["commit_order"].append(f"committed {committed} vs program order {graph.names}")
    return v


def violation_count(violations: dict[str, list[str]]) -> int:
    return sum(len(x) for x in violations.values())
