"""Multilevel functional priority queue with non-preemptive FIFO dispatch."""

from __future__ import annotations

import itertools
from collections import deque
from typing import Iterable

from .funpiler import FunctionInstance, FunctionState, route
from .program import DEFAULT_PRIORITY_LEVELS, LevelOutOfRange, PriorityDescriptor


class SchedulerError(RuntimeError):
    pass


class AlreadyQueued(SchedulerError):
    pass


class NotSleeping(SchedulerError):
    pass


class NotRunning(SchedulerError):
    pass


class ImmutablePriority(SchedulerError):
    pass


class MultilevelPriorityQueue:
    """Dispatch array of FIFO queues, one per priority level.

    Higher level index means higher priority.  Every insertion is stamped with
    a global sequence number so arrival order is recoverable across levels.
    """

    def __init__(self, levels: int = DEFAULT_PRIORITY_LEVELS):
        if levels < 1:
            raise ValueError("need at least one priority level")
        self.levels = [deque() for _ in range(levels)]
        self._seq = itertools.count()
        self._members: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, f: FunctionInstance) -> bool:
        return id(f) in self._members

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def level_contents(self, level: int) -> list[FunctionInstance]:
        return list(self.levels[level])

    def _append(self, f: FunctionInstance, now: int) -> None:
        if f in self:
            raise AlreadyQueued(f"{f.fid} is already queued")
        level = f.priority.level
        if not 0 <= level < self.num_levels:
            raise LevelOutOfRange(level, self.num_levels)
        f.transition(FunctionState.QUEUED, now)
        f.enqueue_seq = next(self._seq)
        self.levels[level].append(f)
        self._members[id(f)] = level

    def _remove(self, f: FunctionInstance) -> None:
        level = self._members.pop(id(f))
        self.levels[level].remove(f)

    def enqueue(self, f: FunctionInstance, now: int) -> None:
        """Append a Ready function to the tail of its level."""
        if f in self:
            raise AlreadyQueued(f"{f.fid} is already queued")
        if f.state is not FunctionState.READY:
            raise SchedulerError(f"{f.fid}: enqueue needs a Ready function, state is {f.state.name}")
        self._append(f, now)

    def requeue_on_wake(self, f: FunctionInstance, now: int) -> None:
        if f.state is not FunctionState.SLEEPING:
            raise NotSleeping(f"{f.fid} is {f.state.name}, not sleeping")
        self._append(f, now)

    def yield_requeue(self, f: FunctionInstance, now: int, fpu=None) -> None:
        """Give up the processor: free ``fpu`` (if given) and go to the back of
        the level.  Unexecuted cost stays in ``f.remaining``."""
        if f.state is not FunctionState.RUNNING or f.remaining <= 0:
            raise NotRunning(f"{f.fid} cannot yield (state {f.state.name}, remaining {f.remaining})")
        if fpu is not None:
            fpu.release(now)
        f.fpu = None
        self._append(f, now)

    def set_dynamic_priority(self, f: FunctionInstance, new_level: int) -> None:
        """Move a Dynamic function to ``new_level``.  A queued function goes
        to the tail of its new level; its state and queued_at are unchanged."""
        if not 0 <= new_level < self.num_levels:
            raise LevelOutOfRange(new_level, self.num_levels)
        if f.priority.is_static:
            raise ImmutablePriority(f"{f.fid} has a static priority")
        queued = f in self
        if queued:
            self._remove(f)
        f.priority = PriorityDescriptor(new_level, f.priority.mutability)
        if queued:
            f.enqueue_seq = next(self._seq)
            self.levels[new_level].append(f)
            self._members[id(f)] = new_level

    def dispatch(self, free_fpus: Iterable[tuple[int, object]], now: int) -> list[tuple[FunctionInstance, int]]:
        """Match queued functions to idle FPUs.

        Levels are scanned top-down and each level front-to-back.  A function
        takes the lowest-indexed idle FPU of its routed kind; if there is none it
        stays where it is and the scan moves on.
        """
        free: dict = {}
        for fpu_id, kind in sorted(free_fpus, key=lambda p: p[0]):
            free.setdefault(kind, []).append(fpu_id)
        matches = []
        for level in range(self.num_levels - 1, -1, -1):
            queue = self.levels[level]
            if not queue:
                continue
            kept = deque()
            for f in queue:
                ids = free.get(route(f.fid))
                if ids:
                    fpu_id = ids.pop(0)
                    del self._members[id(f)]
                    f.transition(FunctionState.RUNNING, now)
                    f.fpu = fpu_id
                    matches.append((f, fpu_id))
                else:
                    kept.append(f)
            self.levels[level] = kept
        return matches
