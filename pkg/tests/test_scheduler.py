import itertools

import pytest

from fpa_sim.funpiler import FID, FunctionInstance, FunctionState
from fpa_sim.fpu import FPUnit, Interconnect, LocalStore, begin_execution
from fpa_sim.program import FunctionKind, FunctionSpec, LevelOutOfRange, Mutability, PriorityDescriptor
from fpa_sim.scheduler import (
    AlreadyQueued,
    ImmutablePriority,
    MultilevelPriorityQueue,
    NotRunning,
    NotSleeping,
)

A, D = FunctionKind.ARITHMETIC, FunctionKind.DSP
_counter = itertools.count()


def ready(kind=A, level=1, static=False, cost=3, index=None):
    n = next(_counter) if index is None else index
    spec = FunctionSpec(
        f"f{n}", kind, cost, PriorityDescriptor(level, Mutability.STATIC if static else Mutability.DYNAMIC)
    )
    prefix = {A: "A", D: "D"}[kind]
    f = FunctionInstance(spec, FID(prefix, n + 1), n)
    f.transition(FunctionState.READY, 0)
    return f


def test_enqueue_into_empty_queue():
    q = MultilevelPriorityQueue(4)
    f = ready(level=2)
    q.enqueue(f, 0)
    assert q.level_contents(2) == [f]
    assert f.state is FunctionState.QUEUED and f.queued_at == 0
    assert f.enqueue_seq == 0


def test_enqueue_preserves_arrival_order():
    q = MultilevelPriorityQueue(4)
    f1, f2 = ready(), ready()
    q.enqueue(f1, 0)
    q.enqueue(f2, 0)
    assert q.level_contents(1) == [f1, f2]
    assert f1.enqueue_seq < f2.enqueue_seq


def test_enqueue_twice_rejected():
    q = MultilevelPriorityQueue(4)
    f = ready()
    q.enqueue(f, 0)
    with pytest.raises(AlreadyQueued):
        q.enqueue(f, 0)


def test_enqueue_level_out_of_range():
    q = MultilevelPriorityQueue(2)
    with pytest.raises(LevelOutOfRange):
        q.enqueue(ready(level=5), 0)


def test_dispatch_one_free_fpu_takes_head_only():
    q = MultilevelPriorityQueue(4)
    a1, a2 = ready(), ready()
    q.enqueue(a1, 0)
    q.enqueue(a2, 0)
    got = q.dispatch([(0, A)], 3)
    assert got == [(a1, 0)]
    assert a1.state is FunctionState.RUNNING and a1.dispatched_at == 3
    assert q.level_contents(1) == [a2]


def test_dispatch_system_level_wins():
    q = MultilevelPriorityQueue(8)
    user, system = ready(level=1), ready(level=7)
    q.enqueue(user, 0)
    q.enqueue(system, 0)
    assert q.dispatch([(0, A)], 0) == [(system, 0)]


def test_dispatch_skips_blocked_kind_without_head_of_line_blocking():
    q = MultilevelPriorityQueue(4)
    d, a = ready(kind=D), ready(kind=A)
    q.enqueue(d, 0)
    q.enqueue(a, 0)
    assert q.dispatch([(3, A)], 0) == [(a, 3)]
    assert q.level_contents(1) == [d]


def test_dispatch_uses_lowest_indexed_fpu():
    q = MultilevelPriorityQueue(4)
    a = ready()
    q.enqueue(a, 0)
    assert q.dispatch([(5, A), (2, A), (4, D)], 0) == [(a, 2)]


def per_kind_oracle(queue_items, free):
    """Each kind independently: its k queued functions in (level desc, arrival)
    order take that kind's free FPUs in ascending id order."""
    result = []
    for kind in (A, D):
        ids = sorted(i for i, k in free if k is kind)
        cands = sorted((f for f in queue_items if f.kind is kind), key=lambda f: (-f.priority.level, f.enqueue_seq))
        result += list(zip(cands, ids))
    return sorted(result, key=lambda p: (-p[0].priority.level, p[0].enqueue_seq))


def test_dispatch_matches_brute_force_over_small_configurations():
    fpus = [(0, A), (1, D), (2, A)]
    shapes = [(k, lv) for k in (A, D) for lv in (0, 1)]
    checked = 0
    for n in range(5):
        for items in itertools.product(shapes, repeat=n):
            for r in range(len(fpus) + 1):
                for free in itertools.combinations(fpus, r):
                    q = MultilevelPriorityQueue(2)
                    fs = [ready(kind=k, level=lv) for k, lv in items]
                    for f in fs:
                        q.enqueue(f, 0)
                    expect = per_kind_oracle(fs, free)
                    assert q.dispatch(list(free), 1) == expect
                    assert len(q) == len(fs) - len(expect)
                    checked += 1
    assert checked == sum(4**n for n in range(5)) * 8


def test_requeue_on_wake_goes_to_tail():
    q = MultilevelPriorityQueue(4)
    g, f = ready(level=2), ready(level=2)
    q.enqueue(f, 0)
    q.dispatch([(0, A)], 0)
    f.transition(FunctionState.SLEEPING, 4)
    q.enqueue(g, 5)
    q.requeue_on_wake(f, 9)
    assert q.level_contents(2) == [g, f]
    assert f.state is FunctionState.QUEUED and f.queued_at == 9


def test_requeue_on_wake_requires_sleeping():
    q = MultilevelPriorityQueue(4)
    with pytest.raises(NotSleeping):
        q.requeue_on_wake(ready(), 0)


def test_yield_frees_fpu_and_keeps_remaining():
    q = MultilevelPriorityQueue(4)
    f = ready(cost=5)
    fpu = FPUnit(0, A, LocalStore(resident=[f.name]))
    q.enqueue(f, 0)
    q.dispatch([(0, A)], 0)
    begin_execution(fpu, f, 0, Interconnect())
    f.remaining = 3
    q.yield_requeue(f, 2, fpu)
    assert fpu.current is None and fpu.is_idle(2)
    assert fpu.busy_cycles == 1  # hit lookup 1, then one executed cycle
    assert q.level_contents(1) == [f] and f.remaining == 3


def test_yielded_function_waits_behind_same_level_peer():
    q = MultilevelPriorityQueue(4)
    f, g = ready(), ready()
    q.enqueue(f, 0)
    q.dispatch([(0, A)], 0)
    q.enqueue(g, 1)
    q.yield_requeue(f, 2)
    assert q.dispatch([(0, A)], 2) == [(g, 0)]
    assert q.level_contents(1) == [f]


def test_yield_errors():
    q = MultilevelPriorityQueue(4)
    with pytest.raises(NotRunning):
        q.yield_requeue(ready(), 0)
    f = ready()
    q.enqueue(f, 0)
    q.dispatch([(0, A)], 0)
    f.remaining = 0
    with pytest.raises(NotRunning):
        q.yield_requeue(f, 1)


def test_set_dynamic_priority():
    q = MultilevelPriorityQueue(4)
    f = ready(level=1)
    q.set_dynamic_priority(f, 3)
    assert f.priority.level == 3
    with pytest.raises(ImmutablePriority):
        q.set_dynamic_priority(ready(level=3, static=True), 2)
    with pytest.raises(LevelOutOfRange):
        q.set_dynamic_priority(f, 4)


def test_set_dynamic_priority_moves_queued_function_to_tail():
    q = MultilevelPriorityQueue(4)
    f, g = ready(level=1), ready(level=3)
    q.enqueue(f, 0)
    q.enqueue(g, 0)
    q.set_dynamic_priority(f, 3)
    assert q.level_contents(1) == []
    assert q.level_contents(3) == [g, f]
    assert f.state is FunctionState.QUEUED
