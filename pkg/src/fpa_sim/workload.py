"""Random program generator for tests, sweeps and demos."""

from __future__ import annotations

import random
from typing import Optional, Sequence

from .program import (
    DEFAULT_PRIORITY_LEVELS,
    FunctionKind,
    FunctionSpec,
    Mutability,
    PriorityDescriptor,
    ProgramGraph,
    default_priority,
)


def random_program(
    rng: random.Random,
    n: int,
    kinds: Sequence[FunctionKind] = tuple(FunctionKind),
    max_cost: int = 10,
    edge_prob: float = 0.25,
    io_prob: float = 0.0,
    max_io_wait: int = 10,
    yield_prob: float = 0.0,
    prio_prob: float = 0.0,
    levels: int = DEFAULT_PRIORITY_LEVELS,
    max_size: int = 4,
    forward_refs: bool = False,
) -> ProgramGraph:
    """Draw an ``n``-function DAG.

    Edges always go from a lower to a higher index in a hidden topological
    order, so the result is acyclic.  With ``forward_refs`` the declaration
    order is shuffled, which yields dependencies on later-declared functions.
    """
    topo = [f"f{i}" for i in range(n)]
    deps = {name: [] for name in topo}
    for j in range(n):
        for i in range(j):
            if rng.random() < edge_prob:
                deps[topo[j]].append(topo[i])

    specs = []
    for name in topo:
        kind = rng.choice(list(kinds))
        cost = rng.randint(1, max_cost)
        priority = default_priority(kind, levels)
        if rng.random() < prio_prob:
            mut = Mutability.STATIC if rng.random() < 0.5 else Mutability.DYNAMIC
            priority = PriorityDescriptor(rng.randrange(levels), mut)
        io_wait = rng.randint(1, max_io_wait) if rng.random() < io_prob else 0
        yield_after: Optional[int] = None
        if cost >= 2 and rng.random() < yield_prob:
            yield_after = rng.randint(1, cost - 1)
        specs.append(
            FunctionSpec(
                name=name,
                kind=kind,
                cost=cost,
                priority=priority,
                code_size=rng.randint(0, max_size),
                deps=tuple(deps[name]),
                io_wait=io_wait,
                yield_after=yield_after,
            )
        )
    if forward_refs:
        rng.shuffle(specs)
    return ProgramGraph.from_specs(specs)


def independent_program(kind: FunctionKind, n: int, cost: int, prefix: str = "f") -> ProgramGraph:
    return ProgramGraph.from_specs(FunctionSpec(f"{prefix}{i}", kind, cost) for i in range(n))
