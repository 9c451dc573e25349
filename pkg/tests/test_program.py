import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpa_sim.program import (
    CycleDetected,
    DuplicateName,
    FunctionKind,
    FunctionSpec,
    Mutability,
    ProgramGraph,
    ProgramSyntaxError,
    UnknownDependency,
    UnknownKind,
    UnknownName,
    critical_path_length,
    parse_program,
    ready_set,
    serialize_program,
)
from fpa_sim.workload import random_program

DIAMOND = """\
fn a kind=arith cost=2
fn b kind=arith cost=4 after=a
fn c kind=dsp cost=1 after=a
fn d kind=arith cost=3 after=b,c
"""


@pytest.fixture
def diamond():
    return parse_program(DIAMOND)


def test_empty_program():
    g = parse_program("")
    assert len(g.nodes) == 0 and len(g.edges) == 0


def test_two_functions_with_edge():
    g = parse_program("fn f1 kind=dsp cost=5\nfn f2 kind=arith cost=3 after=f1")
    assert g.names == ["f1", "f2"]
    assert g.edges == (("f1", "f2"),)
    assert g.spec("f1").kind is FunctionKind.DSP
    assert g.spec("f2").cost == 3


def test_two_cycle_detected():
    with pytest.raises(CycleDetected) as exc:
        parse_program("fn a kind=arith cost=1 after=b\nfn b kind=arith cost=1 after=a")
    assert exc.value.nodes == ["a", "b"]


def test_three_cycle_reported_from_earliest_node_along_edges():
    text = "fn x kind=io cost=1\nfn a kind=arith cost=1 after=c\nfn b kind=arith cost=1 after=a\nfn c kind=arith cost=1 after=b"
    with pytest.raises(CycleDetected) as exc:
        parse_program(text)
    assert exc.value.nodes == ["a", "b", "c"]


def test_self_dependency_is_a_cycle():
    with pytest.raises(CycleDetected) as exc:
        parse_program("fn a kind=arith cost=1 after=a")
    assert exc.value.nodes == ["a"]


@pytest.mark.parametrize(
    "text, error",
    [
        ("fn a kind=arith cost=1\nfn a kind=dsp cost=2", DuplicateName),
        ("fn a kind=vector cost=1", UnknownKind),
        ("fn a kind=arith cost=1 after=zz", UnknownDependency),
        ("fn a kind=arith cost=1 colour=red", ProgramSyntaxError),
        ("fn a kind=arith", ProgramSyntaxError),
        ("fn a kind=arith cost=0", ProgramSyntaxError),
        ("fn a kind=arith cost=x", ProgramSyntaxError),
        ("func a kind=arith cost=1", ProgramSyntaxError),
        ("fn kind=arith cost=1", ProgramSyntaxError),
        ("fn a kind=arith cost=1 cost=2", ProgramSyntaxError),
        ("fn a kind=arith cost=1 prio=8", ProgramSyntaxError),
        ("fn a kind=arith cost=3 yield=3", ProgramSyntaxError),
        ("fn a kind=arith cost=1 size=-1", ProgramSyntaxError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_program(text)


def test_syntax_error_reports_line():
    with pytest.raises(ProgramSyntaxError) as exc:
        parse_program("# header\n\nfn a kind=arith cost=1\nfn b kind=arith bogus")
    assert exc.value.line == 4


def test_comments_blank_lines_and_free_field_order():
    g = parse_program("\n# c\nfn a cost=2 after=b kind=arith  # trailing\n\nfn b size=3 kind=string cost=1\n")
    assert g.names == ["a", "b"]
    assert g.spec("b").code_size == 3
    # forward reference is accepted when acyclic
    assert g.edges == (("b", "a"),)


def test_defaults():
    g = parse_program("fn u kind=arith cost=1\nfn s kind=system cost=1\nfn p kind=dsp cost=1 prio=4 static")
    u, s, p = g.nodes
    assert (u.priority.level, u.priority.mutability) == (1, Mutability.DYNAMIC)
    assert (s.priority.level, s.priority.mutability) == (7, Mutability.STATIC)
    assert (p.priority.level, p.priority.mutability) == (4, Mutability.STATIC)
    assert u.code_size == 1 and u.io_wait == 0 and u.yield_after is None


def test_system_default_tracks_level_count():
    g = parse_program("fn s kind=system cost=1", priority_levels=4)
    assert g.nodes[0].priority.level == 3


def test_critical_path_examples(diamond):
    assert critical_path_length(ProgramGraph()) == 0
    chain = parse_program("fn f1 kind=dsp cost=5\nfn f2 kind=arith cost=3 after=f1")
    assert critical_path_length(chain) == 8
    assert critical_path_length(diamond) == 9


def test_ready_set_examples(diamond):
    assert ready_set(diamond, set()) == ["a"]
    assert ready_set(diamond, {"a"}) == ["b", "c"]
    assert ready_set(diamond, {"a", "b"}) == ["c"]
    with pytest.raises(UnknownName):
        ready_set(diamond, {"nope"})


def brute_force_ready(graph, completed):
    out = []
    for s in graph.nodes:
        if s.name in completed:
            continue
        blocked = False
        for a, b in graph.edges:
            if b == s.name and a not in completed:
                blocked = True
        if not blocked:
            out.append(s.name)
    return out


def all_paths_cost(graph):
    """Enumerate every root-to-sink path explicitly."""
    roots = [s.name for s in graph.nodes if not graph.predecessors(s.name)]
    best = 0

    def walk(name, acc):
        nonlocal best
        acc += graph.spec(name).cost
        succ = graph.successors(name)
        if not succ:
            best = max(best, acc)
        for s in succ:
            walk(s, acc)

    for r in roots:
        walk(r, 0)
    return best


def test_ready_set_matches_brute_force_on_every_subset(diamond):
    names = diamond.names
    for r in range(len(names) + 1):
        for subset in itertools.combinations(names, r):
            assert ready_set(diamond, set(subset)) == brute_force_ready(diamond, set(subset))


graphs = st.builds(
    lambda seed, n, p, fwd: random_program(
        random.Random(seed), n, edge_prob=p, io_prob=0.3, yield_prob=0.3, prio_prob=0.5, forward_refs=fwd
    ),
    st.integers(0, 2**32 - 1),
    st.integers(0, 20),
    st.floats(0, 0.6),
    st.booleans(),
)
small_graphs = st.builds(
    lambda seed, n, p: random_program(random.Random(seed), n, edge_prob=p),
    st.integers(0, 2**32 - 1),
    st.integers(0, 12),
    st.floats(0, 0.6),
)


@given(graphs)
def test_round_trip(g):
    text = serialize_program(g)
    g2 = parse_program(text)
    assert g2 == g
    assert serialize_program(g2) == text


@given(graphs)
def test_ready_set_boundaries(g):
    assert ready_set(g, set(g.names)) == []
    assert ready_set(g, set()) == [s.name for s in g.nodes if not g.predecessors(s.name)]


@given(graphs, st.randoms(use_true_random=False))
def test_topological_completeness(g, rnd):
    done: set[str] = set()
    visits = []
    while True:
        ready = ready_set(g, done)
        if not ready:
            break
        pick = rnd.sample(ready, rnd.randint(1, len(ready)))
        visits += pick
        done |= set(pick)
    assert sorted(visits) == sorted(g.names)
    assert len(visits) == len(set(visits))


@settings(max_examples=60)
@given(small_graphs)
def test_critical_path_bounds_and_enumeration(g):
    cp = critical_path_length(g)
    costs = [s.cost for s in g.nodes]
    assert max(costs, default=0) <= cp <= sum(costs)
    assert cp == all_paths_cost(g)


def test_graph_rejects_dangling_edge():
    a = FunctionSpec("a", FunctionKind.ARITHMETIC, 1)
    with pytest.raises(UnknownDependency):
        ProgramGraph((a,), (("ghost", "a"),))
