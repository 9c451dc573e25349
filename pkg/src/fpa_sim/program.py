"""Function programs: typed function declarations, the text format, and the
dependency graph built from them.

A program is an ordered list of ``fn`` declarations, one per line::

    # comment
    fn f1 kind=dsp cost=5
    fn f2 kind=arith cost=3 prio=2 static size=4 iowait=6 after=f1

Keys after the name may appear in any order.  ``after=`` lists predecessors;
``yield=<k>`` asks the function to give up its FPU once after ``k`` executed
cycles.
"""

from __future__ import annotations

import enum
import graphlib
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

DEFAULT_PRIORITY_LEVELS = 8
DEFAULT_USER_LEVEL = 1

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


class FunctionKind(enum.Enum):
    ARITHMETIC = "arith"
    DSP = "dsp"
    GRAPHICS = "graphics"
    STRING = "string"
    IO = "io"
    SYSTEM = "system"

    @property
    def token(self) -> str:
        return self.value

    @classmethod
    def from_token(cls, token: str) -> "FunctionKind":
        try:
            return cls(token)
        except ValueError:
            raise UnknownKind(token) from None


class Mutability(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class PriorityDescriptor:
    level: int
    mutability: Mutability = Mutability.DYNAMIC

    @property
    def is_static(self) -> bool:
        return self.mutability is Mutability.STATIC

    def check_range(self, levels: int) -> None:
        if not 0 <= self.level < levels:
            raise LevelOutOfRange(self.level, levels)


def default_priority(kind: FunctionKind, levels: int = DEFAULT_PRIORITY_LEVELS) -> PriorityDescriptor:
    """System functions sit at the top level and cannot be moved; everything
    else starts at level 1 and may be adjusted later."""
    if kind is FunctionKind.SYSTEM:
        return PriorityDescriptor(levels - 1, Mutability.STATIC)
    return PriorityDescriptor(DEFAULT_USER_LEVEL, Mutability.DYNAMIC)


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    kind: FunctionKind
    cost: int
    priority: PriorityDescriptor = PriorityDescriptor(DEFAULT_USER_LEVEL)
    code_size: int = 1
    deps: tuple[str, ...] = ()
    io_wait: int = 0
    yield_after: Optional[int] = None

    def __post_init__(self):
        if self.cost < 1:
            raise ValueError(f"{self.name}: cost must be >= 1, got {self.cost}")
        if self.code_size < 0:
            raise ValueError(f"{self.name}: size must be >= 0")
        if self.io_wait < 0:
            raise ValueError(f"{self.name}: iowait must be >= 0")
        if self.yield_after is not None and not 1 <= self.yield_after < self.cost:
            raise ValueError(f"{self.name}: yield point must lie in [1, cost)")


# --- errors -----------------------------------------------------------------


class ProgramError(Exception):
    """Base class for everything that can go wrong building a program."""


class ParseError(ProgramError):
    pass


class ProgramSyntaxError(ParseError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateName(ParseError):
    def __init__(self, name: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}duplicate function name {name!r}")
        self.name = name
        self.line = line


class UnknownKind(ParseError):
    def __init__(self, token: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}unknown function kind {token!r}")
        self.token = token
        self.line = line


class UnknownDependency(ParseError):
    def __init__(self, name: str, dependent: Optional[str] = None):
        msg = f"unknown dependency {name!r}"
        if dependent is not None:
            msg += f" (required by {dependent!r})"
        super().__init__(msg)
        self.name = name
        self.dependent = dependent


class CycleDetected(ParseError):
    def __init__(self, nodes: list[str]):
        super().__init__("dependency cycle: " + " -> ".join(nodes + nodes[:1]))
        self.nodes = nodes


class UnknownName(ProgramError):
    def __init__(self, name: str):
        super().__init__(f"unknown function name {name!r}")
        self.name = name


class LevelOutOfRange(ProgramError):
    def __init__(self, level: int, levels: int):
        super().__init__(f"priority level {level} outside [0, {levels - 1}]")
        self.level = level
        self.levels = levels


# --- graph ------------------------------------------------------------------


@dataclass(frozen=True)
class ProgramGraph:
    """Validated dependency DAG; ``nodes`` keeps declaration order."""

    nodes: tuple[FunctionSpec, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)
    _preds: dict = field(default=None, init=False, repr=False, compare=False)
    _succs: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for i, spec in enumerate(self.nodes):
            if spec.name in index:
                raise DuplicateName(spec.name)
            index[spec.name] = i
        preds = {s.name: [] for s in self.nodes}
        succs = {s.name: [] for s in self.nodes}
        for a, b in self.edges:
            if a not in index:
                raise UnknownDependency(a, b)
            if b not in index:
                raise UnknownName(b)
            preds[b].append(a)
            succs[a].append(b)
        for name in succs:
            succs[name].sort(key=index.__getitem__)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_preds", {k: tuple(v) for k, v in preds.items()})
        object.__setattr__(self, "_succs", {k: tuple(v) for k, v in succs.items()})
        _check_acyclic(self)

    @classmethod
    def from_specs(cls, specs: Iterable[FunctionSpec]) -> "ProgramGraph":
        specs = tuple(specs)
        names = {s.name for s in specs}
        edges = []
        for s in specs:
            for d in s.deps:
                if d not in names:
                    raise UnknownDependency(d, s.name)
                edges.append((d, s.name))
        return cls(specs, tuple(edges))

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.nodes]

    def spec(self, name: str) -> FunctionSpec:
        return self.nodes[self.index_of(name)]

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownName(name) from None

    def predecessors(self, name: str) -> tuple[str, ...]:
        return self._preds[name]

    def successors(self, name: str) -> tuple[str, ...]:
        return self._succs[name]

    def topological_order(self) -> list[str]:
        """Kahn's algorithm, always taking the earliest-declared ready node."""
        done: set[str] = set()
        order = []
        while len(order) < len(self.nodes):
            ready = ready_set(self, done)
            order.append(ready[0])
            done.add(ready[0])
        return order


def _check_acyclic(graph: ProgramGraph) -> None:
    sorter = graphlib.TopologicalSorter({s.name: graph.predecessors(s.name) for s in graph.nodes})
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = list(exc.args[1][:-1])
        start = min(range(len(cycle)), key=lambda i: graph.index_of(cycle[i]))
        raise CycleDetected(cycle[start:] + cycle[:start]) from None


def critical_path_length(graph: ProgramGraph) -> int:
    """Longest root-to-sink path measured in summed service cost."""
    finish: dict[str, int] = {}
    for name in graph.topological_order():
        before = max((finish[p] for p in graph.predecessors(name)), default=0)
        finish[name] = before + graph.spec(name).cost
    return max(finish.values(), default=0)


def ready_set(graph: ProgramGraph, completed: Iterable[str]) -> list[str]:
    """Names not yet completed whose predecessors all are, in program order."""
    completed = set(completed)
    for name in completed:
        graph.index_of(name)
    return [
        s.name
        for s in graph.nodes
        if s.name not in completed and all(p in completed for p in graph.predecessors(s.name))
    ]


# --- text format ------------------------------------------------------------

_INT_KEYS = {"cost", "prio", "size", "iowait", "yield"}
_KNOWN_KEYS = _INT_KEYS | {"kind", "after"}


def parse_program(text: str, priority_levels: int = DEFAULT_PRIORITY_LEVELS) -> ProgramGraph:
    specs: list[FunctionSpec] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        spec = _parse_line(line, lineno, priority_levels)
        if spec.name in seen:
            raise DuplicateName(spec.name, lineno)
        seen[spec.name] = lineno
        specs.append(spec)
    return ProgramGraph.from_specs(specs)


def _parse_line(line: str, lineno: int, levels: int) -> FunctionSpec:
    tokens = line.split()
    if tokens[0] != "fn":
        raise ProgramSyntaxError(lineno, f"expected 'fn', got {tokens[0]!r}")
    if len(tokens) < 2 or "=" in tokens[1]:
        raise ProgramSyntaxError(lineno, "missing function name")
    name = tokens[1]
    if not _NAME_RE.match(name):
        raise ProgramSyntaxError(lineno, f"invalid function name {name!r}")

    values: dict[str, str] = {}
    static = False
    for tok in tokens[2:]:
        if tok == "static":
            if static:
                raise ProgramSyntaxError(lineno, "'static' given twice")
            static = True
            continue
        key, sep, value = tok.partition("=")
        if not sep or key not in _KNOWN_KEYS:
            raise ProgramSyntaxError(lineno, f"unknown field {tok!r}")
        if key in values:
            raise ProgramSyntaxError(lineno, f"field {key!r} given twice")
        if not value:
            raise ProgramSyntaxError(lineno, f"field {key!r} has no value")
        values[key] = value

    for required in ("kind", "cost"):
        if required not in values:
            raise ProgramSyntaxError(lineno, f"missing {required}=")

    try:
        kind = FunctionKind.from_token(values["kind"])
    except UnknownKind:
        raise UnknownKind(values["kind"], lineno) from None

    ints = {}
    for key in _INT_KEYS & values.keys():
        try:
            ints[key] = int(values[key])
        except ValueError:
            raise ProgramSyntaxError(lineno, f"{key}= expects an integer, got {values[key]!r}") from None

    if ints["cost"] < 1:
        raise ProgramSyntaxError(lineno, "cost must be >= 1")
    for key in ("size", "iowait"):
        if ints.get(key, 0) < 0:
            raise ProgramSyntaxError(lineno, f"{key} must be >= 0")

    if "prio" in ints:
        level = ints["prio"]
        if not 0 <= level < levels:
            raise ProgramSyntaxError(lineno, f"prio {level} outside [0, {levels - 1}]")
        priority = PriorityDescriptor(level, Mutability.STATIC if static else Mutability.DYNAMIC)
    else:
        priority = default_priority(kind, levels)
        if static:
            priority = PriorityDescriptor(priority.level, Mutability.STATIC)

    deps: tuple[str, ...] = ()
    if "after" in values:
        deps = tuple(values["after"].split(","))
        if any(not d for d in deps):
            raise ProgramSyntaxError(lineno, "empty name in after=")
        if len(set(deps)) != len(deps):
            raise ProgramSyntaxError(lineno, "repeated name in after=")

    yield_after = ints.get("yield")
    if yield_after is not None and not 1 <= yield_after < ints["cost"]:
        raise ProgramSyntaxError(lineno, "yield must lie in [1, cost)")

    return FunctionSpec(
        name=name,
        kind=kind,
        cost=ints["cost"],
        priority=priority,
        code_size=ints.get("size", 1),
        deps=deps,
        io_wait=ints.get("iowait", 0),
        yield_after=yield_after,
    )


def format_spec(spec: FunctionSpec) -> str:
    parts = [
        "fn",
        spec.name,
        f"kind={spec.kind.token}",
        f"cost={spec.cost}",
        f"prio={spec.priority.level}",
    ]
    if spec.priority.is_static:
        parts.append("static")
    parts.append(f"size={spec.code_size}")
    if spec.io_wait:
        parts.append(f"iowait={spec.io_wait}")
    if spec.yield_after is not None:
        parts.append(f"yield={spec.yield_after}")
    if spec.deps:
        parts.append("after=" + ",".join(spec.deps))
    return " ".join(parts)


def serialize_program(graph: ProgramGraph) -> str:
    """Inverse of :func:`parse_program`; every field is written explicitly."""
    return "".join(format_spec(s) + "\n" for s in graph.nodes)
