"""Finite oriented multigraphs and the admissibility predicates.

Vertices and edges keep the order in which they were declared; that order
is used for every tie-break downstream (edge enumeration, path sorting,
placement of pattern cycles).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import ParseError
from .exact_linalg import IntMatrix

TOKEN = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class Edge:
    name: str
    origin: str
    terminus: str


class MultiGraph:
    """Immutable multigraph; loops and parallel edges are allowed."""

    def __init__(self, name: str, vertices, edges):
        self.name = name
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.edges: tuple[Edge, ...] = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
        if not self.vertices:
            raise ValueError("a graph needs at least one vertex")
        for tok in (name, *self.vertices, *(e.name for e in self.edges)):
            if not TOKEN.match(tok):
                raise ValueError(f"invalid identifier {tok!r}")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex")
        if len({e.name for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edge")
        vset = set(self.vertices)
        for e in self.edges:
            if e.origin not in vset or e.terminus not in vset:
                raise ValueError(f"edge {e.name} has an undeclared endpoint")
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.edge_index = {e.name: i for i, e in enumerate(self.edges)}
        self._edge = {e.name: e for e in self.edges}
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.origin].append(e.name)
        self._out = {v: tuple(es) for v, es in out.items()}

    def edge(self, name: str) -> Edge:
        return self._edge[name]

    def has_edge(self, name: str) -> bool:
        return name in self._edge

    def origin(self, edge: str) -> str:
        return self._edge[edge].origin

    def terminus(self, edge: str) -> str:
        return self._edge[edge].terminus

    def out_edges(self, vertex: str) -> tuple[str, ...]:
        return self._out[vertex]

    @cached_property
    def _key(self):
        return (self.name, self.vertices, self.edges)

    @cached_property
    def _hash(self) -> int:
        return hash(self._key)

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, MultiGraph) and self._key == other._key)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"MultiGraph({self.name!r}, {len(self.vertices)} vertices, {len(self.edges)} edges)"


def adjacency_matrix(g: MultiGraph) -> IntMatrix:
    n = len(g.vertices)
    counts = [0] * (n * n)
    for e in g.edges:
        counts[g.vertex_index[e.origin] * n + g.vertex_index[e.terminus]] += 1
    return IntMatrix(n, n, tuple(counts))


def _reachable_by_positive_path(g: MultiGraph, start: str) -> set[str]:
    seen: set[str] = set()
    queue = deque(g.terminus(e) for e in g.out_edges(start))
    while queue:
        v = queue.popleft()
        if v in seen:
            continue
        seen.add(v)
        queue.extend(g.terminus(e) for e in g.out_edges(v))
    return seen


def is_diconnected(g: MultiGraph) -> bool:
    """Every ordered vertex pair (including v, v) is joined by a path of length >= 1."""
    everything = set(g.vertices)
    return all(_reachable_by_positive_path(g, v) == everything for v in g.vertices)


def is_non_circular(g: MultiGraph) -> bool:
    """True unless the adjacency matrix is a permutation matrix."""
    m = adjacency_matrix(g).to_rows()
    if any(x not in (0, 1) for row in m for x in row):
        return True
    return not (all(sum(row) == 1 for row in m) and all(sum(col) == 1 for col in zip(*m)))


def is_admissible(g: MultiGraph) -> bool:
    return is_diconnected(g) and is_non_circular(g)


def matui_graph(d: int, k: int) -> MultiGraph:
    """Cycle ``v1 -> ... -> vk`` closed by d parallel edges ``vk -> v1``.

    Its topological full group is the Higman-Thompson group V_{d,k}.
    """
    if d < 2 or k < 1:
        raise ValueError(f"matui_graph needs d >= 2 and k >= 1, got d={d}, k={k}")
    vertices = [f"v{i}" for i in range(1, k + 1)]
    edges = [Edge(f"c{i}", vertices[i - 1], vertices[i]) for i in range(1, k)]
    edges += [Edge(f"b{j}", vertices[-1], vertices[0]) for j in range(1, d + 1)]
    return MultiGraph(f"matui_d{d}_k{k}", vertices, edges)


def mp_graph(p: int) -> MultiGraph:
    """Two vertices with adjacency ``[[1, 1], [1, p]]`` (p loops at the second)."""
    if p < 1:
        raise ValueError("p must be positive")
    edges = [Edge("a", "1", "1"), Edge("b", "1", "2"), Edge("c", "2", "1")]
    edges += [Edge(f"l{i}", "2", "2") for i in range(1, p + 1)]
    return MultiGraph(f"m{p}", ["1", "2"], edges)


def loops_graph(n: int, vertex: str = "a") -> MultiGraph:
    """One vertex with n loops; n = 2 gives Thompson's group V."""
    return MultiGraph(f"r{n}", [vertex], [Edge(f"x{i}", vertex, vertex) for i in range(1, n + 1)])


def to_dot(g: MultiGraph) -> str:
    lines = [f"digraph {g.name} {{"]
    lines += [f"  {e.origin} -> {e.terminus} [label={e.name}];" for e in g.edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str, source: str = "<string>") -> MultiGraph:
    """Parse the line-oriented graph format (``graph``/``vertex``/``edge`` lines)."""
    name = None
    vertices: list[str] = []
    vertex_set: set[str] = set()
    edges: list[Edge] = []
    edge_names: set[str] = set()
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if name is None:
            if kw != "graph" or len(parts) != 2:
                raise ParseError("first line must be 'graph <name>'", source, no)
            name = parts[1]
            if not TOKEN.match(name):
                raise ParseError(f"invalid graph name {name!r}", source, no)
            continue
        if kw == "vertex":
            if len(parts) != 2 or not TOKEN.match(parts[1]):
                raise ParseError("expected 'vertex <vid>'", source, no)
            if edges:
                raise ParseError("vertex lines must precede edge lines", source, no)
            if parts[1] in vertex_set:
                raise ParseError(f"duplicate vertex {parts[1]!r}", source, no)
            vertex_set.add(parts[1])
            vertices.append(parts[1])
        elif kw == "edge":
            if len(parts) != 4 or not TOKEN.match(parts[1]):
                raise ParseError("expected 'edge <eid> <origin> <terminus>'", source, no)
            _, eid, o, t = parts
            if eid in edge_names:
                raise ParseError(f"duplicate edge {eid!r}", source, no)
            for v in (o, t):
                if v not in vertex_set:
                    raise ParseError(f"edge {eid!r} uses undeclared vertex {v!r}", source, no)
            edge_names.add(eid)
            edges.append(Edge(eid, o, t))
        else:
            raise ParseError(f"unknown keyword {kw!r}", source, no)
    if name is None:
        raise ParseError("missing 'graph <name>' line", source)
    if not vertices:
        raise ParseError("graph has no vertices", source)
    return MultiGraph(name, vertices, edges)


def format_graph(g: MultiGraph) -> str:
    lines = [f"graph {g.name}"]
    lines += [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e.name} {e.origin} {e.terminus}" for e in g.edges]
    return "\n".join(lines) + "\n"
