"""Finite paths, clopen sets and eventually periodic points of X_g.

A finite path ``gamma`` stands for the cylinder ``Z(gamma)`` of infinite
paths that start with it; a length-0 path ``@v`` is the cylinder of all
infinite paths leaving v.  A clopen set is a finite antichain of such
paths (pairwise prefix-incomparable, hence disjoint cylinders).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidClopen, InvalidPath, ParseError
from .multigraph import MultiGraph


class Path(NamedTuple):
    """``anchor`` is the origin vertex; ``edges`` may be empty."""

    anchor: str
    edges: tuple[str, ...]

    def __str__(self) -> str:
        return format_path(self)


def vertex_path(v: str) -> Path:
    return Path(v, ())


def make_path(g: MultiGraph, edges: Sequence[str], anchor: str | None = None) -> Path:
    edges = tuple(edges)
    if not edges:
        if anchor is None or anchor not in g.vertex_index:
            raise InvalidPath(f"length-0 path needs a vertex of {g.name}, got {anchor!r}")
        return Path(anchor, ())
    for e in edges:
        if not g.has_edge(e):
            raise InvalidPath(f"unknown edge {e!r}")
    for a, b in zip(edges, edges[1:]):
        if g.terminus(a) != g.origin(b):
            raise InvalidPath(f"edges {a} and {b} do not compose")
    origin = g.origin(edges[0])
    if anchor is not None and anchor != origin:
        raise InvalidPath(f"path {'.'.join(edges)} does not start at {anchor}")
    return Path(origin, edges)


def terminus(g: MultiGraph, p: Path) -> str:
    return g.terminus(p.edges[-1]) if p.edges else p.anchor


def extend(p: Path, suffix: Sequence[str]) -> Path:
    """Concatenate edges onto p; the caller guarantees they compose."""
    return Path(p.anchor, p.edges + tuple(suffix))


def children(g: MultiGraph, p: Path) -> list[Path]:
    return [Path(p.anchor, p.edges + (e,)) for e in g.out_edges(terminus(g, p))]


def parent(p: Path) -> Path | None:
    """Parent in the unfolding tree; length-0 paths hang off the root (None)."""
    return Path(p.anchor, p.edges[:-1]) if p.edges else None


def is_prefix(p: Path, q: Path) -> bool:
    return p.anchor == q.anchor and q.edges[:len(p.edges)] == p.edges


def comparable(p: Path, q: Path) -> bool:
    return is_prefix(p, q) or is_prefix(q, p)


def prefixes(p: Path) -> list[Path]:
    """All prefixes of p, shortest (the anchor) first, p itself last."""
    return [Path(p.anchor, p.edges[:k]) for k in range(len(p.edges) + 1)]


def path_key(g: MultiGraph, p: Path):
    """Sort key: by length, then canonical edge order (vertex order at length 0)."""
    if not p.edges:
        return (0, (g.vertex_index[p.anchor],))
    return (len(p.edges), tuple(g.edge_index[e] for e in p.edges))


def paths_of_length(g: MultiGraph, start: Path, n: int) -> list[Path]:
    """All extensions of `start` by exactly n edges, in canonical order."""
    level = [start]
    for _ in range(n):
        level = [c for p in level for c in children(g, p)]
    return level


def shortest_route(g: MultiGraph, src: str, dst: str) -> tuple[str, ...]:
    """Edges of a shortest path of length >= 1 from src to dst (breadth first, canonical order)."""
    frontier = [(g.terminus(e), (e,)) for e in g.out_edges(src)]
    seen: set[str] = set()
    while frontier:
        nxt = []
        for v, route in frontier:
            if v == dst:
                return route
            if v in seen:
                continue
            seen.add(v)
            nxt.extend((g.terminus(e), route + (e,)) for e in g.out_edges(v))
        frontier = nxt
    raise InvalidPath(f"no path from {src} to {dst}")


def parse_path(g: MultiGraph, text: str, source: str = "<string>", line: int | None = None) -> Path:
    """``@a`` is the length-0 path at a; ``x.y.x`` lists edge ids."""
    text = text.strip()
    try:
        if text.startswith("@"):
            return make_path(g, (), anchor=text[1:])
        if not text:
            raise InvalidPath("empty path literal")
        return make_path(g, text.split("."))
    except InvalidPath as exc:
        raise ParseError(str(exc), source, line) from None


def format_path(p: Path) -> str:
    return ".".join(p.edges) if p.edges else f"@{p.anchor}"


def _check_paths(g: MultiGraph, paths: Iterable[Path]) -> list[Path]:
    out = []
    for p in paths:
        try:
            out.append(make_path(g, p.edges, p.anchor))
        except InvalidPath as exc:
            raise InvalidClopen(f"invalid path {format_path(p)}: {exc}") from None
    return out


def is_antichain(paths: Sequence[Path]) -> bool:
    seen = set(paths)
    if len(seen) != len(paths):
        return False
    for p in paths:
        for q in prefixes(p)[:-1]:
            if q in seen:
                return False
    return True


@dataclass(frozen=True)
class ClopenSet:
    graph: MultiGraph
    antichain: tuple[Path, ...]

    def __post_init__(self):
        paths = _check_paths(self.graph, self.antichain)
        if not is_antichain(paths):
            raise InvalidClopen("paths are not pairwise prefix-incomparable")
        object.__setattr__(self, "antichain", tuple(sorted(paths, key=lambda p: path_key(self.graph, p))))

    @property
    def is_empty(self) -> bool:
        return not self.antichain

    @property
    def depth(self) -> int:
        return max((len(p.edges) for p in self.antichain), default=0)

    def __iter__(self):
        return iter(self.antichain)

    def __len__(self) -> int:
        return len(self.antichain)

    def __str__(self) -> str:
        return format_clopen_paths(self)


def full_space(g: MultiGraph) -> ClopenSet:
    return ClopenSet(g, tuple(vertex_path(v) for v in g.vertices))


def empty_set(g: MultiGraph) -> ClopenSet:
    return ClopenSet(g, ())


def _covered(g: MultiGraph, node: Path, members: set[Path], depth: int) -> bool:
    """Is Z(node) contained in the union of the cylinders of `members`?"""
    if any(q in members for q in prefixes(node)):
        return True
    if len(node.edges) >= depth:
        return False
    return all(_covered(g, c, members, depth) for c in children(g, node))


def is_subset(a: ClopenSet, b: ClopenSet) -> bool:
    members = set(b.antichain)
    return all(_covered(a.graph, p, members, b.depth) for p in a.antichain)


def same_set(a: ClopenSet, b: ClopenSet) -> bool:
    return is_subset(a, b) and is_subset(b, a)


def is_complete_antichain(g: MultiGraph, paths: Sequence[Path], within: ClopenSet) -> bool:
    """Do the cylinders of `paths` partition the set `within`?"""
    paths = _check_paths(g, paths)
    if not is_antichain(paths):
        return False
    return same_set(ClopenSet(g, tuple(paths)), within)


def refine_at(c: ClopenSet, leaf: Path) -> ClopenSet:
    """Replace `leaf` by all its one-edge extensions; the set is unchanged."""
    if leaf not in c.antichain:
        raise InvalidClopen(f"{format_path(leaf)} is not a member of the antichain")
    kids = children(c.graph, leaf)
    if not kids:
        raise InvalidClopen(f"{format_path(leaf)} ends at a vertex without out-edges")
    return ClopenSet(c.graph, tuple(p for p in c.antichain if p != leaf) + tuple(kids))


def common_refinement(a: ClopenSet, b: ClopenSet) -> ClopenSet:
    """Coarsest antichain refining both; a and b must denote the same set."""
    if a.graph != b.graph:
        raise InvalidClopen("clopen sets over different graphs")
    if not same_set(a, b):
        raise InvalidClopen("common refinement needs equal sets")
    out = set()
    for p in a.antichain:
        for q in b.antichain:
            if is_prefix(p, q):
                out.add(q)
            elif is_prefix(q, p):
                out.add(p)
    return ClopenSet(a.graph, tuple(out))


def complement(c: ClopenSet, within: ClopenSet) -> ClopenSet:
    """Antichain for ``within \\ c``; c must be a subset of `within`."""
    if not is_subset(c, within):
        raise InvalidClopen("complement needs c to be a subset of within")
    g = c.graph
    members = set(c.antichain)
    depth = c.depth

    def rest(node: Path) -> list[Path]:
        if any(q in members for q in prefixes(node)):
            return []
        if len(node.edges) >= depth or not any(is_prefix(node, q) for q in members):
            return [node]
        return [r for k in children(g, node) for r in rest(k)]

    return ClopenSet(g, tuple(r for w in within.antichain for r in rest(w)))


def union(a: ClopenSet, b: ClopenSet) -> ClopenSet:
    """Union of two disjoint clopen sets."""
    return ClopenSet(a.graph, a.antichain + b.antichain)


def coarsen(c: ClopenSet) -> ClopenSet:
    """The coarsest antichain for the same set (merge complete sibling families)."""
    g = c.graph
    paths = set(c.antichain)
    changed = True
    while changed:
        changed = False
        for p in sorted(paths, key=lambda q: (-len(q.edges), path_key(g, q))):
            if p not in paths or not p.edges:
                continue
            par = parent(p)
            kids = children(g, par)
            if all(k in paths for k in kids):
                paths.difference_update(kids)
                paths.add(par)
                changed = True
    return ClopenSet(g, tuple(paths))


def parse_clopen_paths(g: MultiGraph, text: str, source: str = "<string>", line: int | None = None) -> ClopenSet:
    """Comma-separated path literals; ``X`` is the whole space."""
    text = text.strip()
    if text == "X":
        return full_space(g)
    paths = [parse_path(g, t, source, line) for t in text.split(",") if t.strip()]
    try:
        return ClopenSet(g, tuple(paths))
    except InvalidClopen as exc:
        raise ParseError(str(exc), source, line) from None


def format_clopen_paths(c: ClopenSet) -> str:
    return ", ".join(format_path(p) for p in c.antichain)


def parse_clopen_file(g: MultiGraph, text: str, source: str = "<string>") -> dict[str, ClopenSet]:
    """Lines ``clopen <name>: <path>, <path>, ...``; returns name -> set."""
    out: dict[str, ClopenSet] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        parts = head.split()
        if not sep or len(parts) != 2 or parts[0] != "clopen":
            raise ParseError("expected 'clopen <name>: <path>, ...'", source, no)
        name = parts[1]
        if name in out:
            raise ParseError(f"duplicate clopen name {name!r}", source, no)
        out[name] = parse_clopen_paths(g, body, source, no)
    return out


def format_clopen_file(named: dict[str, ClopenSet]) -> str:
    return "".join(f"clopen {name}: {format_clopen_paths(c)}\n" for name, c in named.items())


@dataclass(frozen=True)
class BoundaryPoint:
    """The infinite path ``preperiod . period . period . ...`` (edge ids).

    Stored in normal form: the period is primitive and the preperiod is as
    short as possible, so equality of points is equality of fields.
    """

    preperiod: tuple[str, ...]
    period: tuple[str, ...]

    def __post_init__(self):
        pre, per = normalize_point(tuple(self.preperiod), tuple(self.period))
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def prefix(self, n: int) -> tuple[str, ...]:
        """The first n edges."""
        out = list(self.preperiod[:n])
        while len(out) < n:
            need = n - len(out)
            out.extend(self.period[:need])
        return tuple(out)

    def drop(self, n: int) -> "BoundaryPoint":
        """Apply the shift n times."""
        pre, per = self.preperiod, self.period
        if n <= len(pre):
            return BoundaryPoint(pre[n:], per)
        k = (n - len(pre)) % len(per)
        return BoundaryPoint((), per[k:] + per[:k])

    def origin(self, g: MultiGraph) -> str:
        return g.origin((self.preperiod or self.period)[0])

    def __str__(self) -> str:
        return format_point(self)


def normalize_point(pre: tuple[str, ...], per: tuple[str, ...]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if not per:
        raise InvalidPath("period must be nonempty")
    n = len(per)
    for k in range(1, n + 1):
        if n % k == 0 and per[:k] * (n // k) == per:
            per = per[:k]
            break
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = per[-1:] + per[:-1]
    return pre, per


def make_point(g: MultiGraph, preperiod: Sequence[str], period: Sequence[str]) -> BoundaryPoint:
    pre, per = tuple(preperiod), tuple(period)
    if not per:
        raise InvalidPath("period must be nonempty")
    make_path(g, pre + per + per)
    return BoundaryPoint(pre, per)


def parse_point(g: MultiGraph, text: str, source: str = "<string>", line: int | None = None) -> BoundaryPoint:
    """``point <path-or-'-'> (<path>)``; the leading keyword is optional."""
    text = text.strip()
    if text.startswith("point"):
        text = text[len("point"):].strip()
    pre_text, sep, rest = text.partition("(")
    if not sep or not rest.rstrip().endswith(")"):
        raise ParseError(f"bad point literal {text!r}", source, line)
    pre_text = pre_text.strip()
    per_text = rest.rstrip()[:-1].strip()
    pre = () if pre_text in ("-", "") else tuple(pre_text.split("."))
    per = tuple(per_text.split(".")) if per_text else ()
    try:
        return make_point(g, pre, per)
    except InvalidPath as exc:
        raise ParseError(str(exc), source, line) from None


def format_point(p: BoundaryPoint) -> str:
    pre = ".".join(p.preperiod) if p.preperiod else "-"
    return f"point {pre} ({'.'.join(p.period)})"


def member(p: BoundaryPoint, c: ClopenSet) -> bool:
    g = c.graph
    for q in c.antichain:
        if q.edges:
            if p.prefix(len(q.edges)) == q.edges:
                return True
        elif p.origin(g) == q.anchor:
            return True
    return False


def shift(p: BoundaryPoint) -> BoundaryPoint:
    """Drop the first edge (rotating the period when there is no preperiod)."""
    return p.drop(1)
