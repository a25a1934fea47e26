"""Patterns: a permutation group on the out-edges of each vertex.

A pattern assigns to every label (vertex of the graph) a group of
permutations of that vertex's out-edges which keeps each edge's terminus.
Its local prime content is the set of primes dividing the product of the
group orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from sympy.combinatorics import Permutation, PermutationGroup
from sympy.ntheory import primefactors

from .errors import InvalidClopen, ParseError
from .multigraph import MultiGraph
from .perm import Perm, closure_order, parse_cycles
from .shift_space import ClopenSet, Path, children, paths_of_length, terminus

DEFAULT_CLOSURE_CAP = 10**6


@dataclass(frozen=True)
class Pattern:
    graph: MultiGraph
    generators: tuple[tuple[str, tuple[Perm, ...]], ...]

    def __post_init__(self):
        g = self.graph
        gens = {}
        for v, perms in self.generators:
            if v not in g.vertex_index:
                raise ValueError(f"unknown label {v!r}")
            gens.setdefault(v, [])
            gens[v].extend(p for p in perms if not p.is_identity())
        for v, perms in gens.items():
            out = set(g.out_edges(v))
            for p in perms:
                if not p.support <= out:
                    raise ValueError(f"generator {p.to_text()} at {v} moves edges not leaving {v}")
                if any(g.terminus(x) != g.terminus(p(x)) for x in p.support):
                    raise ValueError(f"generator {p.to_text()} at {v} does not preserve termini")
        norm = tuple((v, tuple(gens[v])) for v in g.vertices if gens.get(v))
        object.__setattr__(self, "generators", norm)

    def gens(self, label: str) -> tuple[Perm, ...]:
        return dict(self.generators).get(label, ())

    @property
    def is_trivial(self) -> bool:
        return not self.generators


def trivial_pattern(g: MultiGraph) -> Pattern:
    return Pattern(g, ())


def pattern_group_order(pat: Pattern, label: str, cap: int = DEFAULT_CLOSURE_CAP) -> int:
    """|F_label|, by breadth-first closure (ClosureTooLarge above `cap`)."""
    if label not in pat.graph.vertex_index:
        raise ValueError(f"unknown label {label!r}")
    return closure_order(pat.graph.out_edges(label), pat.gens(label), cap)


def local_prime_content(pat: Pattern, cap: int = DEFAULT_CLOSURE_CAP) -> set[int]:
    total = math.prod(pattern_group_order(pat, v, cap) for v in pat.graph.vertices)
    return set(primefactors(total))


def pattern_from_edge_automorphisms(g: MultiGraph, gens: Sequence[Perm],
                                    cap: int = DEFAULT_CLOSURE_CAP) -> Pattern:
    """Pattern induced by graph automorphisms that fix every vertex.

    F_l is the restriction of the generated group to the out-edges of l.
    """
    for p in gens:
        for x in p.support:
            if not g.has_edge(x):
                raise ValueError(f"generator moves unknown edge {x!r}")
            if g.origin(x) != g.origin(p(x)) or g.terminus(x) != g.terminus(p(x)):
                raise ValueError(f"generator {p.to_text()} does not fix the endpoints of {x}")
    per_label = []
    for v in g.vertices:
        out = set(g.out_edges(v))
        restricted = [Perm({x: p(x) for x in p.support & out}) for p in gens]
        per_label.append((v, tuple(r for r in restricted if not r.is_identity())))
    pat = Pattern(g, tuple(per_label))
    whole = closure_order([e.name for e in g.edges], list(gens), cap)
    if set(primefactors(whole)) != local_prime_content(pat, cap):
        raise AssertionError("prime factors of the edge group and of the pattern differ")
    return pat


class FixIndex(NamedTuple):
    index: int
    verified: bool
    enumerated: int | None


def _level_group_order(g: MultiGraph, pat: Pattern, leaf: Path, nodes: list[Path], depth: int) -> int:
    points = paths_of_length(g, leaf, depth - len(leaf.edges))
    index = {p: i for i, p in enumerate(points)}
    gens = []
    for u in nodes:
        k = len(u.edges)
        for tau in pat.gens(terminus(g, u)):
            img = []
            for p in points:
                if p.edges[:k] == u.edges:
                    q = Path(p.anchor, p.edges[:k] + (tau(p.edges[k]),) + p.edges[k + 1:])
                    img.append(index[q])
                else:
                    img.append(index[p])
            gens.append(Permutation(img))
    if not gens:
        return 1
    return int(PermutationGroup(gens).order())


def fix_quotient_index(g: MultiGraph, pat: Pattern, t: ClopenSet, leaf: Path,
                       cap: int = DEFAULT_CLOSURE_CAP, max_points: int = 4096) -> FixIndex:
    """``[Fix_P(T) : Fix_P(T')]`` for T' the simple expansion of T at `leaf`.

    The value is |F_l| with l the label of the leaf.  It is cross-checked by
    counting the depth-(|leaf|+2) supported patterned automorphisms fixing
    T and T' through their action on the paths two levels below the leaf
    (Schreier-Sims); the factors from the other leaves of T agree for T and
    T' and cancel, so only the subtree below the leaf is built.
    """
    if t.graph != g:
        raise InvalidClopen("T lives over a different graph")
    if leaf not in t.antichain:
        raise InvalidClopen(f"{leaf} is not a leaf of T")
    formula = pattern_group_order(pat, terminus(g, leaf), cap)
    depth = len(leaf.edges) + 2
    width = len(paths_of_length(g, leaf, 2))
    if width > max_points:
        return FixIndex(formula, False, None)
    kids = children(g, leaf)
    fix_t = _level_group_order(g, pat, leaf, [leaf] + kids, depth)
    fix_t2 = _level_group_order(g, pat, leaf, kids, depth)
    if fix_t % fix_t2:
        raise AssertionError("Fix(T') is not a subgroup of Fix(T)")
    ratio = fix_t // fix_t2
    return FixIndex(formula, ratio == formula, ratio)


def parse_pattern(g: MultiGraph, text: str, source: str = "<string>") -> Pattern:
    """Lines ``pattern <vertex>: (e1 e2 ...)(...)``, one generator per line."""
    gens: list[tuple[str, tuple[Perm, ...]]] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        parts = head.split()
        if not sep or len(parts) != 2 or parts[0] != "pattern":
            raise ParseError("expected 'pattern <vertex>: (<eid> ...)...'", source, no)
        perm = parse_cycles(body, source, no)
        gens.append((parts[1], (perm,)))
    try:
        return Pattern(g, tuple(gens))
    except ValueError as exc:
        raise ParseError(str(exc), source) from None


def format_pattern(pat: Pattern) -> str:
    g = pat.graph
    lines = []
    for v, perms in pat.generators:
        for p in perms:
            lines.append(f"pattern {v}: {p.to_text(g.out_edges(v))}")
    return "".join(line + "\n" for line in lines)
