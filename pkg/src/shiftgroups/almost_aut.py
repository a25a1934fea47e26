"""Colour-preserving almost automorphisms of the unfolding tree.

An element is a finite list of prefix exchanges ``(domain, range)``: every
infinite path ``domain . s`` is sent to ``range . s``.  The domains and the
ranges each partition the restriction Y, and each pair ends at the same
vertex, so the suffix s is carried verbatim.  That verbatim suffix is the
colour preservation: child edges keep their edge ids below the leaves.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .errors import InvalidClopen, InvalidElement, InvalidPath, ParseError, RestrictionMismatch
from .multigraph import MultiGraph
from .perm import Perm
from .shift_space import (BoundaryPoint, ClopenSet, Path, children, coarsen, extend, format_clopen_paths,
                          format_path, full_space, is_antichain, is_complete_antichain, is_prefix,
                          make_path, parent, parse_clopen_paths, parse_path, path_key, paths_of_length,
                          prefixes, same_set, terminus)


@dataclass(frozen=True)
class PrefixExchange:
    graph: MultiGraph
    restriction: ClopenSet
    pairs: tuple[tuple[Path, Path], ...]

    def __post_init__(self):
        g = self.graph
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs, key=lambda pr: path_key(g, pr[0]))))

    @property
    def domains(self) -> list[Path]:
        return [d for d, _ in self.pairs]

    @property
    def ranges(self) -> list[Path]:
        return [r for _, r in self.pairs]

    @property
    def depth(self) -> int:
        return max((max(len(d.edges), len(r.edges)) for d, r in self.pairs), default=0)

    def as_dict(self) -> dict[Path, Path]:
        return dict(self.pairs)

    def __str__(self) -> str:
        return format_element(self)


@dataclass(frozen=True)
class BisectionTable:
    """Triples ``(range, cocycle, domain)`` with cocycle = |domain| - |range|."""

    triples: tuple[tuple[Path, int, Path], ...]


@dataclass(frozen=True)
class LocalPermMap:
    """Tree-automorphism data: the nonidentity local permutations.

    ``top`` records where the top-level cylinders of the restriction go
    (only those that move); ``perms`` maps a node to the permutation of the
    out-edges of its terminus that the element induces on its children.
    """

    top: dict = field(default_factory=dict)
    perms: dict = field(default_factory=dict)

    @property
    def support(self) -> set[Path]:
        return set(self.perms)


def element(g: MultiGraph, pairs, restriction: ClopenSet | None = None) -> PrefixExchange:
    """Build and validate an element; raises InvalidElement listing every problem."""
    y = coarsen(restriction) if restriction is not None else full_space(g)
    e = PrefixExchange(g, y, tuple((d, r) for d, r in pairs))
    problems = validate(e)
    if problems:
        raise InvalidElement(problems)
    return e


def identity(g: MultiGraph, restriction: ClopenSet | None = None) -> PrefixExchange:
    y = coarsen(restriction) if restriction is not None else full_space(g)
    return PrefixExchange(g, y, tuple((p, p) for p in y.antichain))


def validate(e: PrefixExchange) -> list[str]:
    """Every violated invariant, as a list of messages (empty when valid)."""
    g = e.graph
    problems = []
    for side, paths in (("domain", e.domains), ("range", e.ranges)):
        try:
            for p in paths:
                make_path(g, p.edges, p.anchor)
        except InvalidPath as exc:
            problems.append(f"invalid {side} path: {exc}")
            continue
        if not is_antichain(paths):
            problems.append(f"{side} paths are not an antichain")
        elif not is_complete_antichain(g, paths, e.restriction):
            problems.append(f"incomplete {side} antichain")
    for d, r in e.pairs:
        try:
            if terminus(g, d) != terminus(g, r):
                problems.append(f"label mismatch: {format_path(d)} ends at {terminus(g, d)}, "
                                f"{format_path(r)} ends at {terminus(g, r)}")
        except KeyError:
            pass
    return problems


def _require_valid(e: PrefixExchange):
    problems = validate(e)
    if problems:
        raise InvalidElement(problems)


def expand_at(e: PrefixExchange, domain_leaf: Path) -> PrefixExchange:
    """Simple expansion at a domain leaf: same map, one level finer there."""
    mapping = e.as_dict()
    if domain_leaf not in mapping:
        raise InvalidElement([f"{format_path(domain_leaf)} is not a domain path"])
    target = mapping.pop(domain_leaf)
    for e_out in e.graph.out_edges(terminus(e.graph, domain_leaf)):
        mapping[extend(domain_leaf, (e_out,))] = extend(target, (e_out,))
    return replace(e, pairs=tuple(mapping.items()))


def _contract(g: MultiGraph, mapping: dict[Path, Path]) -> dict[Path, Path]:
    mapping = dict(mapping)
    while True:
        parents = {parent(d) for d in mapping if d.edges}
        changed = False
        for par in sorted(parents, key=lambda p: (-len(p.edges), path_key(g, p))):
            kids = children(g, par)
            if not all(k in mapping for k in kids):
                continue
            imgs = [mapping[k] for k in kids]
            if not all(r.edges for r in imgs):
                continue
            rpar = parent(imgs[0])
            if all(r.edges[-1] == k.edges[-1] and parent(r) == rpar for r, k in zip(imgs, kids)):
                for k in kids:
                    del mapping[k]
                mapping[par] = rpar
                changed = True
        if not changed:
            return mapping


def canonicalize(e: PrefixExchange) -> PrefixExchange:
    """The minimal representative: merge complete sibling families to a fixpoint.

    A family ``(delta.d, delta'.d)`` over every out-edge d of the common
    terminus is replaced by ``(delta, delta')``; deepest families first.
    """
    _require_valid(e)
    return replace(e, pairs=tuple(_contract(e.graph, e.as_dict()).items()))


def _same_space(f: PrefixExchange, g: PrefixExchange):
    if f.graph != g.graph:
        raise RestrictionMismatch(f"elements over different graphs ({f.graph.name}, {g.graph.name})")
    if f.restriction != g.restriction:
        raise RestrictionMismatch("elements with different restrictions")


def compose(f: PrefixExchange, g: PrefixExchange) -> PrefixExchange:
    """The element ``f o g`` (g acts first)."""
    _same_space(f, g)
    fmap = f.as_dict()
    under: dict[Path, list[Path]] = defaultdict(list)
    for q in fmap:
        for pre in prefixes(q):
            under[pre].append(q)
    out = []
    for d, r in g.pairs:
        hit = next((q for q in prefixes(r) if q in fmap), None)
        if hit is not None:
            out.append((d, extend(fmap[hit], r.edges[len(hit.edges):])))
            continue
        below = under.get(r)
        if not below:
            raise InvalidElement([f"range path {format_path(r)} is outside the other domain"])
        for q in below:
            out.append((extend(d, q.edges[len(r.edges):]), fmap[q]))
    return replace(g, pairs=tuple(_contract(g.graph, dict(out)).items()))


def invert(e: PrefixExchange) -> PrefixExchange:
    return canonicalize(replace(e, pairs=tuple((r, d) for d, r in e.pairs)))


def equals(e1: PrefixExchange, e2: PrefixExchange) -> bool:
    _same_space(e1, e2)
    return canonicalize(e1).pairs == canonicalize(e2).pairs


def is_identity(e: PrefixExchange) -> bool:
    return all(d == r for d, r in canonicalize(e).pairs)


def apply(e: PrefixExchange, p: BoundaryPoint) -> BoundaryPoint:
    """Image of a boundary point: swap its domain prefix for the paired range."""
    g = e.graph
    mapping = e.as_dict()
    origin = p.origin(g)
    for k in range(e.depth + 1):
        q = Path(origin, p.prefix(k))
        if q in mapping:
            rest = p.drop(k)
            return BoundaryPoint(mapping[q].edges + rest.preperiod, rest.period)
    raise InvalidElement([f"point {p} is outside the restriction"])


def image_of_cylinder(e: PrefixExchange, node: Path) -> Path | None:
    """The path c with e(Z(node)) = Z(c), or None if the image is not a cylinder."""
    g = e.graph
    mapping = e.as_dict()
    for q in prefixes(node):
        if q in mapping:
            return extend(mapping[q], node.edges[len(q.edges):])
    below = [q for q in mapping if is_prefix(node, q)]
    if not below:
        return None
    if not is_complete_antichain(g, below, ClopenSet(g, (node,))):
        return None
    imgs = [mapping[q] for q in below]
    anchor = imgs[0].anchor
    if any(r.anchor != anchor for r in imgs):
        return None
    n = min(len(r.edges) for r in imgs)
    lcp = 0
    while lcp < n and all(r.edges[lcp] == imgs[0].edges[lcp] for r in imgs):
        lcp += 1
    cyl = Path(anchor, imgs[0].edges[:lcp])
    if not is_complete_antichain(g, imgs, ClopenSet(g, (cyl,))):
        return None
    return cyl


def child_action(e: PrefixExchange, v: Path) -> Perm | None:
    """The permutation d -> d' of out-edges with e(Z(v.d)) = Z(v'.d'); None if undefined."""
    g = e.graph
    img = image_of_cylinder(e, v)
    if img is None or terminus(g, img) != terminus(g, v):
        return None
    mapping = {}
    for c in children(g, v):
        ic = image_of_cylinder(e, c)
        if ic is None or parent(ic) != img:
            return None
        mapping[c.edges[-1]] = ic.edges[-1]
    return Perm(mapping)


def is_automorphism(e: PrefixExchange) -> LocalPermMap | None:
    """Local-permutation description if e is level preserving, else None."""
    c = canonicalize(e)
    g = c.graph
    if any(len(d.edges) != len(r.edges) for d, r in c.pairs):
        return None
    top_nodes = set(c.restriction.antichain)
    top = {}
    for w in c.restriction.antichain:
        img = image_of_cylinder(c, w)
        if img is None or len(img.edges) != len(w.edges) or terminus(g, img) != terminus(g, w):
            return None
        if img != w:
            top[w] = img
    nodes = set()
    for d in c.domains:
        for q in prefixes(d)[:-1]:
            if any(t in top_nodes for t in prefixes(q)):
                nodes.add(q)
    perms = {}
    for node in sorted(nodes, key=lambda p: path_key(g, p)):
        img = image_of_cylinder(c, node)
        if img is None or len(img.edges) != len(node.edges):
            return None
        perm = child_action(c, node)
        if perm is None:
            return None
        if not perm.is_identity():
            perms[node] = perm
    return LocalPermMap(top, perms)


def from_local_permutations(g: MultiGraph, perms: dict[Path, Perm],
                            restriction: ClopenSet | None = None) -> PrefixExchange:
    """The tree automorphism with the given local permutations (identity elsewhere)."""
    y = coarsen(restriction) if restriction is not None else full_space(g)
    depth = max((len(p.edges) + 1 for p in perms), default=0)
    pairs = []
    for w in y.antichain:
        for p in paths_of_length(g, w, max(0, depth - len(w.edges))):
            img = list(p.edges[:len(w.edges)])
            for k in range(len(w.edges), len(p.edges)):
                node = Path(p.anchor, p.edges[:k])
                tau = perms.get(node)
                img.append(tau(p.edges[k]) if tau is not None else p.edges[k])
            pairs.append((p, Path(p.anchor, tuple(img))))
    return canonicalize(element(g, pairs, y))


def fixes_pointwise(e: PrefixExchange, t: ClopenSet) -> bool:
    """Does e map each cylinder Z(leaf), leaf in t, onto itself?"""
    if not same_set(t, e.restriction):
        raise InvalidClopen("t must be a complete antichain within the restriction")
    return all(image_of_cylinder(e, leaf) == leaf for leaf in t.antichain)


def to_bisection(e: PrefixExchange) -> BisectionTable:
    _require_valid(e)
    return BisectionTable(tuple((r, len(d.edges) - len(r.edges), d) for d, r in e.pairs))


def from_bisection(t: BisectionTable, g: MultiGraph, restriction: ClopenSet | None = None) -> PrefixExchange:
    problems = [f"cocycle {n} of {format_path(d)} -> {format_path(r)} is not |domain| - |range|"
                for r, n, d in t.triples if n != len(d.edges) - len(r.edges)]
    if problems:
        raise InvalidElement(problems)
    return canonicalize(element(g, ((d, r) for r, _, d in t.triples), restriction))


@lru_cache(maxsize=None)
def _antichain_count(g: MultiGraph, v: str, k: int) -> int:
    """Number of complete antichains below a node ending at v, at most k levels deep."""
    if k == 0:
        return 1
    prod = 1
    for e in g.out_edges(v):
        prod *= _antichain_count(g, g.terminus(e), k - 1)
    return 1 + prod


def _sample_antichain(g: MultiGraph, node: Path, k: int, rng: random.Random) -> list[Path]:
    v = terminus(g, node)
    if k == 0 or rng.randrange(_antichain_count(g, v, k)) == 0:
        return [node]
    return [p for c in children(g, node) for p in _sample_antichain(g, c, k - 1, rng)]


def random_element(g: MultiGraph, restriction: ClopenSet | None, depth: int, seed: int,
                   attempts: int = 1000) -> PrefixExchange:
    """A random element whose domain and range refine Y by at most `depth` levels.

    Domain and range antichains are uniform among complete antichains of
    that depth (the range conditioned on matching label counts, by
    rejection; after `attempts` misses the domain shape is reused), and
    the label-preserving bijection between them is uniform.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    y = coarsen(restriction) if restriction is not None else full_space(g)
    rng = random.Random(seed)
    key = lambda p: path_key(g, p)

    def sample():
        return [p for w in y.antichain for p in _sample_antichain(g, w, depth, rng)]

    dom = sorted(sample(), key=key)
    want = Counter(terminus(g, p) for p in dom)
    rng_paths = None
    for _ in range(attempts):
        cand = sample()
        if Counter(terminus(g, p) for p in cand) == want:
            rng_paths = sorted(cand, key=key)
            break
    if rng_paths is None:
        rng_paths = list(dom)
    by_label = defaultdict(list)
    for p in rng_paths:
        by_label[terminus(g, p)].append(p)
    for v in g.vertices:
        rng.shuffle(by_label[v])
    pairs = [(d, by_label[terminus(g, d)].pop()) for d in dom]
    return canonicalize(PrefixExchange(g, y, tuple(pairs)))


def parse_element(text: str, graphs: dict[str, MultiGraph], clopens: dict[str, ClopenSet] | None = None,
                  source: str = "<string>") -> PrefixExchange:
    """Parse ``element over <graph> [restrict <name>|[paths]]`` plus ``pair a -> b`` lines."""
    clopens = clopens or {}
    g = y = None
    pairs = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if g is None:
            parts = line.split(None, 4)
            if len(parts) < 3 or parts[0] != "element" or parts[1] != "over":
                raise ParseError("first line must be 'element over <graph> [restrict <clopen>]'", source, no)
            if parts[2] not in graphs:
                raise ParseError(f"unknown graph {parts[2]!r}", source, no)
            g = graphs[parts[2]]
            y = full_space(g)
            if len(parts) > 3:
                rest = line.split(None, 3)[3]
                kw, _, arg = rest.partition(" ")
                arg = arg.strip()
                if kw != "restrict" or not arg:
                    raise ParseError("expected 'restrict <clopen-name>'", source, no)
                if arg.startswith("[") and arg.endswith("]"):
                    y = parse_clopen_paths(g, arg[1:-1], source, no)
                elif arg in clopens:
                    y = clopens[arg]
                else:
                    raise ParseError(f"unknown clopen {arg!r}", source, no)
            continue
        kw, _, rest = line.partition(" ")
        lhs, arrow, rhs = rest.partition("->")
        if kw != "pair" or not arrow:
            raise ParseError("expected 'pair <path> -> <path>'", source, no)
        pairs.append((parse_path(g, lhs, source, no), parse_path(g, rhs, source, no)))
    if g is None:
        raise ParseError("missing 'element over <graph>' line", source)
    try:
        return element(g, pairs, y)
    except InvalidElement as exc:
        raise ParseError(f"invalid element: {exc}", source) from None


def format_element(e: PrefixExchange, restrict_name: str | None = None) -> str:
    """Serialise the canonical form."""
    c = canonicalize(e)
    head = f"element over {c.graph.name}"
    if c.restriction != full_space(c.graph):
        head += f" restrict {restrict_name}" if restrict_name else f" restrict [{format_clopen_paths(c.restriction)}]"
    lines = [head] + [f"pair {format_path(d)} -> {format_path(r)}" for d, r in c.pairs]
    return "\n".join(lines) + "\n"
