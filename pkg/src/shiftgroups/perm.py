"""Finite permutations of hashable points, in cycle notation.

Only moved points are stored, so a permutation does not need to know its
full domain.  Products compose right to left: ``(a * b)(x) == a(b(x))``.
"""

from __future__ import annotations

import math
import re
from collections import deque
from typing import Hashable, Iterable, Sequence

from .errors import ClosureTooLarge, ParseError


class Perm:
    __slots__ = ("_map", "_key")

    def __init__(self, mapping: dict | None = None):
        mapping = {} if mapping is None else {a: b for a, b in mapping.items() if a != b}
        if sorted(map(repr, mapping)) != sorted(map(repr, mapping.values())):
            raise ValueError(f"not a bijection: {mapping!r}")
        self._map = mapping
        self._key = frozenset(mapping.items())

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[Hashable]]) -> "Perm":
        mapping: dict = {}
        for cyc in cycles:
            cyc = list(cyc)
            for a in cyc:
                if a in mapping:
                    raise ValueError(f"point {a!r} appears in two cycles")
            for i, a in enumerate(cyc):
                mapping[a] = cyc[(i + 1) % len(cyc)]
        return cls(mapping)

    @classmethod
    def identity(cls) -> "Perm":
        return cls()

    def __call__(self, x):
        return self._map.get(x, x)

    def __mul__(self, other: "Perm") -> "Perm":
        pts = set(self._map) | set(other._map)
        return Perm({x: self(other(x)) for x in pts})

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def inverse(self) -> "Perm":
        return Perm({b: a for a, b in self._map.items()})

    def is_identity(self) -> bool:
        return not self._map

    @property
    def support(self) -> frozenset:
        return frozenset(self._map)

    def cycles(self, order: Sequence[Hashable] | None = None) -> list[tuple]:
        """Nontrivial cycles, each starting at its earliest point in `order`."""
        pts = list(order) if order is not None else sorted(self._map, key=repr)
        rank = {p: i for i, p in enumerate(pts)}
        seen = set()
        out = []
        for start in sorted(self._map, key=lambda p: rank.get(p, len(rank))):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self._map[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self._map[nxt]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self._map else 1

    def to_text(self, order: Sequence[Hashable] | None = None) -> str:
        cyc = self.cycles(order)
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Perm{self.to_text()}"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, source: str = "<string>", line: int | None = None) -> Perm:
    """Parse ``(a b c)(d e)``; ``()`` is the identity."""
    text = text.strip()
    rest = _CYCLE_RE.sub("", text).strip()
    if rest:
        raise ParseError(f"unexpected text in cycle notation: {rest!r}", source, line)
    cycles = [c.split() for c in _CYCLE_RE.findall(text)]
    try:
        return Perm.from_cycles(c for c in cycles if c)
    except ValueError as exc:
        raise ParseError(str(exc), source, line) from None


def closure_order(points: Sequence[Hashable], generators: Sequence[Perm], cap: int = 10**6) -> int:
    """Order of the group generated by `generators`, by breadth-first closure.

    Elements are handled as image tuples over `points`; raises ClosureTooLarge
    once more than `cap` elements have been found.
    """
    index = {p: i for i, p in enumerate(points)}
    gens = []
    for g in generators:
        if not g.support <= index.keys():
            raise ValueError("generator moves a point outside the given domain")
        gens.append(tuple(index[g(p)] for p in points))
    ident = tuple(range(len(points)))
    seen = {ident}
    queue = deque([ident])
    while queue:
        h = queue.popleft()
        for g in gens:
            gh = tuple(g[i] for i in h)
            if gh not in seen:
                seen.add(gh)
                if len(seen) > cap:
                    raise ClosureTooLarge(f"closure exceeded cap of {cap} elements")
                queue.append(gh)
    return len(seen)
