"""Finitely generated abelian groups in invariant-factor coordinates.

A group ``Z/d1 + ... + Z/dk + Z^r`` is stored as its torsion chain
``(d1, ..., dk)`` (each >= 2, each dividing the next) and its free rank, so
two groups are isomorphic exactly when they compare equal.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import GroupMismatch, GroupTooLarge, ParseError, UnsupportedInfinite

DEFAULT_GROUP_CAP = 10**4


@dataclass(frozen=True)
class FinAbGroup:
    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if any(d < 2 for d in self.torsion):
            raise ValueError(f"torsion factors must be >= 2: {self.torsion}")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError(f"torsion factors must form a divisibility chain: {self.torsion}")
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    @classmethod
    def from_factors(cls, factors: Sequence[int]) -> "FinAbGroup":
        """Group ``+ Z/d`` over arbitrary nonnegative `factors` (0 means Z).

        The factors need not form a chain; they are normalised through the
        Smith normal form of the diagonal matrix.
        """
        from .exact_linalg import IntMatrix, cokernel

        if any(d < 0 for d in factors):
            raise ValueError("factors must be nonnegative")
        group, _ = cokernel(IntMatrix.diagonal(list(factors)))
        return group

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and not self.free_rank

    def order(self) -> int | None:
        """Number of elements, or None when infinite."""
        return math.prod(self.torsion) if self.is_finite else None

    def zero(self) -> "AbElement":
        return AbElement(self, (0,) * len(self.torsion), (0,) * self.free_rank)

    def element(self, torsion: Sequence[int] = (), free: Sequence[int] = ()) -> "AbElement":
        if len(torsion) != len(self.torsion) or len(free) != self.free_rank:
            raise GroupMismatch(f"coordinates {tuple(torsion)};{tuple(free)} do not fit {self}")
        return AbElement(self, tuple(x % d for x, d in zip(torsion, self.torsion)), tuple(free))

    def generators(self) -> list["AbElement"]:
        k, r = len(self.torsion), self.free_rank
        gens = []
        for i in range(k + r):
            vec = [int(i == j) for j in range(k + r)]
            gens.append(self.element(vec[:k], vec[k:]))
        return gens

    def elements(self) -> Iterator["AbElement"]:
        if not self.is_finite:
            raise UnsupportedInfinite(f"cannot enumerate the infinite group {self}")
        for coords in itertools.product(*(range(d) for d in self.torsion)):
            yield AbElement(self, coords, ())

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "trivial"


@dataclass(frozen=True)
class AbElement:
    group: FinAbGroup
    torsion_coords: tuple[int, ...]
    free_coords: tuple[int, ...]

    def __post_init__(self):
        g = self.group
        if len(self.torsion_coords) != len(g.torsion) or len(self.free_coords) != g.free_rank:
            raise GroupMismatch("coordinate lengths do not match the group")
        if any(not 0 <= x < d for x, d in zip(self.torsion_coords, g.torsion)):
            raise ValueError("torsion coordinates must be reduced")

    def _check(self, other: "AbElement"):
        if self.group != other.group:
            raise GroupMismatch(f"elements of {self.group} and {other.group}")

    def __add__(self, other: "AbElement") -> "AbElement":
        self._check(other)
        return self.group.element(
            [a + b for a, b in zip(self.torsion_coords, other.torsion_coords)],
            [a + b for a, b in zip(self.free_coords, other.free_coords)])

    def __neg__(self) -> "AbElement":
        return self.group.element([-a for a in self.torsion_coords], [-a for a in self.free_coords])

    def __sub__(self, other: "AbElement") -> "AbElement":
        return self + (-other)

    def __mul__(self, k: int) -> "AbElement":
        return self.group.element([k * a for a in self.torsion_coords], [k * a for a in self.free_coords])

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return not any(self.torsion_coords) and not any(self.free_coords)

    def order(self) -> int | float:
        """Element order; ``math.inf`` when a free coordinate is nonzero."""
        if any(self.free_coords):
            return math.inf
        return math.lcm(*(d // math.gcd(d, x) for x, d in zip(self.torsion_coords, self.group.torsion)))

    def __str__(self) -> str:
        return format_element(self)


def add(a: AbElement, b: AbElement) -> AbElement:
    return a + b


def negate(a: AbElement) -> AbElement:
    return -a


def equals(a: AbElement, b: AbElement) -> bool:
    a._check(b)
    return a == b


def order(a: AbElement) -> int | float:
    return a.order()


@dataclass(frozen=True)
class MarkedGroup:
    group: FinAbGroup
    marked: AbElement

    def __post_init__(self):
        if self.marked.group != self.group:
            raise GroupMismatch("marked element does not belong to the group")


def _hom_columns(group: FinAbGroup) -> list[list[tuple[int, ...]]]:
    """Possible images of each canonical generator under an endomorphism."""
    cols = []
    for di in group.torsion:
        choices = [range(0, dj, dj // math.gcd(di, dj)) for dj in group.torsion]
        cols.append(list(itertools.product(*choices)))
    return cols


def _is_automorphism(group: FinAbGroup, images: Sequence[Sequence[int]]) -> bool:
    # Surjective iff Z^k / <images, d_i e_i> is trivial; for a finite group
    # surjective endomorphisms are bijective.
    from .exact_linalg import IntMatrix, smith_normal_form

    k = len(group.torsion)
    if k == 0:
        return True
    cols = [list(c) for c in images] + [[group.torsion[i] * (i == j) for j in range(k)] for i in range(k)]
    rel = IntMatrix.from_rows([[c[i] for c in cols] for i in range(k)])
    return all(d == 1 for d in smith_normal_form(rel).invariant_factors)


def marked_iso_exists(m1: MarkedGroup, m2: MarkedGroup, cap: int = DEFAULT_GROUP_CAP) -> bool:
    """Is there an isomorphism of the groups carrying one marked element to the other?

    Exhaustive over Hom(G, G): generator i may only go to elements whose
    order divides d_i; candidates that hit the target are then tested for
    bijectivity.
    """
    for m in (m1, m2):
        if not m.group.is_finite:
            raise UnsupportedInfinite(f"marked isomorphism for infinite group {m.group} is not decided")
        if m.group.order() > cap:
            raise GroupTooLarge(f"|{m.group}| = {m.group.order()} exceeds cap {cap}")
    if m1.group != m2.group:
        return False
    g = m1.group
    src, dst = m1.marked.torsion_coords, m2.marked.torsion_coords
    if src == dst:
        return True
    if m1.marked.order() != m2.marked.order():
        return False
    mods = g.torsion
    for images in itertools.product(*_hom_columns(g)):
        img = tuple(sum(s * col[j] for s, col in zip(src, images)) % mods[j] for j in range(len(mods)))
        if img == dst and _is_automorphism(g, images):
            return True
    return False


_GROUP_TERM = re.compile(r"^Z/(\d+)$|^Z\^(\d+)$|^Z$")


def parse_group(text: str, source: str = "<string>", line: int | None = None) -> FinAbGroup:
    """Parse ``Z/2 + Z/4 + Z^1`` (or ``trivial``)."""
    text = text.strip()
    if text in ("trivial", "0", ""):
        return FinAbGroup()
    factors = []
    for term in text.split("+"):
        term = term.strip().replace(" ", "")
        mt = _GROUP_TERM.match(term)
        if not mt:
            raise ParseError(f"bad group term {term!r}", source, line)
        if mt.group(1):
            factors.append(int(mt.group(1)))
        else:
            factors.extend([0] * int(mt.group(2) or 1))
    return FinAbGroup.from_factors(factors)


def parse_element(text: str, group: FinAbGroup, source: str = "<string>", line: int | None = None) -> AbElement:
    """Parse ``(1,3;0)``: torsion coordinates, then free ones after ';'."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"element literal must be parenthesised: {text!r}", source, line)
    body = text[1:-1]
    tors, _, free = body.partition(";")
    try:
        t = [int(x) for x in tors.split(",") if x.strip()]
        f = [int(x) for x in free.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"bad element literal {text!r}", source, line) from None
    try:
        return group.element(t, f)
    except GroupMismatch as exc:
        raise ParseError(str(exc), source, line) from None


def format_element(a: AbElement) -> str:
    return "(" + ",".join(map(str, a.torsion_coords)) + ";" + ",".join(map(str, a.free_coords)) + ")"
