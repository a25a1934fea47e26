"""Groupoid homology of a shift of finite type, in closed form.

``H0 = Coker(I - M^t)`` and ``H1 = Ker(I - M^t)``; higher groups vanish.
Vertex v stands for the class of the cylinder of paths leaving v, and a
cylinder Z(gamma) has the class of the vertex where gamma ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .abelian import DEFAULT_GROUP_CAP, AbElement, FinAbGroup, MarkedGroup, marked_iso_exists
from .errors import InadmissibleGraph, SearchBoundExhausted, UnsupportedInfinite, VerificationError
from .exact_linalg import CoordinateMap, cokernel, determinant, id_minus_transpose, kernel_basis
from .multigraph import MultiGraph, adjacency_matrix, is_diconnected, is_non_circular
from .shift_space import (ClopenSet, Path, children, extend, full_space, path_key, shortest_route,
                          terminus)

REALIZE_BOUND_CAP = 2**10


@dataclass(frozen=True)
class HomologyClass:
    element: AbElement

    def __str__(self) -> str:
        return str(self.element)


def require_admissible(g: MultiGraph):
    if not is_diconnected(g):
        raise InadmissibleGraph(f"graph {g.name} is not diconnected")
    if not is_non_circular(g):
        raise InadmissibleGraph(f"graph {g.name} is a disjoint union of cycles")


@dataclass(frozen=True)
class ZerothHomology:
    """H0 together with the images of the vertex generators."""

    group: FinAbGroup
    coords: CoordinateMap
    vertex_class: dict
    det: int


@lru_cache(maxsize=256)
def zeroth_homology(g: MultiGraph) -> ZerothHomology:
    """Cokernel data for ``I - M^t``, with the cylinder relation machine-checked.

    The refinement relation ``e_v = sum_w M(v, w) e_w`` is what makes the
    per-cylinder class formula well defined; it is verified here before any
    class is computed.
    """
    m = adjacency_matrix(g)
    a = id_minus_transpose(m)
    group, coords = cokernel(a)
    vertex_class = {v: coords.basis_image(i) for i, v in enumerate(g.vertices)}
    rows = m.to_rows()
    for i, v in enumerate(g.vertices):
        rhs = group.zero()
        for j, w in enumerate(g.vertices):
            rhs = rhs + vertex_class[w] * rows[i][j]
        if rhs != vertex_class[v]:
            raise VerificationError(f"cylinder relation fails at vertex {v} of {g.name}")
    return ZerothHomology(group, coords, vertex_class, determinant(a))


def homology_group(g: MultiGraph, n: int) -> FinAbGroup:
    require_admissible(g)
    if n < 0:
        raise ValueError("homology degree must be nonnegative")
    if n == 0:
        return zeroth_homology(g).group
    if n == 1:
        return FinAbGroup((), len(kernel_basis(id_minus_transpose(adjacency_matrix(g)))))
    return FinAbGroup()


def class_of_clopen(g: MultiGraph, y: ClopenSet) -> HomologyClass:
    """``[1_Y]`` as the sum of the terminal-vertex classes of Y's cylinders."""
    if y.graph != g:
        raise ValueError("clopen set lives over a different graph")
    h0 = zeroth_homology(g)
    total = h0.group.zero()
    for p in y.antichain:
        total = total + h0.vertex_class[terminus(g, p)]
    return HomologyClass(total)


def _multiplicities(g: MultiGraph, h0: ZerothHomology, target: AbElement) -> list[str] | None:
    """Shortest nonempty multiset of vertices whose classes sum to `target`.

    Breadth first over partial sums, one vertex added per level, so the
    first hit uses the fewest cylinders; ties go to canonical vertex order.
    """
    bound = sum(h0.group.torsion) + 4
    while True:
        found = _bfs_multiplicities(g, h0, target, bound)
        if found is not None:
            return found
        if bound >= REALIZE_BOUND_CAP:
            return None
        bound = min(2 * bound, REALIZE_BOUND_CAP)


def _bfs_multiplicities(g, h0, target, bound):
    start = {}
    for v in g.vertices:
        start.setdefault(h0.vertex_class[v], (v,))
    level = start
    seen = dict(start)
    for _ in range(bound):
        if target in level:
            return list(level[target])
        nxt = {}
        for elem, verts in level.items():
            for v in g.vertices:
                e2 = elem + h0.vertex_class[v]
                if e2 not in seen and e2 not in nxt:
                    nxt[e2] = verts + (v,)
        if not nxt:
            return None
        seen.update(nxt)
        level = nxt
    return None


def realize_class(g: MultiGraph, h: HomologyClass) -> ClopenSet:
    """A nonempty clopen set whose class is h.

    Finds vertex multiplicities first, then carves disjoint cylinders ending
    at the required vertices out of X_g.
    """
    require_admissible(g)
    h0 = zeroth_homology(g)
    if h.element.group != h0.group:
        raise ValueError("class does not belong to H0 of this graph")
    demand = _multiplicities(g, h0, h.element)
    if demand is None:
        raise SearchBoundExhausted(
            f"no vertex multiset of size <= {REALIZE_BOUND_CAP} realises {h} in {h0.group}")
    y = ClopenSet(g, tuple(_allocate_cylinders(g, demand)))
    if class_of_clopen(g, y) != h:
        raise VerificationError("realised clopen set has the wrong class")
    return y


def _allocate_cylinders(g: MultiGraph, demand: list[str]) -> list[Path]:
    key = lambda p: path_key(g, p)
    pool = sorted(full_space(g).antichain, key=key)
    # Grow the pool until there are enough disjoint cylinders to go round.
    while len(pool) < len(demand):
        branching = [p for p in pool if len(g.out_edges(terminus(g, p))) >= 2]
        victim = branching[0] if branching else pool[0]
        pool.remove(victim)
        pool = sorted(pool + children(g, victim), key=key)
    chosen = []
    for w in demand:
        ready = [p for p in pool if terminus(g, p) == w]
        if ready:
            chosen.append(ready[0])
            pool.remove(ready[0])
            continue
        p = pool.pop(0)
        for e in shortest_route(g, terminus(g, p), w):
            pool.extend(c for c in children(g, p) if c.edges[-1] != e)
            p = extend(p, (e,))
        chosen.append(p)
        pool.sort(key=key)
    return chosen


def abelianization(g: MultiGraph) -> FinAbGroup:
    """``(H0 (x) Z/2) + H1``; the restriction Y plays no part."""
    h0 = homology_group(g, 0)
    h1 = homology_group(g, 1)
    twos = sum(1 for d in h0.torsion if d % 2 == 0) + h0.free_rank
    return FinAbGroup((2,) * twos, h1.free_rank)


def matsumoto_equivalent(g1: MultiGraph, y1: ClopenSet, g2: MultiGraph, y2: ClopenSet,
                         cap: int = DEFAULT_GROUP_CAP) -> bool:
    """Decide the sufficient criterion for ``G_g1|Y1 ~= G_g2|Y2``.

    Equal signed determinants of ``I - M^t`` plus an isomorphism of the H0
    groups sending ``[1_Y1]`` to ``[1_Y2]``.  False means the criterion is not
    met, nothing more.
    """
    require_admissible(g1)
    require_admissible(g2)
    a, b = zeroth_homology(g1), zeroth_homology(g2)
    for g, h in ((g1, a), (g2, b)):
        if not h.group.is_finite:
            raise UnsupportedInfinite(f"H0 of {g.name} is infinite ({h.group})")
    if a.det != b.det:
        return False
    m1 = MarkedGroup(a.group, class_of_clopen(g1, y1).element)
    m2 = MarkedGroup(b.group, class_of_clopen(g2, y2).element)
    return marked_iso_exists(m1, m2, cap)


def determinant_of(g: MultiGraph) -> int:
    return zeroth_homology(g).det
