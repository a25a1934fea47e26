"""Graphs and random inputs shared by the test modules."""

from __future__ import annotations

import random

from shiftgroups.completion import graph_from_matrix
from shiftgroups.exact_linalg import IntMatrix
from shiftgroups.homology import determinant_of
from shiftgroups.multigraph import MultiGraph, is_admissible, loops_graph, mp_graph
from shiftgroups.patterns import Pattern, pattern_group_order
from shiftgroups.perm import Perm

PRIME_SETS = [(), (2,), (3,), (2, 3), (2, 3, 5)]


def two_two() -> MultiGraph:
    """Adjacency [[2,1],[1,2]]: H0 = Z, H1 = Z."""
    return graph_from_matrix(IntMatrix.from_rows([[2, 1], [1, 2]]), prefix="f", name="twotwo")


def named_graphs() -> dict[str, MultiGraph]:
    return {"r2": loops_graph(2), "r3": loops_graph(3), "m2": mp_graph(2), "m3": mp_graph(3),
            "twotwo": two_two()}


def random_admissible_graphs(count: int, seed: int, max_vertices: int = 4, max_entry: int = 3,
                             finite: bool = True) -> list[MultiGraph]:
    """Admissible graphs from random matrices; with `finite`, only det(I - M^t) != 0."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, max_vertices)
        rows = [[rng.randint(0, max_entry) for _ in range(n)] for _ in range(n)]
        g = graph_from_matrix(IntMatrix.from_rows(rows), name=f"rnd{seed}_{len(out)}")
        if not is_admissible(g):
            continue
        if finite and determinant_of(g) == 0:
            continue
        out.append(g)
    return out


def random_matrix(rng: random.Random, max_dim: int = 5, lo: int = -9, hi: int = 9) -> IntMatrix:
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    return IntMatrix.from_rows([[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)])


def random_pattern(g: MultiGraph, rng: random.Random, max_order: int = 12) -> Pattern:
    """Up to two random terminus-preserving generators per label, each |F_l| <= max_order."""
    while True:
        gens = []
        for v in g.vertices:
            by_t = {}
            for x in g.out_edges(v):
                by_t.setdefault(g.terminus(x), []).append(x)
            perms = []
            for _ in range(rng.randint(0, 2)):
                mapping = {}
                for c in by_t.values():
                    img = c[:]
                    rng.shuffle(img)
                    mapping.update(zip(c, img))
                perms.append(Perm(mapping))
            gens.append((v, tuple(perms)))
        pat = Pattern(g, tuple(gens))
        if all(pattern_group_order(pat, v) <= max_order for v in g.vertices):
            return pat
