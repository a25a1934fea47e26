import random
import time

import pytest

from corpus import named_graphs, random_admissible_graphs, two_two
from oracles import cokernel_signature, rational_nullity
from shiftgroups.abelian import FinAbGroup
from shiftgroups.errors import InadmissibleGraph, UnsupportedInfinite
from shiftgroups.exact_linalg import id_minus_transpose
from shiftgroups.homology import (HomologyClass, abelianization, class_of_clopen, determinant_of,
                                  homology_group, matsumoto_equivalent, realize_class, zeroth_homology)
from shiftgroups.multigraph import Edge, MultiGraph, adjacency_matrix, loops_graph, matui_graph, mp_graph
from shiftgroups.shift_space import (ClopenSet, common_refinement, full_space, parse_clopen_paths,
                                     refine_at)

R2, R3, M2 = loops_graph(2), loops_graph(3), mp_graph(2)
X = full_space


def test_homology_examples():
    assert homology_group(R2, 0).is_trivial
    assert homology_group(R3, 0) == FinAbGroup((2,))
    assert homology_group(two_two(), 1) == FinAbGroup((), 1)
    assert homology_group(two_two(), 0) == FinAbGroup((), 1)
    assert homology_group(R3, 5).is_trivial


def test_inadmissible_rejected():
    cycle = MultiGraph("c2", ["1", "2"], [Edge("a", "1", "2"), Edge("b", "2", "1")])
    with pytest.raises(InadmissibleGraph):
        homology_group(cycle, 0)
    with pytest.raises(InadmissibleGraph):
        abelianization(MultiGraph("ow", ["1", "2"], [Edge("a", "1", "1"), Edge("b", "1", "2")]))


def oracle_abelianization(g):
    a = id_minus_transpose(adjacency_matrix(g)).to_rows()
    torsion, free = cokernel_signature(a)
    twos = sum(1 for d in torsion if d % 2 == 0) + free
    return FinAbGroup((2,) * twos, rational_nullity(a))


@pytest.mark.parametrize("name", sorted(named_graphs()))
def test_abelianization_against_oracle(name):
    g = named_graphs()[name]
    assert abelianization(g) == oracle_abelianization(g)


def test_abelianization_examples():
    assert abelianization(R2).is_trivial
    assert abelianization(R3) == FinAbGroup((2,))
    assert abelianization(two_two()) == FinAbGroup((2,), 1)
    assert str(abelianization(two_two())) == "Z/2 + Z^1"


def test_h0_matches_minor_oracle_on_random_graphs():
    for g in random_admissible_graphs(40, seed=3, finite=False):
        a = id_minus_transpose(adjacency_matrix(g)).to_rows()
        torsion, free = cokernel_signature(a)
        assert homology_group(g, 0) == FinAbGroup(torsion, free)
        assert homology_group(g, 1).free_rank == rational_nullity(a)


def test_class_examples():
    h0 = zeroth_homology(R3)
    assert class_of_clopen(R3, X(R3)).element == h0.vertex_class["a"]
    one = class_of_clopen(R3, parse_clopen_paths(R3, "x2")).element
    assert one.order() == 2
    assert class_of_clopen(R3, parse_clopen_paths(R3, "x1, x3")).element.is_zero


def random_clopen(g, rng):
    c = X(g)
    for _ in range(rng.randint(0, 4)):
        c = refine_at(c, rng.choice(c.antichain))
    keep = rng.sample(c.antichain, rng.randint(1, len(c.antichain)))
    return ClopenSet(g, tuple(keep))


def test_class_invariant_under_refinement():
    rng = random.Random(1)
    graphs = [g for g in random_admissible_graphs(25, seed=8, max_vertices=3)] + [R3, M2, two_two()]
    for _ in range(100):
        g = rng.choice(graphs)
        y = random_clopen(g, rng)
        h = class_of_clopen(g, y)
        finer = refine_at(y, rng.choice(y.antichain))
        assert class_of_clopen(g, finer) == h
        assert class_of_clopen(g, common_refinement(y, finer)) == h


def small_h0_graphs():
    gs = [R2, R3, M2, mp_graph(3), matui_graph(3, 2), matui_graph(5, 1)]
    gs += [g for g in random_admissible_graphs(40, seed=21) if zeroth_homology(g).group.order() <= 8]
    return gs


def test_realize_round_trip():
    for g in small_h0_graphs():
        for el in zeroth_homology(g).group.elements():
            y = realize_class(g, HomologyClass(el))
            assert not y.is_empty
            assert class_of_clopen(g, y).element == el


def test_realize_examples():
    assert realize_class(R2, class_of_clopen(R2, X(R2))) == X(R2)
    gen = zeroth_homology(R3).group.element((1,))
    y = realize_class(R3, HomologyClass(gen))
    assert len(y.antichain) == 1


def test_realize_is_deterministic():
    g = matui_graph(5, 2)
    for el in zeroth_homology(g).group.elements():
        assert realize_class(g, HomologyClass(el)) == realize_class(g, HomologyClass(el))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_mp_graphs_match_two_loops(p):
    g = mp_graph(p)
    assert determinant_of(g) == -1
    assert matsumoto_equivalent(g, X(g), R2, X(R2))


def test_matsumoto_examples():
    assert matsumoto_equivalent(R3, X(R3), R3, X(R3))
    assert not matsumoto_equivalent(R2, X(R2), R3, X(R3))
    half = parse_clopen_paths(R3, "x1, x2")
    assert not matsumoto_equivalent(R3, X(R3), R3, half)
    with pytest.raises(UnsupportedInfinite):
        matsumoto_equivalent(two_two(), X(two_two()), two_two(), X(two_two()))


def test_matsumoto_symmetric_and_transitive():
    rng = random.Random(4)
    gs = random_admissible_graphs(12, seed=30, max_vertices=3)
    items = [(g, random_clopen(g, rng)) for g in gs for _ in range(2)]
    rel = {}
    for i, (g1, y1) in enumerate(items):
        for j, (g2, y2) in enumerate(items):
            rel[i, j] = matsumoto_equivalent(g1, y1, g2, y2)
    for i in range(len(items)):
        assert rel[i, i]
        for j in range(len(items)):
            assert rel[i, j] == rel[j, i]
            for k in range(len(items)):
                if rel[i, j] and rel[j, k]:
                    assert rel[i, k]


def test_zeroth_homology_is_fast_and_cached():
    t = time.perf_counter()
    for _ in range(100):
        zeroth_homology(M2)
    assert time.perf_counter() - t < 0.5
