import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import boundary_images, point_image, same_action
from shiftgroups import almost_aut as aa
from shiftgroups.errors import InvalidElement, ParseError, RestrictionMismatch
from shiftgroups.multigraph import loops_graph, mp_graph
from shiftgroups.perm import Perm
from shiftgroups.shift_space import (ClopenSet, full_space, make_point, parse_clopen_paths, parse_path,
                                     parse_point, paths_of_length, refine_at, terminus,
                                     vertex_path)

R2 = loops_graph(2)
M2 = mp_graph(2)
GRAPHS = {"r2": R2, "m2": M2}


def P(text, g=R2):
    return parse_path(g, text)


def el(pair_texts, g=R2, restriction=None):
    return aa.element(g, [(P(a, g), P(b, g)) for a, b in pair_texts], restriction)


ID = aa.identity(R2)
SWAP = el([("x1", "x2"), ("x2", "x1")])


def test_validate_examples():
    assert aa.validate(el([("@a", "@a")])) == []
    bad = aa.PrefixExchange(R2, full_space(R2), ((P("x1"), P("x2")),))
    assert any("incomplete domain antichain" in m for m in aa.validate(bad))
    mixed = aa.PrefixExchange(M2, full_space(M2), ((P("b", M2), P("@1", M2)),))
    assert any("label mismatch" in m for m in aa.validate(mixed))
    with pytest.raises(InvalidElement):
        el([("x1", "x2")])


def test_expand_examples():
    assert aa.expand_at(ID, vertex_path("a")).pairs == ((P("x1"), P("x1")), (P("x2"), P("x2")))
    got = aa.expand_at(SWAP, P("x1"))
    assert dict(got.pairs) == {P("x1.x1"): P("x2.x1"), P("x1.x2"): P("x2.x2"), P("x2"): P("x1")}
    with pytest.raises(InvalidElement):
        aa.expand_at(SWAP, P("x1.x1"))


def test_canonicalize_examples():
    assert aa.canonicalize(el([("x1", "x1"), ("x2", "x2")])).pairs == ((vertex_path("a"), vertex_path("a")),)
    assert aa.canonicalize(SWAP) == SWAP


def test_compose_invert_examples():
    assert aa.is_identity(aa.compose(SWAP, SWAP))
    assert aa.invert(ID) == ID
    assert aa.equals(aa.invert(SWAP), SWAP)
    assert not aa.equals(SWAP, ID)
    deep_id = aa.identity(R2, ClopenSet(R2, tuple(paths_of_length(R2, vertex_path("a"), 2))))
    assert aa.equals(deep_id, ID)


def test_apply_examples():
    xinf = make_point(R2, [], ["x1"])
    assert aa.apply(ID, xinf) == xinf
    assert aa.apply(SWAP, xinf) == make_point(R2, ["x2"], ["x1"])


def test_bisection_examples():
    assert all(n == 0 for _, n, _ in aa.to_bisection(ID).triples)
    e = el([("x1.x1", "x1"), ("x1.x2", "x2.x1"), ("x2", "x2.x2")])
    cocycles = {(str(d), str(r)): n for r, n, d in aa.to_bisection(e).triples}
    assert cocycles[("x1.x1", "x1")] == 1
    assert cocycles[("x2", "x2.x2")] == -1
    assert aa.from_bisection(aa.to_bisection(e), R2) == aa.canonicalize(e)
    broken = aa.BisectionTable(((P("x1"), 0, P("x1.x1")),))
    with pytest.raises(InvalidElement):
        aa.from_bisection(broken, R2)


def test_automorphism_examples():
    assert aa.is_automorphism(ID).support == set()
    lp = aa.is_automorphism(SWAP)
    assert lp.support == {vertex_path("a")}
    assert lp.perms[vertex_path("a")] == Perm.from_cycles([("x1", "x2")])
    assert aa.is_automorphism(el([("x1.x1", "x1"), ("x1.x2", "x2.x1"), ("x2", "x2.x2")])) is None


def test_child_action_examples():
    assert aa.child_action(ID, P("x1.x2")).is_identity()
    assert aa.child_action(SWAP, vertex_path("a")) == Perm.from_cycles([("x1", "x2")])
    tau = Perm.from_cycles([("x1", "x2")])
    built = aa.from_local_permutations(R2, {P("x2.x1"): tau})
    assert aa.child_action(built, P("x2.x1")) == tau
    assert aa.child_action(built, P("x2")).is_identity()
    split = el([("x1.x1", "x1"), ("x1.x2", "x2.x1"), ("x2", "x2.x2")])
    assert aa.child_action(split, vertex_path("a")) is None


def test_random_element_examples():
    for seed in range(20):
        e = aa.random_element(R2, None, 1, seed)
        assert {str(d) for d in e.domains} in ({"x1", "x2"}, {"@a"})
    assert aa.format_element(aa.random_element(M2, None, 3, 7)) == aa.format_element(aa.random_element(M2, None, 3, 7))
    for seed in range(100):
        assert aa.validate(aa.random_element(M2, None, 1 + seed % 4, seed)) == []
    with pytest.raises(ValueError):
        aa.random_element(R2, None, 0, 1)


def test_fixes_pointwise_examples():
    t = parse_clopen_paths(R2, "x1, x2")
    assert aa.fixes_pointwise(ID, t)
    assert not aa.fixes_pointwise(SWAP, t)
    inside = el([("x1", "x1"), ("x2.x1", "x2.x2"), ("x2.x2", "x2.x1")])
    assert aa.fixes_pointwise(inside, t)


def test_restriction_mismatch():
    half = parse_clopen_paths(R2, "x1")
    with pytest.raises(RestrictionMismatch):
        aa.compose(aa.identity(R2, half), ID)
    with pytest.raises(RestrictionMismatch):
        aa.equals(aa.identity(M2), ID)


def elements(depth=4):
    return st.tuples(st.sampled_from(sorted(GRAPHS)), st.integers(1, depth), st.integers(0, 10**6)).map(
        lambda t: aa.random_element(GRAPHS[t[0]], None, t[1], t[2]))


@st.composite
def same_graph_elements(draw, count, depth=4):
    g = GRAPHS[draw(st.sampled_from(sorted(GRAPHS)))]
    return [aa.random_element(g, None, draw(st.integers(1, depth)), draw(st.integers(0, 10**6)))
            for _ in range(count)]


@settings(max_examples=40)
@given(same_graph_elements(3))
def test_group_laws(fs):
    f, g, h = fs
    assert aa.equals(aa.compose(aa.compose(f, g), h), aa.compose(f, aa.compose(g, h)))
    assert aa.is_identity(aa.compose(f, aa.invert(f)))
    assert aa.is_identity(aa.compose(aa.invert(f), f))
    assert aa.equals(aa.compose(aa.identity(f.graph), f), f)
    assert aa.equals(aa.invert(aa.invert(f)), f)


@settings(max_examples=40)
@given(same_graph_elements(2))
def test_equals_iff_same_boundary_action(fs):
    f, g = fs
    assert aa.equals(f, g) == same_action(f, g)
    h = aa.canonicalize(aa.expand_at(f, f.domains[0]))
    assert aa.equals(f, h) and same_action(f, h)


@settings(max_examples=40)
@given(elements(), st.randoms(use_true_random=False))
def test_canonical_form_expansion_invariant(e, rnd):
    c = aa.canonicalize(e)
    assert aa.canonicalize(c) == c
    x = e
    for _ in range(5):
        x = aa.expand_at(x, rnd.choice(x.domains))
    assert aa.canonicalize(x) == c
    for leaf in c.domains:
        assert aa.canonicalize(aa.expand_at(c, leaf)) == c


def random_point(g, rng):
    for _ in range(100):
        v = rng.choice(g.vertices)
        word, w = [], v
        for _ in range(rng.randint(1, 8)):
            e = rng.choice(g.out_edges(w))
            word.append(e)
            w = g.terminus(e)
        for cut in range(len(word)):
            if g.origin(word[cut]) == w:
                return make_point(g, word[:cut], word[cut:])
    raise AssertionError("no periodic point found")


@settings(max_examples=40)
@given(same_graph_elements(2), st.integers(0, 10**6))
def test_apply_matches_oracle_and_composes(fs, seed):
    f, g = fs
    rng = random.Random(seed)
    for _ in range(5):
        p = random_point(f.graph, rng)
        img = aa.apply(f, p)
        head, tail = point_image(f.graph, f.pairs, p)
        assert img.prefix(len(head) + 10) == (head + tail)[:len(head) + 10]
        assert aa.apply(aa.compose(f, g), p) == aa.apply(f, aa.apply(g, p))


def cocycle_at(e, p):
    for d, r in e.pairs:
        if p.prefix(len(d.edges)) == d.edges and p.origin(e.graph) == d.anchor:
            return len(d.edges) - len(r.edges)
    raise AssertionError


@settings(max_examples=30)
@given(same_graph_elements(2), st.integers(0, 10**6))
def test_cocycle_is_additive_and_shift_consistent(fs, seed):
    f, g = fs
    rng = random.Random(seed)
    fg = aa.compose(f, g)
    for _ in range(5):
        p = random_point(f.graph, rng)
        assert cocycle_at(fg, p) == cocycle_at(g, p) + cocycle_at(f, aa.apply(g, p))
        for r, n, d in aa.to_bisection(f).triples:
            if p.prefix(len(d.edges)) == d.edges and p.origin(f.graph) == d.anchor:
                assert p.drop(len(d.edges)) == aa.apply(f, p).drop(len(r.edges))
                assert n == len(d.edges) - len(r.edges)


@settings(max_examples=30)
@given(elements())
def test_bisection_round_trip_and_labels(e):
    assert aa.from_bisection(aa.to_bisection(e), e.graph) == aa.canonicalize(e)
    g = e.graph
    assert all(terminus(g, d) == terminus(g, r) for d, r in aa.canonicalize(e).pairs)


@st.composite
def tree_automorphisms(draw):
    g = GRAPHS[draw(st.sampled_from(sorted(GRAPHS)))]
    perms = {}
    for _ in range(draw(st.integers(0, 3))):
        v = draw(st.sampled_from(g.vertices))
        node = vertex_path(v)
        for _ in range(draw(st.integers(0, 2))):
            node = parse_path(g, ".".join(node.edges + (draw(st.sampled_from(g.out_edges(
                g.terminus(node.edges[-1]) if node.edges else v))),)))
        out = g.out_edges(g.terminus(node.edges[-1]) if node.edges else v)
        by_t = {}
        for x in out:
            by_t.setdefault(g.terminus(x), []).append(x)
        mapping = {}
        for cls in by_t.values():
            mapping.update(zip(cls, draw(st.permutations(cls))))
        perms[node] = Perm(mapping)
    return g, perms


@settings(max_examples=40)
@given(tree_automorphisms())
def test_local_permutation_round_trip(data):
    g, perms = data
    e = aa.from_local_permutations(g, perms)
    lp = aa.is_automorphism(e)
    assert lp is not None
    want = {k: v for k, v in perms.items() if not v.is_identity()}
    assert lp.perms == want
    images = boundary_images(e, 6)
    assert all(len(w) == len(img[1]) for (_, w), img in images.items())


def test_parse_and_format():
    text = "element over r2\n# swap\npair x1 -> x2\npair x2 -> x1\n"
    e = aa.parse_element(text, {"r2": R2})
    assert e == SWAP
    assert aa.format_element(e) == "element over r2\npair x1 -> x2\npair x2 -> x1\n"
    named = {"half": parse_clopen_paths(R2, "x1")}
    r = aa.parse_element("element over r2 restrict half\npair x1.x1 -> x1.x2\npair x1.x2 -> x1.x1\n",
                         {"r2": R2}, named)
    assert aa.format_element(r, "half").splitlines()[0] == "element over r2 restrict half"
    inline = aa.parse_element(aa.format_element(r), {"r2": R2})
    assert aa.equals(inline, r)
    with pytest.raises(ParseError):
        aa.parse_element("element over r9\n", {"r2": R2})
    with pytest.raises(ParseError):
        aa.parse_element("element over r2\npair x1 -> x2\n", {"r2": R2})
    with pytest.raises(ParseError) as info:
        aa.parse_element("element over r2\npair x1 => x2\n", {"r2": R2}, source="e.elem")
    assert info.value.line == 2


def test_restricted_elements():
    y = parse_clopen_paths(M2, "b, @2")
    for seed in range(20):
        e = aa.random_element(M2, y, 3, seed)
        assert aa.is_identity(aa.compose(e, aa.invert(e)))
        p = parse_point(M2, "point b (l1)")
        q = aa.apply(e, p)
        assert aa.apply(aa.invert(e), q) == p
    refined = refine_at(y, parse_path(M2, "b"))
    assert aa.identity(M2, refined) == aa.identity(M2, y)
