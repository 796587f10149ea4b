import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from dci_forge.digraph import (
    Digraph,
    automorphism_group,
    canonical_form,
    cayley_digraph,
    coset_bipartite_check,
    find_isomorphism,
    is_automorphism,
    is_isomorphism,
    refine_colors,
)
from dci_forge.errors import CapExceeded
from dci_forge.groups import GroupElement as E, GroupSpec, apply_set, automorphisms, parse_element, subgroup_generated, multiply
from dci_forge.permgroup import closure, right_multiplication

from conftest import brute_automorphisms, brute_isomorphism

D6, D8, D18 = GroupSpec.dihedral(3), GroupSpec.dihedral(4), GroupSpec.dihedral(9)
Z4 = GroupSpec.cyclic(4)


def cay(G, *names):
    return cayley_digraph(G, [parse_element(G, x) for x in names])


def cycle(n):
    return Digraph.from_arcs(n, [(i, (i + 1) % n) for i in range(n)])


def test_cayley_examples():
    assert cay(Z4, "1").arcs() == [(0, 1), (1, 2), (2, 3), (3, 0)]
    digons = cay(D6, "b")
    assert all(digons.has_arc(v, u) for u, v in digons.arcs()) and digons.arc_count == 6
    kb = cay(D6, "b", "b*a", "b*a^2")
    rot = {0, 1, 2}
    for u, v in itertools.product(range(6), repeat=2):
        assert kb.has_arc(u, v) == ((u in rot) != (v in rot))


def test_cayley_arcs_follow_left_multiplication():
    S = {parse_element(D18, x) for x in ("a", "b*a^2", "a^4")}
    g = cayley_digraph(D18, S)
    for u, v in itertools.product(range(18), repeat=2):
        expect = any(multiply(D18, s, D18.element(u)) == D18.element(v) for s in S)
        assert g.has_arc(u, v) == expect
    assert all(len(x) == 3 for x in g.out)


def test_loops_rejected():
    with pytest.raises(ValueError):
        Digraph.from_arcs(2, [(0, 0)])


def test_refine_examples():
    assert len(set(refine_colors(cycle(4)))) == 1
    assert len(set(refine_colors(Digraph.from_arcs(2, [(0, 1)])))) == 2
    S = [parse_element(D18, x) for x in ("a", "b", "b*a^5")]
    assert len(set(refine_colors(cayley_digraph(D18, S)))) == 1


def test_refine_is_idempotent_and_contiguous():
    rng = random.Random(3)
    for _ in range(200):
        g = random_digraph(rng, rng.randint(1, 9))
        c = refine_colors(g)
        assert sorted(set(c)) == list(range(len(set(c))))
        assert refine_colors(g, c) == c


def test_find_isomorphism_examples():
    assert find_isomorphism(cay(Z4, "1"), cay(Z4, "3")) is not None
    assert find_isomorphism(cay(Z4, "1"), cay(Z4, "2")) is None
    f = find_isomorphism(cay(D8, "b", "a", "a^3"), cay(D8, "b", "b*a", "b*a^3"))
    assert is_isomorphism(cay(D8, "b", "a", "a^3"), cay(D8, "b", "b*a", "b*a^3"), f)


def test_automorphism_group_examples():
    for n in (3, 5, 8):
        assert automorphism_group(cycle(n)).order == n
    for k, fact in ((1, 1), (4, 24), (6, 720), (8, 40320)):
        assert automorphism_group(Digraph.from_arcs(k, [])).order == fact
    kb = cay(D6, "b", "b*a", "b*a^2")
    A = automorphism_group(kb)
    assert A.order == len(brute_automorphisms(kb)) == 72
    assert closure(A.generators).order == 72
    with pytest.raises(CapExceeded):
        automorphism_group(Digraph.from_arcs(9, []), order_cap=1000)


def test_canonical_form_examples():
    g = cay(D18, "a", "b*a^2")
    rng = random.Random(0)
    for _ in range(20):
        f = list(range(18))
        rng.shuffle(f)
        assert canonical_form(g.relabel(f)) == canonical_form(g)
    assert canonical_form(cay(Z4, "1")) != canonical_form(cay(Z4, "2"))


def test_canonical_buckets_match_pairwise_isomorphism():
    # every 4-set of D_18: canonical buckets agree with pairwise direct search on representatives
    els = [g for g in D18.elements() if g != D18.identity]
    buckets = {}
    for T in itertools.combinations(els, 4):
        g = cayley_digraph(D18, T)
        rep = buckets.setdefault(canonical_form(g), g)
        assert find_isomorphism(g, rep) is not None
    reps = list(buckets.values())
    for x, y in itertools.combinations(reps, 2):
        assert find_isomorphism(x, y) is None
    assert len(reps) == 63


def test_coset_bipartite_examples():
    P = subgroup_generated(D18, [E(3, 0)])
    S = {multiply(D18, E(1, 0), z) for z in P.members} | {E(0, 1)}
    g = cayley_digraph(D18, S)
    v = E(2, 1)
    U = {D18.index(multiply(D18, z, v)) for z in P.members}
    W = {D18.index(multiply(D18, z, multiply(D18, E(1, 0), v))) for z in P.members}
    assert coset_bipartite_check(g, U, W)
    assert not coset_bipartite_check(Digraph.from_arcs(4, []), {0, 1}, {2, 3})
    assert coset_bipartite_check(Digraph.from_arcs(2, [(0, 1)]), {0}, {1})
    with pytest.raises(ValueError):
        coset_bipartite_check(g, {0, 1}, {1, 2})


def test_json_round_trip():
    g = cay(D8, "a", "b")
    h = Digraph.from_json(g.to_json(), D8)
    assert h == g and h.labels == g.labels


def random_digraph(rng, V, p=None):
    p = rng.random() if p is None else p
    return Digraph.from_arcs(V, [(u, v) for u in range(V) for v in range(V) if u != v and rng.random() < p])


def test_isomorphism_agrees_with_brute_force():
    # 10^4 pairs on at most 7 vertices; half are relabellings, some with one arc toggled
    rng = random.Random(2024)
    yes = no = 0
    for _ in range(10_000):
        V = rng.randint(1, 7)
        g = random_digraph(rng, V)
        kind = rng.random()
        if kind < 0.45:
            f = list(range(V))
            rng.shuffle(f)
            h = g.relabel(f)
        elif kind < 0.8 and V > 1:
            f = list(range(V))
            rng.shuffle(f)
            arcs = set(g.relabel(f).arcs())
            u, v = rng.sample(range(V), 2)
            arcs ^= {(u, v)}
            h = Digraph.from_arcs(V, arcs)
        else:
            h = random_digraph(rng, V, len(g.arcs()) / max(1, V * (V - 1)))
        ours = find_isomorphism(g, h)
        brute = brute_isomorphism(g, h)
        assert (ours is None) == (brute is None)
        if ours is not None:
            assert is_isomorphism(g, h, ours)
        assert (canonical_form(g) == canonical_form(h)) == (brute is not None)
        yes += brute is not None
        no += brute is None
    assert yes > 3000 and no > 3000


def test_aut_order_and_refinement_against_brute_force():
    rng = random.Random(7)
    for _ in range(300):
        g = random_digraph(rng, rng.randint(1, 6))
        auts = brute_automorphisms(g)
        A = automorphism_group(g)
        assert A.order == len(auts)
        assert all(is_automorphism(g, x) for x in A.generators)
        colors = refine_colors(g)
        for f in auts:
            assert all(colors[v] == colors[f[v]] for v in range(g.vcount))


cayley_instances = st.sampled_from(
    [GroupSpec.dihedral(n) for n in range(3, 19)] + [GroupSpec.cyclic(n) for n in range(2, 37)]
).flatmap(lambda G: st.tuples(st.just(G), st.sets(st.sampled_from(G.elements()[1:]), max_size=6)))


@given(cayley_instances)
@settings(max_examples=150)
def test_right_multiplications_are_automorphisms(inst):
    G, S = inst
    g = cayley_digraph(G, S)
    for x in G.elements():
        assert is_automorphism(g, right_multiplication(G, x))


@given(cayley_instances)
@settings(max_examples=100)
def test_cayley_digraph_is_vertex_transitive_for_refinement(inst):
    G, S = inst
    assert len(set(refine_colors(cayley_digraph(G, S)))) == 1


@pytest.mark.parametrize("G", [GroupSpec.dihedral(n) for n in range(3, 10)] + [GroupSpec.cyclic(n) for n in range(3, 19)],
                         ids=str)
def test_cayley_isomorphic_implies_isomorphic(G):
    els = G.elements()[1:]
    for m in range(4):
        for S in itertools.combinations(els, m):
            cf = canonical_form(cayley_digraph(G, S))
            for al in automorphisms(G):
                assert canonical_form(cayley_digraph(G, apply_set(G, al, S))) == cf
