import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from dci_forge.ci import cayley_isomorphism, has_m_dci
from dci_forge.constructions import (
    CosetConstruction,
    WitnessPair,
    check_coset_construction,
    explicit_witness,
    lemma31_pair,
    lemma32_pair,
    lemma33_witness,
    lemma34_witness,
    sample_coset_constructions,
    search_witness,
    verify_witness,
)
from dci_forge.digraph import cayley_digraph, coset_bipartite_check
from dci_forge.errors import InvalidConstruction, OutOfRange, VerificationFailed
from dci_forge.groups import (
    GroupElement as E,
    GroupSpec,
    apply_set,
    automorphisms,
    homomorphism_from_generators,
    index_map,
    inverse,
    multiply,
    parse_element,
    subgroup_generated,
)

D8, D12, D18 = GroupSpec.dihedral(4), GroupSpec.dihedral(6), GroupSpec.dihedral(9)


def els(G, *names):
    return frozenset(parse_element(G, x) for x in names)


def test_lemma32_examples():
    w = lemma32_pair(4, [E(0, 0)], [E(1, 0), E(3, 0)])
    assert w.S == els(D8, "b", "a", "a^3") and w.T == els(D8, "b", "b*a", "b*a^3")
    assert w.non_ci_checked
    verify_witness(w)
    w = lemma32_pair(4, [E(2, 0)], [E(1, 0), E(3, 0)])
    assert w.S == els(D8, "b*a^2", "a", "a^3") and w.T == els(D8, "b*a^2", "b*a", "b*a^3")
    assert cayley_isomorphism(D8, w.S, w.T) is None
    w = lemma32_pair(6, [E(2, 0), E(4, 0)], [])
    assert w.S == w.T and not w.non_ci_checked
    verify_witness(w)


def test_lemma32_preconditions():
    with pytest.raises(InvalidConstruction):
        lemma32_pair(4, [E(1, 0)], [])
    with pytest.raises(InvalidConstruction):
        lemma32_pair(6, [], [E(1, 0)])
    with pytest.raises(InvalidConstruction):
        lemma32_pair(5, [], [])


def test_lemma33_examples():
    w = lemma33_witness(6, 4)
    assert w.S == els(D12, "b*a^2", "b*a^4", "a", "a^5")
    assert w.T == els(D12, "b*a^2", "b*a^4", "b*a", "b*a^5")
    assert lemma33_witness(4, 3).S == els(D8, "b", "a", "a^3")
    w = lemma33_witness(6, 5)
    assert w.S == els(D12, "b", "b*a^2", "b*a^4", "a", "a^5")
    with pytest.raises(OutOfRange):
        lemma33_witness(6, 2)
    with pytest.raises(OutOfRange):
        lemma33_witness(6, 6)


@pytest.mark.parametrize("n", [4, 6, 8, 10, 12, 14, 16])
def test_lemma33_all_m(n):
    for m in range(3, n):
        w = lemma33_witness(n, m)
        assert w.m == m and w.non_ci_checked
        verify_witness(w)


def test_lemma34_examples():
    w = lemma34_witness(9, 3, 7)
    assert w.S == els(D18, "a", "a^4", "a^7", "b*a", "b*a^4", "b*a^7", "a^3")
    assert w.T == els(D18, "a", "a^4", "a^7", "b*a", "b*a^4", "b*a^7", "a^6")
    w = lemma34_witness(9, 3, 5)
    assert w.S == els(D18, "a", "a^4", "a^7", "a^3", "b") and w.case == "lemma34/case2.2"
    assert w.T == els(D18, "a", "a^4", "a^7", "a^6", "b")
    w = lemma34_witness(9, 3, 6)
    assert w.S == els(D18, "a", "a^4", "a^7", "a^3", "b", "b*a^3")
    assert w.T == els(D18, "a", "a^4", "a^7", "a^6", "b", "b*a^6")
    with pytest.raises(OutOfRange):
        lemma34_witness(9, 3, 4)
    with pytest.raises(InvalidConstruction):
        lemma34_witness(12, 3, 10)


@pytest.mark.parametrize("n,p", [(9, 3), (18, 3), (25, 5), (27, 3), (36, 3), (45, 3)])
def test_lemma34_every_covered_m(n, p):
    covered = []
    for m in range(1, 2 * n - 1):
        try:
            w = lemma34_witness(n, p, m)
        except OutOfRange:
            continue
        assert w.m == m and w.non_ci_checked
        verify_witness(w)
        covered.append(m)
    assert covered
    assert max(covered) <= n - 1


def test_lemma34_d18_covered_set():
    got = {}
    for m in range(1, 18):
        try:
            got[m] = lemma34_witness(9, 3, m).case
        except OutOfRange:
            pass
    assert got == {5: "lemma34/case2.2", 6: "lemma34/case3.2", 7: "lemma34/case1", 8: "lemma34/case2.2"}


def test_lemma31_examples():
    P = subgroup_generated(D18, [E(3, 0)])
    C = frozenset(multiply(D18, x, z) for x in (E(1, 0), parse_element(D18, "b*a")) for z in P.members)
    alpha = homomorphism_from_generators(D18, [E(3, 0)], [E(6, 0)])
    cc = CosetConstruction(D18, P, P, C, frozenset({E(3, 0)}), frozenset({E(6, 0)}), alpha)
    w = lemma31_pair(cc)
    assert w.m == 7 and w.S == lemma34_witness(9, 3, 7).S
    ident = {x: x for x in P.members}
    cc = CosetConstruction(D18, P, P, C, frozenset({E(3, 0)}), frozenset({E(3, 0)}), ident)
    assert lemma31_pair(cc).phi == tuple(range(18))
    M = subgroup_generated(D18, [E(3, 0), D18.b])
    alpha = homomorphism_from_generators(D18, [E(3, 0), D18.b], [E(6, 0), D18.b])
    aP = frozenset(multiply(D18, E(1, 0), z) for z in P.members)
    cc = CosetConstruction(D18, P, M, aP, frozenset({E(3, 0), D18.b}), frozenset({E(6, 0), D18.b}), alpha)
    w = lemma31_pair(cc)
    verify_witness(w)


def test_lemma31_rejects_broken_invariants():
    P = subgroup_generated(D18, [E(3, 0)])
    alpha = homomorphism_from_generators(D18, [E(3, 0)], [E(6, 0)])
    bad_C = frozenset({E(1, 0)})
    cc = CosetConstruction(D18, P, P, bad_C, frozenset({E(3, 0)}), frozenset({E(6, 0)}), alpha)
    with pytest.raises(InvalidConstruction) as exc:
        lemma31_pair(cc)
    assert "C is not a union of H-cosets" in exc.value.failures
    K = subgroup_generated(D18, [D18.b])
    cc = CosetConstruction(D18, K, K, frozenset(), frozenset({D18.b}), frozenset({D18.b}), {x: x for x in K.members})
    assert "H is not normal in G" in check_coset_construction(cc)
    cc = CosetConstruction(D18, P, P, frozenset(), frozenset({E(3, 0)}), frozenset({E(3, 0)}), alpha)
    assert "S_M^alpha != T_M" in check_coset_construction(cc)


def test_verify_witness_negatives():
    w = lemma33_witness(6, 4)
    broken = dataclasses.replace(w, phi=tuple(range(12)))
    with pytest.raises(VerificationFailed) as exc:
        verify_witness(broken)
    assert exc.value.condition == "arc-preservation"
    al = automorphisms(D12)[3]
    S = w.S
    T = apply_set(D12, al, S)
    fake = WitnessPair(D12, S, T, index_map(D12, al), True, "fake")
    with pytest.raises(VerificationFailed) as exc:
        verify_witness(fake)
    assert exc.value.condition == "aut-scan"
    with pytest.raises(VerificationFailed):
        verify_witness(dataclasses.replace(w, T=frozenset(list(w.T)[:3])))


def test_explicit_witness_and_complements():
    for m in range(5, 13):
        w = explicit_witness(D18, m)
        assert w is not None and w.m == m
        verify_witness(w)
    assert explicit_witness(D18, 4) is None
    assert explicit_witness(GroupSpec.dihedral(5), 3) is None
    w = explicit_witness(GroupSpec.dihedral(6), 8)
    assert w.case.endswith("/complement")
    verify_witness(w)


@pytest.mark.parametrize("n", [4, 6])
def test_search_witness_small_m(n):
    G = GroupSpec.dihedral(n)
    for m in (1, 2):
        w = search_witness(G, m)
        assert w is not None
        verify_witness(w)
    assert search_witness(GroupSpec.dihedral(5), 2) is None


def test_d18_witnesses_imply_no_mdci():
    for m in (5, 6, 7, 8):
        verify_witness(lemma34_witness(9, 3, m))
        assert not has_m_dci(D18, m).has_property


@pytest.mark.parametrize("n", [9, 15])
def test_sampled_constructions(n):
    G = GroupSpec.dihedral(n)
    for cc in sample_coset_constructions(G, 15, seed=n):
        assert check_coset_construction(cc) == []
        w = lemma31_pair(cc)
        assert w.S == cc.C | cc.S_M and w.T == cc.C | cc.T_M
        verify_witness(w)
        H = cc.H.members
        for x in G.elements():
            y = G.element(w.phi[G.index(x)])
            assert multiply(G, y, inverse(G, x)) in H
        for g in cc.transversal:
            assert w.phi[G.index(g)] == G.index(g)
        _check_bipartite(G, cc, w)


def _check_bipartite(G, cc, w):
    gs, gt = cayley_digraph(G, w.S), cayley_digraph(G, w.T)
    reps = {min(multiply(G, h, c) for h in cc.H.members) for c in cc.C}
    for v in G.elements():
        U = {G.index(multiply(G, h, v)) for h in cc.H.members}
        for c in reps:
            W = {G.index(multiply(G, h, multiply(G, c, v))) for h in cc.H.members}
            assert coset_bipartite_check(gs, U, W) and coset_bipartite_check(gt, U, W)


@given(st.sampled_from([4, 6, 8, 10, 12, 14, 16, 18]), st.data())
@settings(max_examples=40)
def test_lemma33_cardinality(n, data):
    m = data.draw(st.integers(3, n - 1))
    w = lemma33_witness(n, m)
    assert len(w.S) == len(w.T) == m
    # the reflection part of S is kept, the rotations of S become reflections in T
    assert {g for g in w.S if g.ref} <= w.T
    assert all(g.ref for g in w.T)
