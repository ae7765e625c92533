from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from cmtorus.errors import AmbientMismatch, BoundExceeded
from cmtorus.groups import (
    FiniteAbelianGroup,
    Subgroup,
    abelian_groups_of_order,
    element_order,
    enumerate_subgroups,
    is_cyclic,
    quotient,
    subgroup_join,
)


def closure(G, gens):
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = G.add(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return frozenset(seen)


def brute_subgroups(G):
    """All subgroups as element sets, grown one generator at a time."""
    elems = list(G.elements())
    found = {closure(G, [])}
    frontier = list(found)
    while frontier:
        S = frontier.pop()
        for g in elems:
            if g in S:
                continue
            T = closure(G, list(S) + [g])
            if T not in found:
                found.add(T)
                frontier.append(T)
    return found


def order_profile(G):
    return Counter(G.element_order(g) for g in G.elements())


SMALL = [G for n in range(1, 33) for G in abelian_groups_of_order(n)]


def test_z2_has_two_subgroups():
    assert len(enumerate_subgroups(FiniteAbelianGroup([2]))) == 2


def test_klein_four_has_five_subgroups():
    assert len(enumerate_subgroups(FiniteAbelianGroup([2, 2]))) == 5


def test_z4_z2_has_eight_subgroups():
    assert len(enumerate_subgroups(FiniteAbelianGroup([2, 4]))) == 8


@pytest.mark.parametrize("G", SMALL, ids=str)
def test_subgroup_count_matches_closure_enumeration(G):
    ours = enumerate_subgroups(G)
    assert len({S.key() for S in ours}) == len(ours)
    assert {S.element_set for S in ours} == brute_subgroups(G)


def test_subgroup_counts_order_64():
    for G in abelian_groups_of_order(64):
        if G.rank <= 2:
            assert {S.element_set for S in enumerate_subgroups(G)} == brute_subgroups(G)


def test_enumeration_bound():
    with pytest.raises(BoundExceeded):
        enumerate_subgroups(FiniteAbelianGroup([2, 2, 2]), bound=4)


def test_join_of_generating_pair():
    G = FiniteAbelianGroup([2, 2])
    assert subgroup_join(G.subgroup([(1, 0)]), G.subgroup([(0, 1)])).is_whole()


def test_join_needs_common_ambient():
    with pytest.raises(AmbientMismatch):
        subgroup_join(FiniteAbelianGroup([2]).whole(), FiniteAbelianGroup([4]).whole())


def test_quotient_example():
    G = FiniteAbelianGroup([2, 4])
    Q, pi = quotient(G, G.subgroup([(0, 2)]))
    assert Q.invariant_factors == (2, 2)
    assert pi.image(G.whole()).is_whole()


def test_element_order_and_cyclicity():
    G = FiniteAbelianGroup([2, 4])
    assert element_order(G, (0, 2)) == 2
    assert element_order(G, (1, 1)) == 4
    assert not is_cyclic(G)
    assert is_cyclic(FiniteAbelianGroup([8]))


def test_invariant_factor_validation():
    with pytest.raises(ValueError):
        FiniteAbelianGroup([4, 2])
    with pytest.raises(ValueError):
        FiniteAbelianGroup([1])


def test_from_cyclic_factors():
    assert FiniteAbelianGroup.from_cyclic_factors([4, 6]).invariant_factors == (2, 12)


@pytest.mark.parametrize("G", [G for G in SMALL if G.order >= 4], ids=str)
def test_quotients_match_coset_enumeration(G):
    for S in enumerate_subgroups(G):
        Q, pi = quotient(G, S)
        assert Q.order * S.order == G.order
        # abelian groups are determined by their element-order counts
        cosets = {}
        for g in G.elements():
            cosets.setdefault(pi(g), []).append(g)
        assert len(cosets) == Q.order
        for img, members in cosets.items():
            assert {S.coset_rep(x) for x in members} == {S.coset_rep(members[0])}
        assert order_profile(Q) == Counter(Q.element_order(x) for x in cosets)
        assert pi.kernel() == S


def test_quotient_extremes():
    G = FiniteAbelianGroup([2, 4, 8])
    Q, _ = quotient(G, G.trivial())
    assert Q == G
    Q, _ = quotient(G, G.whole())
    assert Q.order == 1


@settings(max_examples=200, derandomize=True, deadline=None)
@given(st.sampled_from([G for G in SMALL if G.rank >= 1]), st.data())
def test_canonicalization_is_idempotent(G, data):
    elems = list(G.elements())
    gens = data.draw(st.lists(st.sampled_from(elems), max_size=3))
    S = G.subgroup(gens)
    again = Subgroup.from_lattice(G, S.canonical_basis)
    assert again.canonical_basis == S.canonical_basis
    assert S.element_set == closure(G, gens)
    assert S.structure.group.order == S.order
    for g in S.canonical_generators():
        assert S.structure.to_ambient(S.structure.from_ambient(g)) == g
