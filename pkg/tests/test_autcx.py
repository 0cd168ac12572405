import itertools

import pytest

from partialgroups.autcx import (AutChain, compose_aut, compute_center, compute_normalizer,
                                 enumerate_automorphisms, exact_sequence, homotopy_action,
                                 homotopy_morphism, identity_aut, is_homotopy, left_conjugation,
                                 restricted_aut)
from partialgroups.core import GroupLike
from partialgroups.corpus import corpus_partial_groups, group
from partialgroups.errors import BudgetExceeded, InvalidMorphism
from partialgroups.locality import locality_from_group
from partialgroups.simplicial import Simplex, simplices

CORPUS = corpus_partial_groups()


def brute_aut_order(G):
    n = G.order
    count = 0
    for perm in itertools.permutations(range(n)):
        if all(perm[G.mul(a, b)] == G.mul(perm[a], perm[b]) for a in range(n) for b in range(n)):
            count += 1
    return count


def brute_center_order(G):
    return sum(all(G.mul(a, b) == G.mul(b, a) for b in range(G.order)) for a in range(G.order))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_exact_sequence(name):
    M = CORPUS[name]
    report = exact_sequence(M)
    assert report.ok, report.checks
    o = report.orders
    assert o["Aut"] == o["Inn"] * o["Out"]
    assert o["Inn"] * o["Z"] == o["N"]


def test_bs3_and_bz3_orders():
    assert exact_sequence(CORPUS["s3"]).orders == {"N": 6, "Z": 1, "Aut": 6, "Inn": 6, "Out": 1}
    assert exact_sequence(CORPUS["z3"]).orders == {"N": 3, "Z": 3, "Aut": 2, "Inn": 1, "Out": 2}


@pytest.mark.parametrize("name", ["z2", "z3", "z4", "klein", "s3"])
def test_aut_orders_against_brute_force(name):
    G = group(name)
    M = GroupLike(G)
    assert enumerate_automorphisms(M).order == brute_aut_order(G)
    assert compute_center(M).order == brute_center_order(G)
    assert compute_normalizer(M).order == G.order


@pytest.mark.parametrize("name", ["d8", "q8"])
def test_order_eight(name):
    G = group(name)
    M = GroupLike(G)
    assert compute_center(M).order == brute_center_order(G) == 2
    assert enumerate_automorphisms(M).order == {"d8": 8, "q8": 24}[name]


def test_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_automorphisms(GroupLike(group("s4")), budget=10)


def test_homotopy_relation():
    M = GroupLike(group("s3"))
    ident = identity_aut(M)
    for eta in range(M.size):
        c = left_conjugation(M, eta)
        assert is_homotopy(M, c, eta, ident)
        ch = homotopy_morphism(M, c, eta, ident)
        for w in simplices(M, 1):
            assert homotopy_action(ch, Simplex(M, w)).word == (M.product((c[w[0]], eta)),)
    t = M.element("(1 2)")
    with pytest.raises(InvalidMorphism):
        homotopy_morphism(M, ident, t, ident)


def test_chain_tensor_and_inverse():
    M = GroupLike(group("s3"))
    ident = identity_aut(M)
    a, b = M.element("(1 2)"), M.element("(1 2 3)")
    ca, cb = left_conjugation(M, a), left_conjugation(M, b)
    x = AutChain(M, (ca, ident), (a,))
    y = AutChain(M, (cb, ident), (b,))
    assert x.is_valid() and y.is_valid()
    t = x.tensor(y)
    assert t.is_valid() and t == x.tensor_alt(y)
    assert t.objects[0] == compose_aut(ca, cb)
    assert x.inverse() == x.inverse_alt() and x.inverse().is_valid()


def test_restricted_aut_of_s4_locality():
    L = locality_from_group(group("s4"), 2, "centric")
    sub, report = restricted_aut(L)
    assert report.ok, report.checks
    S = set(L.S)
    assert all({a[x] for x in S} == S for a in sub.automorphisms)
    assert sub.order == len(sub.inner) * len(sub.outer_classes)
