import random

import pytest

from partialgroups.autcx import find_isomorphism
from partialgroups.core import GroupLike
from partialgroups.corpus import group
from partialgroups.errors import AxiomsFailed
from partialgroups.groups import popcount
from partialgroups.locality import locality_from_group
from partialgroups.transporter import (check_maximal_representatives, check_quotient,
                                       check_transporter_axioms, from_group, from_locality,
                                       maximal_representative, quotient_to_locality, random_chain,
                                       representatives)

_cache = {}


def s4_centric():
    if "s4" not in _cache:
        _cache["s4"] = from_group(group("s4"), 2, "centric")
    return _cache["s4"]


def test_s4_centric_shape():
    T = s4_centric()
    assert len(T.objects) == 4 and len(T.morphisms) == 88


def test_s4_centric_axioms():
    report = check_transporter_axioms(s4_centric())
    assert report.ok, report.lines()


def test_deleting_a_morphism_breaks_category():
    T = s4_centric().delete(7)
    report = check_transporter_axioms(T)
    assert not report.ok
    assert not report.result("category").passed


def test_quotient_is_group_locality():
    res = quotient_to_locality(s4_centric())
    assert res.ok, res.checks
    L = locality_from_group(group("s4"), 2, "centric")
    assert find_isomorphism(res.locality.pg, L.pg, 3) is not None


@pytest.mark.parametrize("name,p", [("s3", 3), ("s3", 2), ("a4", 2), ("s4", 2)])
def test_all_objects_quotient_is_group(name, p):
    G = group(name)
    res = quotient_to_locality(from_group(G, p, "all"))
    assert all(r.passed for r in check_quotient(res))
    assert find_isomorphism(res.locality.pg, GroupLike(G), 3) is not None


def test_round_trip_through_locality():
    L = locality_from_group(group("s4"), 2, "centric-radical")
    T = from_locality(L)
    assert check_transporter_axioms(T).ok
    res = quotient_to_locality(T)
    assert find_isomorphism(res.locality.pg, L.pg, 3) is not None


def test_maximal_representatives():
    results = check_maximal_representatives(s4_centric(), samples=200, seed=7)
    assert all(r.passed for r in results), results


def test_maximal_representative_is_largest():
    T = s4_centric()
    rng = random.Random(3)
    for _ in range(50):
        chain = random_chain(T, rng, rng.randint(1, 3))
        m = maximal_representative(T, chain)
        top = max(popcount(T.source(r[0])) for r in representatives(T, chain))
        assert popcount(T.source(m[0])) == top
        assert all(T.is_iso(i) for i in m)


def test_broken_system_does_not_quotient():
    with pytest.raises(AxiomsFailed):
        quotient_to_locality(s4_centric().delete(7))
