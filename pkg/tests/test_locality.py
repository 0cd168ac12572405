import pytest

from partialgroups.corpus import group
from partialgroups.errors import DeltaNotClosed, EmptyDelta, PreconditionNotMet
from partialgroups.groups import bits, mask_of
from partialgroups.locality import (check_locality, check_normal_subsystem, check_saturation,
                                    compute_Rw_Lw, fusion_system, group_fusion_system,
                                    hand_built_fusion, locality_from_group, subsystem_over)

INSTANCES = [("s3", 2), ("s3", 3), ("a4", 2), ("a4", 3), ("s4", 2), ("s4", 3), ("d8", 2), ("gl23", 3)]


def sub(G, *labels):
    return G.closure([G.labels.index(x) for x in labels])


@pytest.mark.parametrize("name,p", INSTANCES)
@pytest.mark.parametrize("policy", ["all", "centric", "centric-radical"])
def test_locality_checks(name, p, policy):
    L = locality_from_group(group(name), p, policy)
    results = check_locality(L, 3)
    assert all(r.passed for r in results), [(r.law, r.witness) for r in results]


@pytest.mark.parametrize("name,p", INSTANCES)
def test_fusion_matches_group_fusion(name, p):
    G = group(name)
    L = locality_from_group(G, p, "all")
    same, witness = fusion_system(L).same_as(group_fusion_system(G, G.sylow(p)))
    assert same, witness


@pytest.mark.parametrize("name,p", INSTANCES)
def test_group_fusion_saturated(name, p):
    G = group(name)
    assert check_saturation(group_fusion_system(G, G.sylow(p))).saturated


def test_right_domain_in_s3():
    G = group("s3")
    L = locality_from_group(G, 2, "all")
    assert [G.labels[s] for s in L.S] == ["()", "(1 2)"]
    r, l = compute_Rw_Lw(L, (G.labels.index("(1 3)"),))
    assert r == l == mask_of([0])
    r, _ = compute_Rw_Lw(L, (G.labels.index("(1 2)"),))
    assert r == L.s_full


def test_inversion_on_z4_is_not_saturated():
    Z4 = group("z4")
    inversion = [Z4.inverse[x] for x in range(4)]
    report = check_saturation(hand_built_fusion(Z4, 2, [inversion]))
    assert not report.axiom_I and report.witness == (Z4.full,)


def test_transposition_subgroup_not_normal_subsystem():
    G = group("s4")
    F = locality_from_group(G, 2, "all").fusion_system()
    S = F.S
    R = mask_of([S.labels.index("()"), S.labels.index("(1 2)")])
    report = check_normal_subsystem(subsystem_over(F, R), F)
    assert not report.N2 and "N2" in report.witness
    V = mask_of([S.labels.index(x) for x in ("()", "(1 3)(2 4)", "(1 4)(2 3)", "(1 2)(3 4)")])
    assert F.strongly_closed(V)


def test_flag_implications():
    for name, p in INSTANCES:
        G = group(name)
        F = group_fusion_system(G, G.sylow(p))
        for P, fl in F.classify().items():
            if fl.normal:
                assert fl.strongly_closed
            if fl.strongly_closed:
                assert fl.weakly_closed
            if fl.weakly_closed:
                assert F.S.is_normal(P)
            if fl.central:
                assert fl.normal


def test_bad_collections():
    G = group("s4")
    S = G.sylow(2)
    with pytest.raises(EmptyDelta):
        locality_from_group(G, 2, "custom", custom=[])
    with pytest.raises(DeltaNotClosed):
        locality_from_group(G, 2, "custom", custom=[sub(G, "(1 2)")])
    with pytest.raises(PreconditionNotMet):
        locality_from_group(G, 2, "bogus")
    assert bits(S)


def test_s4_centric_objects():
    L = locality_from_group(group("s4"), 2, "centric")
    assert sorted(len(bits(P)) for P in L.delta) == [4, 4, 4, 8]
    L = locality_from_group(group("s4"), 2, "centric-radical")
    assert sorted(len(bits(P)) for P in L.delta) == [4, 8]
