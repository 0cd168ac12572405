import pytest

from partialgroups.cohomology import (CochainComplex, choose_lifts, classical_cohomology_order,
                                      classical_extensions, classify_extensions, named_action,
                                      obstruction_class, strong_equivalence)
from partialgroups.core import GroupLike
from partialgroups.corpus import group
from partialgroups.errors import PreconditionNotMet
from partialgroups.twist import TwistingPair, enumerate_twisting_pairs


def B(name):
    return GroupLike(group(name))


CASES = [("z2", "z2", "trivial"), ("z3", "z3", "trivial"), ("z3", "z2", "trivial"),
         ("z4", "z2", "inversion"), ("z3", "z2", "inversion"), ("z2", "z4", "trivial")]


@pytest.mark.parametrize("fibre,base,action", CASES)
def test_classification_matches_classical_oracle(fibre, base, action):
    F, Q = B(fibre), B(base)
    act = named_action(F, Q, action)
    report = classify_extensions(F, Q, act)
    classical = classical_extensions(group(base), group(fibre), act)
    h2 = classical_cohomology_order(group(base), group(fibre), act, 2)
    assert report.class_count == len(classical) == h2 == report.h2_order
    assert report.agrees and report.exists


@pytest.mark.parametrize("fibre,base,action,count", [
    ("z2", "z2", "trivial", 2), ("z3", "z3", "trivial", 3), ("z3", "z2", "trivial", 1),
    ("z4", "z2", "inversion", 2),
])
def test_frozen_counts(fibre, base, action, count):
    F, Q = B(fibre), B(base)
    assert classify_extensions(F, Q, named_action(F, Q, action)).class_count == count


@pytest.mark.parametrize("fibre,base,action", CASES + [("s3", "z2", "trivial"), ("klein", "z3", "trivial")])
def test_obstruction_agrees_with_search(fibre, base, action):
    F, Q = B(fibre), B(base)
    act = named_action(F, Q, action)
    obs = obstruction_class(F, Q, act)
    assert obs.is_cocycle
    found = next(iter(enumerate_twisting_pairs(F, Q)), None) is not None
    assert obs.is_coboundary == found


def test_obstruction_independent_of_lifts():
    F, Q = B("z4"), B("z2")
    act = named_action(F, Q, "inversion")
    first = obstruction_class(F, Q, act, lifts=choose_lifts(F, Q, act, eta_order="first"))
    last = obstruction_class(F, Q, act, lifts=choose_lifts(F, Q, act, eta_order="last"))
    assert first.is_coboundary and last.is_coboundary


def test_dd_vanishes():
    F, Q = B("z3"), B("z2")
    act = named_action(F, Q, "inversion")
    K = CochainComplex(F, Q, act)
    for n in (1, 2):
        assert K.check_dd(n)


def test_strong_equivalence_of_shifted_pair():
    F, Q = B("z3"), B("z3")
    pairs = list(enumerate_twisting_pairs(F, Q))
    trivial = TwistingPair.trivial(F, Q)
    assert strong_equivalence(trivial, trivial) is not None
    classes = sum(strong_equivalence(trivial, p) is not None for p in pairs)
    assert classes == len(pairs) // 3


def test_inversion_needs_index_two():
    with pytest.raises(PreconditionNotMet):
        named_action(B("z3"), B("z3"), "inversion")
