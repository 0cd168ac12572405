import itertools

import pytest

from partialgroups.autcx import enumerate_automorphisms, find_isomorphism, identity_aut
from partialgroups.cohomology import classical_extensions, group_type
from partialgroups.core import GroupLike, check_axioms
from partialgroups.corpus import group
from partialgroups.errors import InvalidTwistingPair
from partialgroups.twist import (TwistingPair, build_extension, check_theorem_A,
                                 check_twisting_function, enumerate_twisting_pairs,
                                 validate_twisting_pair)


def B(name):
    return GroupLike(group(name))


def z2_by_z2(eta_value):
    F, Q = B("z2"), B("z2")
    ident = identity_aut(F)
    return TwistingPair.from_functions(F, Q, lambda g: ident,
                                       lambda g, h: eta_value if g == h == 1 else F.unit)


def table_of(M):
    return [[M.product((a, b)) for b in range(M.size)] for a in range(M.size)]


def test_z2_by_z2_twisted_is_z4():
    ext = build_extension(z2_by_z2(1))
    M = ext.total
    assert check_axioms(M).ok
    assert find_isomorphism(M, B("z4")) is not None
    assert find_isomorphism(M, B("klein")) is None


def test_trivial_pair_is_direct_product():
    ext = build_extension(TwistingPair.trivial(B("z2"), B("z2")))
    assert find_isomorphism(ext.total, B("klein")) is not None


def test_cocycle_failure_is_reported():
    F, Q = B("z3"), B("z2")
    inv = tuple(F.inverse)
    p = TwistingPair.from_functions(F, Q, lambda g: inv if g else identity_aut(F),
                                    lambda g, h: 1 if g == h == 1 else F.unit)
    cert = validate_twisting_pair(p)
    assert not cert.valid and cert.reason == "cocycle formula fails"
    assert cert.witness == (1, 1, 1)
    with pytest.raises(InvalidTwistingPair):
        build_extension(p)


def test_unnormalized_pairs_rejected():
    F, Q = B("z2"), B("z2")
    p = TwistingPair.from_functions(F, Q, lambda g: identity_aut(F), lambda g, h: 1)
    assert validate_twisting_pair(p).reason == "eta is not normalized"
    p = TwistingPair(F, Q, [(1, 0), (0, 1)], {(g, h): 0 for g in range(2) for h in range(2)})
    assert validate_twisting_pair(p).reason == "t(1) is not the identity"


def brute_force_count(fibre, base):
    F, Q = B(fibre), B(base)
    auts = enumerate_automorphisms(F).automorphisms
    e = Q.unit
    nz = [g for g in range(Q.size) if g != e]
    slots = [(g, h) for g in nz for h in nz]
    count = 0
    for ts in itertools.product(auts, repeat=len(nz)):
        psi = [identity_aut(F)] * Q.size
        for g, a in zip(nz, ts):
            psi[g] = a
        for vals in itertools.product(range(F.size), repeat=len(slots)):
            eta = {(g, h): F.unit for g in range(Q.size) for h in range(Q.size)}
            eta.update(zip(slots, vals))
            count += validate_twisting_pair(TwistingPair(F, Q, psi, eta)).valid
    return count


@pytest.mark.parametrize("fibre,base,count", [
    ("z2", "z2", 2), ("z3", "z2", 4), ("z2", "z3", 4), ("z4", "z2", 6), ("klein", "z2", 10),
])
def test_pair_counts(fibre, base, count):
    assert brute_force_count(fibre, base) == count
    assert sum(1 for _ in enumerate_twisting_pairs(B(fibre), B(base))) == count


@pytest.mark.parametrize("fibre,base", [("z2", "z2"), ("z3", "z2"), ("z2", "z3")])
def test_total_spaces_match_classical_extensions(fibre, base):
    F, Q = group(fibre), group(base)
    types = {group_type(table_of(build_extension(p).total))
             for p in enumerate_twisting_pairs(B(fibre), B(base))}
    auts = enumerate_automorphisms(B(fibre)).automorphisms
    want = set()
    for action in itertools.product(auts, repeat=Q.order):
        action = list(action)
        if action[Q.identity] != identity_aut(B(fibre)):
            continue
        if not all(tuple(action[Q.mul(g, h)]) == tuple(action[g][action[h][x]] for x in range(F.order))
                   for g in range(Q.order) for h in range(Q.order)):
            continue
        for cls in classical_extensions(Q, F, action):
            want.add(group_type(cls[0]))
    assert types == want


@pytest.mark.parametrize("fibre,base", [("z2", "z2"), ("z3", "z2"), ("klein", "z3"), ("z2", "s3")])
def test_extension_checks_small(fibre, base):
    for p in enumerate_twisting_pairs(B(fibre), B(base), limit=3):
        report = check_theorem_A(build_extension(p))
        assert report.ok, report.lines()


def test_twisting_function_laws():
    for p in enumerate_twisting_pairs(B("s3"), B("z2"), limit=4):
        results = check_twisting_function(p, 3)
        assert all(r.passed for r in results), [(r.law, r.witness) for r in results]


def test_first_face_needs_inverse_chain():
    from partialgroups.simplicial import Simplex, face, simplices
    from partialgroups.twist import alpha, chain_act, rtcp_face, twisting_function
    wrong = 0
    for p in enumerate_twisting_pairs(B("z3"), B("z3")):
        M = build_extension(p).total
        for n in (2, 3):
            for w in simplices(M, n):
                y, b = alpha(M, w)
                want = alpha(M, face(Simplex(M, w), 0).word)
                assert rtcp_face(p, y, b, 0) == want
                # the uninverted chain
                printed = (chain_act(twisting_function(p, b), y[1:]), b[1:])
                wrong += printed != want
    assert wrong


def test_vectorized_matches_scalar():
    import numpy as np
    from partialgroups.simplicial import check_anti_involution
    from partialgroups.twist import check_bundle_model, check_bundle_model_scalar
    for p in enumerate_twisting_pairs(B("klein"), B("z3"), limit=2):
        M = build_extension(p).total
        fast = [(r.law, r.passed) for r in check_bundle_model(M, 3)]
        slow = [(r.law, r.passed) for r in check_bundle_model_scalar(M, 3)]
        assert fast == slow
        assert all(r.passed for r in check_anti_involution(M, 3))
        words = np.array(list(itertools.product(range(M.size), repeat=3)), dtype=np.int64)
        acc = M.accept_many(words)
        prod = M.product_many(words, acc)
        for w, a, v in zip(words.tolist(), acc, prod):
            assert a == M._accepts(tuple(w))
            if a:
                assert v == M._product(tuple(w))
