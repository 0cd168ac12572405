import itertools

import pytest
from hypothesis import given, settings, strategies as st

from partialgroups.core import (ExplicitTable, GroupLike, check_axioms, conjugate, is_partial_normal,
                                is_subgroup, kernel, left_conjugate)
from partialgroups.corpus import corpus_partial_groups, group
from partialgroups.errors import InvalidMorphism, NotASubgroup
from partialgroups.simplicial import validate_morphism

CORPUS = corpus_partial_groups()


def perm_mul(p, q):
    # composite p after q, the convention of the S3 table
    return tuple(p[q[i]] for i in range(len(q)))


def perm_inv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def parity(p):
    return sum(p[a] > p[b] for a in range(len(p)) for b in range(a + 1, len(p))) % 2


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_axioms(name):
    report = check_axioms(CORPUS[name], 4)
    assert report.ok, report.lines()


def test_missing_inverse_word_breaks_cancellation():
    Z3 = GroupLike(group("z3"))
    a, ai = 1, Z3.inverse[1]
    T = ExplicitTable.from_partial_group(Z3, 3, drop=[(ai, a)])
    report = check_axioms(T, 3)
    assert not report.result("inverse-cancel").passed
    assert report.result("inverse-cancel").witness == (ai, a)


def test_s3_products_against_permutations():
    S3 = group("s3")
    M = GroupLike(S3)
    P = S3.perms
    for w in itertools.product(range(6), repeat=3):
        want = (0, 1, 2)
        for x in w:
            want = perm_mul(want, P[x])
        assert P[M.product(w)] == want


def test_s3_conjugation_against_permutations():
    S3 = group("s3")
    M = GroupLike(S3)
    P = S3.perms
    for u in range(6):
        for x in range(6):
            right = perm_mul(perm_mul(perm_inv(P[u]), P[x]), P[u])
            left = perm_mul(perm_mul(P[u], P[x]), perm_inv(P[u]))
            assert P[conjugate(M, u, x)] == right
            assert P[left_conjugate(M, u, x)] == left


def test_partial_normal_in_s3():
    S3 = group("s3")
    M = GroupLike(S3)
    a3 = [i for i, p in enumerate(S3.perms) if parity(p) == 0]
    assert is_partial_normal(M, a3)
    transposition = S3.labels.index("(1 2)")
    assert not is_partial_normal(M, [S3.identity, transposition])
    with pytest.raises(NotASubgroup):
        is_partial_normal(M, [S3.identity, S3.labels.index("(1 2 3)")])


def test_kernel_of_sign():
    S3 = group("s3")
    M, Z2 = GroupLike(S3), GroupLike(group("z2"))

    def sign(i):
        return parity(S3.perms[i])

    f = validate_morphism(sign, M, Z2)
    K = kernel(f)
    assert sorted(K.members) == [i for i in range(6) if sign(i) == 0]
    assert K.is_subgroup and K.is_normal and len(K.members) == 3


def test_non_morphism_rejected():
    Z4, Z2 = GroupLike(group("z4")), GroupLike(group("z2"))
    with pytest.raises(InvalidMorphism):
        validate_morphism([0, 1, 1, 1], Z4, Z2)


def test_subgroup_predicate():
    M = GroupLike(group("d8"))
    assert is_subgroup(M, range(M.size))
    assert is_subgroup(M, [M.unit])


# invariants over random accepted words

NAMES = ["s3", "d8", "s4@2:centric", "s4@3:all", "q8"]


@st.composite
def accepted_word(draw, max_len=4):
    M = CORPUS[draw(st.sampled_from(NAMES))]
    word = []
    for _ in range(draw(st.integers(0, max_len))):
        choices = [x for x in range(M.size) if M.accepts(tuple(word) + (x,))]
        word.append(draw(st.sampled_from(choices)))
    return M, tuple(word)


@settings(max_examples=200, deadline=None)
@given(accepted_word())
def test_cancellation_word(mw):
    M, w = mw
    v = M.inv_word(w) + w
    assert M.accepts(v) and M.product(v) == M.unit


@settings(max_examples=200, deadline=None)
@given(accepted_word(), st.data())
def test_unit_insertion(mw, data):
    M, w = mw
    i = data.draw(st.integers(0, len(w)))
    v = w[:i] + (M.unit,) + w[i:]
    assert M.accepts(v) and M.product(v) == M.product(w)


@settings(max_examples=200, deadline=None)
@given(accepted_word(), st.data())
def test_fold(mw, data):
    M, w = mw
    i = data.draw(st.integers(0, len(w)))
    j = data.draw(st.integers(i, len(w)))
    v = w[:i] + (M.product(w[i:j]),) + w[j:]
    assert M.accepts(v) and M.product(v) == M.product(w)
