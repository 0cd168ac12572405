import pytest
from hypothesis import given, settings, strategies as st

from partialgroups.core import ExplicitTable, GroupLike
from partialgroups.corpus import corpus_partial_groups, group
from partialgroups.errors import DomainViolation, IndexOutOfRange, InvalidMorphism
from partialgroups.simplicial import (Simplex, anti_involution, back_face, check_simplicial_layer,
                                      degeneracy, enumerate_edges, enumerate_edges_from_front, face,
                                      front_face, product_op, product_rs, simplex, simplices,
                                      validate_morphism)

CORPUS = corpus_partial_groups()
SMALL = ["z2", "z3", "z4", "klein", "s3", "s4@2:centric-radical"]


@pytest.mark.parametrize("name", SMALL)
def test_layer_identities(name):
    M = CORPUS[name]
    report = check_simplicial_layer(M, 3, morphisms=[])
    assert report.ok, report.lines()


def test_z4_inner_face():
    M = GroupLike(group("z4"))
    a = M.element("a")
    x = simplex(M, (a, a))
    assert face(x, 1).word == (M.product((a, a)),)
    assert face(x, 0).word == (a,) and face(x, 2).word == (a,)
    assert degeneracy(x, 1).word == (a, M.unit, a)


def test_operator_ranges():
    M = GroupLike(group("z2"))
    x = simplex(M, (1,))
    with pytest.raises(IndexOutOfRange):
        face(x, 2)
    with pytest.raises(IndexOutOfRange):
        front_face(x, 3)
    with pytest.raises(IndexOutOfRange):
        enumerate_edges(Simplex(M, ()))


def test_non_simplex_rejected():
    M = ExplicitTable.from_partial_group(GroupLike(group("z3")), 2)
    with pytest.raises(DomainViolation):
        simplex(M, (1, 1, 1))


def test_morphism_witness_is_square():
    Z4, Z2 = GroupLike(group("z4")), GroupLike(group("z2"))
    a = Z4.element("a")
    # a -> generator, a^2 -> generator: (a, a) maps to a word with the wrong product
    f = [0] * 4
    f[a] = 1
    f[Z4.product((a, a))] = 1
    f[Z4.product((a, a, a))] = 1
    with pytest.raises(InvalidMorphism) as exc:
        validate_morphism(f, Z4, Z2)
    assert exc.value.witness == (a, a)


def test_anti_involution_on_s3():
    M = GroupLike(group("s3"))
    for w in simplices(M, 3):
        y = anti_involution(Simplex(M, w))
        assert y.word == tuple(M.inverse[x] for x in reversed(w))
        assert M.product(y.word + w) == M.unit


@st.composite
def any_simplex(draw):
    M = CORPUS[draw(st.sampled_from(["s3", "d8", "s4@2:centric", "s4@3:all"]))]
    n = draw(st.integers(1, 4))
    return Simplex(M, draw(st.sampled_from(simplices(M, n))))


@settings(max_examples=150, deadline=None)
@given(any_simplex())
def test_edges_recover_word(x):
    assert enumerate_edges(x) == x.word == enumerate_edges_from_front(x)


@settings(max_examples=150, deadline=None)
@given(any_simplex(), st.data())
def test_faces_and_products(x, data):
    n = x.dimension
    r = data.draw(st.integers(0, n))
    assert product_op(product_rs(x, r)) == product_op(x) == x.owner.product(x.word)
    assert front_face(x, r).word == x.word[:r]
    assert back_face(x, r).word == x.word[n - r:]
    i = data.draw(st.integers(0, n))
    assert face(degeneracy(x, i), i) == x
