import os

import pytest

from partialgroups.autcx import find_isomorphism
from partialgroups.core import GroupLike, check_axioms
from partialgroups.corpus import group
from partialgroups.errors import ParseError
from partialgroups.formats import (LocalityFile, build_extension_file, build_pair, parse, read,
                                   write_group, write_pair, write_partial_table, write_transporter)
from partialgroups.groups import FiniteGroup
from partialgroups.transporter import check_transporter_axioms, from_group
from partialgroups.twist import TwistingPair, validate_twisting_pair

CORPUS = os.path.join(os.path.dirname(__file__), os.pardir, "corpus")


def corpus_file(name):
    return os.path.join(CORPUS, name)


@pytest.mark.parametrize("text,line,column", [
    ("group permutation 3 1,0,2 1,2,x", 1, 27),
    ("group table 2 0 1 1", 1, 19),
    ("bogus 1", 1, 1),
    ("# comment\ngroup named nope", 2, 13),
    ("partial table 3 0\ninv 0 2 1\nword 1 1 = 2\nword 1 = 5", 4, 8),
])
def test_parse_errors_have_positions(text, line, column):
    with pytest.raises(ParseError) as exc:
        parse(text, CORPUS)
    assert (exc.value.line, exc.value.column) == (line, column)
    assert f"(line {line}, column {column})" in str(exc.value)


def test_empty_and_missing():
    with pytest.raises(ParseError):
        parse("# nothing here\n")
    with pytest.raises(ParseError) as exc:
        read(corpus_file("does-not-exist.pg"))
    assert "line" not in str(exc.value)


def test_continuation_lines():
    G = parse("group table 2\n0 1\n1 0\n")
    assert isinstance(G, FiniteGroup) and G.order == 2


@pytest.mark.parametrize("name", ["z2", "z3", "z4", "klein", "s3", "d8", "q8", "a4", "s4"])
def test_corpus_groups(name):
    G = read(corpus_file(f"{name}.pg"))
    assert find_isomorphism(GroupLike(G), GroupLike(group(name)), 3) is not None


@pytest.mark.parametrize("name", ["s3", "q8", "gl23"])
def test_group_round_trip(name):
    G = group(name)
    H = parse(write_group(G))
    assert H.rows == G.rows


def test_partial_table_round_trip():
    M = GroupLike(group("s3"))
    T = parse(write_partial_table(M, 3))
    assert check_axioms(T, 3).ok
    assert all(T.product(w) == M.product(w) for w in M.accepted_words(3))


def test_locality_file():
    lf = read(corpus_file("s4_centric.loc"))
    assert isinstance(lf, LocalityFile)
    L = lf.build()
    assert len(L.delta) == 4


def test_pair_file():
    pf = read(corpus_file("z3_by_z2_inversion.pair"))
    p = build_pair(pf, 4)
    assert validate_twisting_pair(p).valid
    again = build_pair(parse(write_pair("z3", "z2", p), CORPUS), 4)
    assert again.psi == p.psi and again.eta == p.eta


def test_pair_missing_entry_reported_at_head():
    with pytest.raises(ParseError) as exc:
        build_pair(parse("pair z3 z2\nt 1 map 0 2 1\n", CORPUS), 4)
    assert exc.value.line == 1


@pytest.mark.parametrize("name", ["nonrigid.ext", "s3.ext"])
def test_extension_files(name):
    ext = build_extension_file(read(corpus_file(name)), 4)
    assert ext.total.size == ext.fibre_loc.pg.size * ext.base_loc.pg.size


def test_transporter_round_trip():
    T = read(corpus_file("s4_centric.tr"))
    assert check_transporter_axioms(T).ok
    assert write_transporter(T) == write_transporter(from_group(group("s4"), 2, "centric"))
    assert parse(write_transporter(T)).morphisms == T.morphisms


def test_trivial_pair_text():
    F, B = GroupLike(group("z2")), GroupLike(group("z2"))
    text = write_pair("z2", "z2", TwistingPair.trivial(F, B))
    assert build_pair(parse(text, CORPUS), 4).eta == TwistingPair.trivial(F, B).eta
