import pytest

from partialgroups.corpus import (a4_extension, group, group_base_extension, gl23_extension,
                                  nonrigid_extension, s3_extension)
from partialgroups.errors import PreconditionNotMet, SylowConditionFails
from partialgroups.groups import bits, popcount
from partialgroups.locality import check_normal_subsystem, check_saturation, locality_from_group
from partialgroups.locext import (build_sylow_and_delta, check_centric_radical_parts,
                                  check_conjugacy_representatives, check_conjugation_formula,
                                  check_cyclic_sylow, check_good, check_group_map,
                                  check_hom_equality, check_section, check_strongly_closed,
                                  compare_with_group_fusion, kernel_subgroups, pullback_sub_locality,
                                  section_sigma, section_sigma0, trivial_extension,
                                  verify_examples_T_equals_L)

_cache = {}


def induced(name):
    if name not in _cache:
        build = {"s3": s3_extension, "a4": a4_extension, "gl23": gl23_extension,
                 "group-base": group_base_extension, "nonrigid": nonrigid_extension}[name]
        _cache[name] = build_sylow_and_delta(build())
    return _cache[name]


ALL = ["s3", "a4", "gl23", "group-base", "nonrigid"]


@pytest.mark.parametrize("name", ALL)
def test_induced_locality_checks(name):
    ind = induced(name)
    assert all(r.passed for r in ind.checks), ind.checks
    assert check_conjugation_formula(ind.ext).passed
    assert check_strongly_closed(ind).passed


@pytest.mark.parametrize("name", ["s3", "a4", "gl23"])
def test_group_extensions_are_good(name):
    ind = induced(name)
    report = check_good(ind)
    assert report.good and report.rigid and report.admissible, report.lines()
    assert check_saturation(ind.fusion).saturated
    assert check_normal_subsystem(ind.fibre_fusion_in_S, ind.fusion).normal
    same, witness = compare_with_group_fusion(ind)
    assert same, witness
    assert check_group_map(ind.ext).passed


def test_s3_instance_shape():
    ind = induced("s3")
    assert len(ind.S) == 3 and len(ind.delta) == 1
    assert verify_examples_T_equals_L(ind, strict=False).equal


@pytest.mark.parametrize("name", ["gl23", "group-base"])
def test_induced_locality_is_whole(name):
    report = verify_examples_T_equals_L(induced(name))
    assert report.equal, report.lines()
    assert report.precondition == {"gl23": "p-group fibre", "group-base": "group base"}[name]


def test_nonrigid_counterexample():
    ind = induced("nonrigid")
    ext = ind.ext
    s0, s1 = kernel_subgroups(ext)
    assert s0 == 1 and s1 == ext.base_loc.s_full
    report = check_good(ind)
    assert not report.rigid and report.admissible
    with pytest.raises(PreconditionNotMet):
        verify_examples_T_equals_L(ind)
    t = verify_examples_T_equals_L(ind, strict=False)
    assert not t.equal and t.missing_elements


@pytest.mark.parametrize("name", ["s3", "a4", "gl23", "group-base", "nonrigid"])
def test_centric_radical_parts(name):
    ind = induced(name)
    if check_good(ind).admissible:
        assert check_centric_radical_parts(ind).passed


@pytest.mark.parametrize("name", ["s3", "a4", "gl23"])
def test_structure_of_T(name):
    ind = induced(name)
    assert check_conjugacy_representatives(ind).passed
    assert check_hom_equality(ind).passed
    assert check_cyclic_sylow(ind).passed


def test_trivial_extension_sylow():
    fibre = locality_from_group(group("s3"), 2, "all")
    base = locality_from_group(group("z4"), 2, "all")
    ind = build_sylow_and_delta(trivial_extension(fibre, base))
    assert len(ind.S) == len(fibre.S) * len(base.S)
    assert all(ind.fibre_part(P) in set(fibre.delta) for P in ind.delta)


def test_pullback_over_whole_base():
    ind = induced("s3")
    L = pullback_sub_locality(ind, range(ind.ext.base_loc.pg.size))
    assert all(r.passed for r in L.checks), L.checks


def test_pullback_sylow_condition():
    ind = induced("gl23")
    Bl = ind.ext.base_loc
    S = set(Bl.S)
    G = Bl.pg
    t = next(x for x in range(G.size) if G.prod2(x, x) == G.unit and x != G.unit and x not in S)
    with pytest.raises(SylowConditionFails):
        pullback_sub_locality(ind, [G.unit, t])
    L = pullback_sub_locality(ind, sorted(S))
    assert all(r.passed for r in L.checks)


@pytest.mark.parametrize("name", ["s3", "a4"])
def test_sections(name):
    ind = induced(name)
    ext = ind.ext
    results = check_section(ext, section_sigma0(ext))
    assert results[0].passed
    results = check_section(ext, section_sigma(ind), T=ind.T)
    assert all(r.passed for r in results), results


def test_s_sizes():
    assert popcount(induced("gl23").S_group.full) == 16
    assert len(bits(induced("a4").S_group.full)) == 4


def test_two_group_fibre_over_s3():
    S3 = group("s3")
    fibre = locality_from_group(group("z2"), 2, "all")
    base = locality_from_group(S3, 2, "custom", custom=[S3.sylow(2)])
    ind = build_sylow_and_delta(trivial_extension(fibre, base))
    report = verify_examples_T_equals_L(ind)
    assert report.equal and report.precondition == "p-group fibre"
