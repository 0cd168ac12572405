"""Named groups and the small instances used throughout the tests and the CLI."""

from __future__ import annotations

import itertools
from typing import Callable

from .core import GroupLike, PartialGroup
from .errors import PreconditionNotMet
from .groups import FiniteGroup


def gl23() -> FiniteGroup:
    """GL(2,3) acting on the eight nonzero vectors of F_3^2."""
    vecs = [v for v in itertools.product(range(3), repeat=2) if v != (0, 0)]

    def perm(m):
        return [vecs.index(((m[0][0] * a + m[0][1] * b) % 3, (m[1][0] * a + m[1][1] * b) % 3))
                for a, b in vecs]

    gens = [perm([[1, 1], [0, 1]]), perm([[1, 0], [1, 1]]), perm([[1, 0], [0, 2]])]
    return FiniteGroup.from_permutations(gens, 8, "GL23")


GROUPS: dict[str, Callable[[], FiniteGroup]] = {
    "z1": lambda: FiniteGroup.cyclic(1),
    "z2": lambda: FiniteGroup.cyclic(2),
    "z3": lambda: FiniteGroup.cyclic(3),
    "z4": lambda: FiniteGroup.cyclic(4),
    "z6": lambda: FiniteGroup.cyclic(6),
    "klein": FiniteGroup.klein,
    "v4": FiniteGroup.klein,
    "s3": lambda: FiniteGroup.symmetric(3),
    "d8": lambda: FiniteGroup.dihedral(8),
    "q8": FiniteGroup.quaternion,
    "a4": lambda: FiniteGroup.alternating(4),
    "s4": lambda: FiniteGroup.symmetric(4),
    "gl23": gl23,
}

_cache: dict[str, FiniteGroup] = {}


def group(name: str) -> FiniteGroup:
    key = name.lower()
    if key not in GROUPS:
        raise PreconditionNotMet(f"unknown group name {name!r}")
    if key not in _cache:
        _cache[key] = GROUPS[key]()
    return _cache[key]


def corpus_partial_groups() -> dict[str, PartialGroup]:
    """The groups of the corpus as partial groups, plus the S4 localities."""
    from .locality import locality_from_group
    out: dict[str, PartialGroup] = {}
    for name in ("z2", "z3", "z4", "klein", "s3", "d8", "q8", "a4"):
        out[name] = GroupLike(group(name))
    S4 = group("s4")
    for policy in ("all", "centric", "centric-radical"):
        out[f"s4@2:{policy}"] = locality_from_group(S4, 2, policy).pg
    out["s4@3:all"] = locality_from_group(S4, 3, "all").pg
    return out


# ---------------------------------------------------------------------------
# locality extensions


def s3_extension():
    """Z3 -> S3 -> Z2 at p = 3."""
    from .locext import group_extension_to_locality_extension
    return group_extension_to_locality_extension(group("z3"), group("s3"), group("z2"), 3)


def a4_extension():
    """V4 -> A4 -> Z3 at p = 2."""
    from .locext import group_extension_to_locality_extension
    return group_extension_to_locality_extension(group("klein"), group("a4"), group("z3"), 2)


def gl23_extension():
    """Z2 -> GL(2,3) -> S4 at p = 2 with centric objects on the base: a p-group fibre."""
    from .locext import group_extension_to_locality_extension
    return group_extension_to_locality_extension(group("z2"), group("gl23"), group("s4"), 2,
                                                 base_policy="centric")


def group_base_extension():
    """S3 at p = 3 by the locality of S3 at p = 3 with the trivial pair: a group base."""
    from .locality import locality_from_group
    from .locext import trivial_extension
    return trivial_extension(locality_from_group(group("s3"), 3, "all"),
                             locality_from_group(group("s3"), 3, "all"))


def nonrigid_extension():
    """Z3 at p = 2 by Z2 at p = 2 with Delta'' = {Z2}, Z2 acting by inversion.

    The action is faithful and the kernel S0'' is trivial while S1'' is all
    of S'', so the extension is not rigid.
    """
    from .locality import locality_from_group
    from .locext import isotypical_extension
    from .twist import TwistingPair
    Z2 = group("z2")
    fibre = locality_from_group(group("z3"), 2, "all")
    base = locality_from_group(Z2, 2, "custom", custom=[Z2.full])
    inv = tuple(fibre.pg.inverse)
    ident = tuple(range(fibre.pg.size))
    unit = base.pg.unit
    pair = TwistingPair.from_functions(fibre.pg, base.pg, lambda g: ident if g == unit else inv,
                                       lambda g, h: fibre.pg.unit, "inversion")
    return isotypical_extension(fibre, base, pair, "Z3.Z2")
