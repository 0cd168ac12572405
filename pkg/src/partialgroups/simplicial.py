"""The simplicial view of a partial group.

An ``n``-simplex of a partial group is an accepted word of length ``n``.  Faces
drop the first or last letter or multiply two adjacent letters; degeneracies
insert the unit.  Front and back face operators are built from iterated outer
faces, which keeps the edge enumeration a genuine composite of operators
rather than a read-out of letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import DEFAULT_BOUND, AxiomReport, LawResult, PartialGroup, word_tables
from .errors import DomainViolation, IndexOutOfRange, InvalidMorphism


@dataclass(frozen=True)
class Simplex:
    owner: PartialGroup
    word: tuple

    @property
    def dimension(self) -> int:
        return len(self.word)

    @property
    def is_degenerate(self) -> bool:
        return self.owner.unit in self.word

    def __str__(self):
        return self.owner.word_str(self.word)


def simplex(M: PartialGroup, word: Iterable[int]) -> Simplex:
    word = tuple(word)
    if not M.accepts(word):
        raise DomainViolation(f"{M.word_str(word)} is not a simplex", word)
    return Simplex(M, word)


def simplices(M: PartialGroup, n: int) -> list[tuple]:
    """All accepted words of length ``n`` (cached per partial group)."""
    cache = M.__dict__.setdefault("_simplex_cache", {})
    if n not in cache:
        cache[n] = list(M.accepted_words(n))
    return cache[n]


def nondegenerate_simplices(M: PartialGroup, n: int) -> list[tuple]:
    return [w for w in simplices(M, n) if M.unit not in w]


def face(s: Simplex, i: int) -> Simplex:
    n = s.dimension
    if n < 1 or not 0 <= i <= n:
        raise IndexOutOfRange(f"face d_{i} on a simplex of dimension {n}", s.word)
    w = s.word
    if i == 0:
        return Simplex(s.owner, w[1:])
    if i == n:
        return Simplex(s.owner, w[:-1])
    merged = s.owner.product(w[i - 1:i + 1])
    return Simplex(s.owner, w[:i - 1] + (merged,) + w[i + 1:])


def degeneracy(s: Simplex, i: int) -> Simplex:
    n = s.dimension
    if not 0 <= i <= n:
        raise IndexOutOfRange(f"degeneracy s_{i} on a simplex of dimension {n}", s.word)
    return Simplex(s.owner, s.word[:i] + (s.owner.unit,) + s.word[i:])


def front_face(s: Simplex, r: int) -> Simplex:
    """F_r: the face spanned by the first r+1 vertices (iterated last faces)."""
    if not 0 <= r <= s.dimension:
        raise IndexOutOfRange(f"front face F_{r} on dimension {s.dimension}", s.word)
    while s.dimension > r:
        s = face(s, s.dimension)
    return s


def back_face(s: Simplex, r: int) -> Simplex:
    """B_r: the face spanned by the last r+1 vertices (iterated first faces)."""
    if not 0 <= r <= s.dimension:
        raise IndexOutOfRange(f"back face B_{r} on dimension {s.dimension}", s.word)
    while s.dimension > r:
        s = face(s, 0)
    return s


def edge_letter(s: Simplex) -> int:
    assert s.dimension == 1
    return s.word[0]


def enumerate_edges(s: Simplex) -> tuple:
    """E via repeated (F_{m-1}, B_1) splittings from the back."""
    if s.dimension < 1:
        raise IndexOutOfRange("edge enumeration needs dimension >= 1", s.word)
    edges = []
    while s.dimension > 1:
        edges.append(edge_letter(back_face(s, 1)))
        s = front_face(s, s.dimension - 1)
    edges.append(edge_letter(s))
    return tuple(reversed(edges))


def enumerate_edges_from_front(s: Simplex) -> tuple:
    """E via repeated (F_1, B_{m-1}) splittings from the front."""
    if s.dimension < 1:
        raise IndexOutOfRange("edge enumeration needs dimension >= 1", s.word)
    edges = []
    while s.dimension > 1:
        edges.append(edge_letter(front_face(s, 1)))
        s = back_face(s, s.dimension - 1)
    edges.append(edge_letter(s))
    return tuple(edges)


def product_op(s: Simplex) -> int:
    """Pi_n as the iterated inner face d_1^{n-1}; the unit for n = 0."""
    if s.dimension == 0:
        return s.owner.unit
    while s.dimension > 1:
        s = face(s, 1)
    return s.word[0]


def split(s: Simplex, r: int) -> tuple[Simplex, Simplex]:
    """D_{r,s} = (F_r, B_s) with r + s = dimension."""
    return front_face(s, r), back_face(s, s.dimension - r)


def product_rs(s: Simplex, r: int) -> Simplex:
    """Pi_{r,s}: the 2-simplex on vertices 0, r, n."""
    if not 0 <= r <= s.dimension:
        raise IndexOutOfRange(f"Pi_(r,s) with r={r} on dimension {s.dimension}", s.word)
    front, back = split(s, r)
    return simplex(s.owner, (product_op(front), product_op(back)))


def anti_involution(s: Simplex) -> Simplex:
    """Reverse the word and invert each letter."""
    return Simplex(s.owner, s.owner.inv_word(s.word))


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class PartialGroupMorphism:
    source: PartialGroup
    target: PartialGroup
    on_elements: tuple
    bound: int = DEFAULT_BOUND

    def __call__(self, x: int) -> int:
        return self.on_elements[x]

    def apply(self, s: Simplex) -> Simplex:
        return Simplex(self.target, tuple(self.on_elements[x] for x in s.word))

    def compose(self, other: "PartialGroupMorphism") -> "PartialGroupMorphism":
        """self after other."""
        return PartialGroupMorphism(other.source, self.target,
                                    tuple(self.on_elements[y] for y in other.on_elements),
                                    min(self.bound, other.bound))

    @property
    def is_bijective(self) -> bool:
        return sorted(self.on_elements) == list(range(self.target.size)) and \
            self.source.size == self.target.size


def morphism_failure(f: Sequence[int], source: PartialGroup, target: PartialGroup,
                     bound: int = DEFAULT_BOUND) -> tuple | None:
    """First accepted source word whose image is rejected or has the wrong product."""
    f = np.asarray(f, dtype=np.int64)
    if len(f) != source.size:
        return ()
    T = word_tables(source, bound)
    for k in range(bound + 1):
        idx = np.flatnonzero(T.acc[k])
        if not len(idx):
            continue
        words = T.words(k, idx)
        image = f[words] if k else words
        ok = target.accept_many(image)
        prod = target.product_many(image, ok)
        want = f[T.prod[k][idx]]
        good = ok & (prod == want)
        if not good.all():
            return T.decode(k, int(idx[np.flatnonzero(~good)[0]]))
    return None


def validate_morphism(f: Sequence[int] | Callable, source: PartialGroup, target: PartialGroup,
                      bound: int = DEFAULT_BOUND) -> PartialGroupMorphism:
    if callable(f):
        f = [f(x) for x in range(source.size)]
    f = tuple(int(y) for y in f)
    if len(f) != source.size or any(not 0 <= y < target.size for y in f):
        raise InvalidMorphism("map is not total on the source carrier")
    if f[source.unit] != target.unit:
        raise InvalidMorphism("unit is not preserved", (source.unit,))
    witness = morphism_failure(f, source, target, bound)
    if witness is not None:
        raise InvalidMorphism(f"image of {source.word_str(witness)} breaks the product", witness)
    return PartialGroupMorphism(source, target, f, bound)


def identity_morphism(M: PartialGroup) -> PartialGroupMorphism:
    return PartialGroupMorphism(M, M, tuple(range(M.size)))


# ---------------------------------------------------------------------------
# exhaustive identity checks


class _Tally:
    def __init__(self, name):
        self.name = name
        self.checked = 0
        self.witness = None

    def check(self, ok: bool, word):
        self.checked += 1
        if not ok and self.witness is None:
            self.witness = word

    def result(self, M) -> LawResult:
        if self.witness is None:
            return LawResult(self.name, True, self.checked)
        return LawResult(self.name, False, self.checked, self.witness, M.word_str(self.witness))


def check_simplicial_identities(M: PartialGroup, max_dim: int = 3) -> list[LawResult]:
    dd, ds, ss, red = (_Tally(n) for n in ("face-face", "face-degeneracy",
                                           "degeneracy-degeneracy", "single-vertex"))
    red.check(len(simplices(M, 0)) == 1, ())
    for n in range(max_dim + 1):
        for w in simplices(M, n):
            x = Simplex(M, w)
            for j in range(n + 1):
                for i in range(j):
                    if n >= 2:
                        dd.check(face(face(x, j), i) == face(face(x, i), j - 1), w)
            for j in range(n + 1):
                y = degeneracy(x, j)
                for i in range(n + 2):
                    if i < j:
                        want = degeneracy(face(x, i), j - 1) if n >= 1 else None
                    elif i in (j, j + 1):
                        want = x
                    else:
                        want = degeneracy(face(x, i - 1), j) if n >= 1 else None
                    if want is not None:
                        ds.check(face(y, i) == want, w)
                for i in range(j + 1):
                    ss.check(degeneracy(degeneracy(x, j), i) == degeneracy(degeneracy(x, i), j + 1), w)
    return [t.result(M) for t in (dd, ds, ss, red)]


def check_enumeration(M: PartialGroup, max_dim: int = 3) -> list[LawResult]:
    agree, inj = _Tally("edge-enumeration"), _Tally("edge-injective")
    for n in range(1, max_dim + 1):
        seen = {}
        for w in simplices(M, n):
            x = Simplex(M, w)
            e1, e2 = enumerate_edges(x), enumerate_edges_from_front(x)
            agree.check(e1 == e2 == w, w)
            inj.check(seen.setdefault(e1, w) == w, w)
    return [agree.result(M), inj.result(M)]


def check_front_back(M: PartialGroup, max_dim: int = 3) -> list[LawResult]:
    """Iterated outer faces, and how front/back faces interact with inner faces."""
    outer, front, back = _Tally("front-back-iterates"), _Tally("front-inner"), _Tally("back-inner")
    for n in range(1, max_dim + 1):
        for w in simplices(M, n):
            x = Simplex(M, w)
            for j in range(n + 1):
                outer.check(front_face(x, n - j).word == w[:n - j]
                            and back_face(x, n - j).word == w[j:], w)
            for i in range(1, n):
                y = face(x, i)
                for k in range(n):
                    if k < i:
                        want = front_face(x, k)
                    else:
                        want = face(front_face(x, k + 1), i)
                    front.check(front_face(y, k) == want, w)
                    if i < n - k:
                        want = back_face(x, k)
                    else:
                        want = face(back_face(x, k + 1), i - (n - k - 1))
                    back.check(back_face(y, k) == want, w)
    return [outer.result(M), front.result(M), back.result(M)]


def insert_unit_edge(M: PartialGroup, edges: tuple, i: int) -> tuple:
    """Bottom map of the degeneracy square: a degenerate edge at position i."""
    return edges[:i] + (M.unit,) + edges[i:]


def check_degeneracy_square(M: PartialGroup, max_dim: int = 3,
                            morphisms: Sequence[PartialGroupMorphism] = ()) -> list[LawResult]:
    sq, nat = _Tally("edge-degeneracy-square"), _Tally("edge-naturality")
    for n in range(1, max_dim + 1):
        for w in simplices(M, n):
            x = Simplex(M, w)
            e = enumerate_edges(x)
            for i in range(n + 1):
                sq.check(enumerate_edges(degeneracy(x, i)) == insert_unit_edge(M, e, i), w)
            for f in morphisms:
                nat.check(enumerate_edges(f.apply(x)) == tuple(f(a) for a in e), w)
    out = [sq.result(M)]
    if morphisms:
        out.append(nat.result(M))
    return out


def check_product_split(M: PartialGroup, max_dim: int = 3) -> list[LawResult]:
    whole, square = _Tally("product-factorization"), _Tally("product-split-square")
    for n in range(max_dim + 1):
        for w in simplices(M, n):
            x = Simplex(M, w)
            p = product_op(x)
            for r in range(n + 1):
                two = product_rs(x, r)
                whole.check(product_op(two) == p == M.product(w), w)
                front, back = split(x, r)
                square.check(enumerate_edges(two) == (product_op(front), product_op(back)), w)
    return [whole.result(M), square.result(M)]


def check_anti_involution(M: PartialGroup, max_dim: int = 3) -> list[LawResult]:
    inv, loop = _Tally("anti-involution"), _Tally("anti-involution-loop")
    for n in range(max_dim + 1):
        for w in simplices(M, n):
            x = Simplex(M, w)
            y = anti_involution(x)
            inv.check(M.accepts(y.word) and anti_involution(y) == x, w)
            both = y.word + w
            loop.check(M.accepts(both) and M.product(both) == M.unit, w)
    return [inv.result(M), loop.result(M)]


def check_simplicial_layer(M: PartialGroup, max_dim: int = 3,
                           morphisms: Sequence[PartialGroupMorphism] = ()) -> AxiomReport:
    report = AxiomReport(M.name or repr(M), max_dim)
    for fn in (check_simplicial_identities, check_enumeration, check_front_back,
               check_product_split, check_anti_involution):
        report.results.extend(fn(M, max_dim))
    report.results.extend(check_degeneracy_square(M, max_dim, morphisms))
    return report
