"""Finite partial groups as a word calculus.

A partial group here is a carrier ``0 .. size-1`` with a unit, an involutive
inversion, a membership oracle for the word domain, and a product on accepted
words.  Concrete kinds:

* ``GroupLike``: every word is accepted (the nerve of a group).
* ``ExplicitTable``: accepted words and their products listed up to a bound.
* ``Objective`` (see :mod:`partialgroups.locality`): words conjugating chains
  of subgroups from a collection.
* ``Twisted`` (see :mod:`partialgroups.twist`): extensions built from twisting
  pairs.

Right conjugation is ``x^u = Pi(u^-1, x, u)``; left conjugation is
``^u x = Pi(u, x, u^-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainViolation, InvalidMorphism, NotASubgroup
from .groups import FiniteGroup

Word = tuple

DEFAULT_BOUND = 4


class PartialGroup:
    kind = "abstract"

    def __init__(self, size: int, unit: int, inverse: Sequence[int],
                 labels: Sequence[str] | None = None, name: str = ""):
        self.size = size
        self.unit = unit
        self.inverse = list(inverse)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(size)]
        self.name = name
        self._memo: dict[tuple, bool] = {}

    def __repr__(self):
        return f"{type(self).__name__}({self.name or self.size})"

    # scalar interface

    def accepts(self, word: Iterable[int]) -> bool:
        word = tuple(word)
        hit = self._memo.get(word)
        if hit is None:
            hit = bool(self._accepts(word))
            self._memo[word] = hit
        return hit

    def _accepts(self, word: Word) -> bool:
        raise NotImplementedError

    def _mul2(self, x: int, y: int) -> int:
        """Product of an accepted pair."""
        raise NotImplementedError

    def prod2(self, x: int, y: int) -> int | None:
        if not self.accepts((x, y)):
            return None
        return self._mul2(x, y)

    def _product(self, word: Word) -> int:
        if not word:
            return self.unit
        x = word[0]
        for y in word[1:]:
            x = self._mul2(x, y)
        return x

    def product(self, word: Iterable[int]) -> int:
        word = tuple(word)
        if not self.accepts(word):
            raise DomainViolation(f"word {self.word_str(word)} is not in the domain", word)
        return self._product(word)

    def inv(self, x: int) -> int:
        return self.inverse[x]

    def inv_word(self, word: Iterable[int]) -> Word:
        return tuple(self.inverse[x] for x in reversed(tuple(word)))

    def label(self, x: int) -> str:
        return self.labels[x]

    def word_str(self, word: Iterable[int]) -> str:
        return "[" + "|".join(self.labels[x] for x in word) + "]"

    def element(self, label: str) -> int:
        return self.labels.index(label)

    # vectorized interface

    def accept_many(self, words: np.ndarray) -> np.ndarray:
        return np.fromiter((self.accepts(tuple(w)) for w in words.tolist()),
                           dtype=bool, count=len(words))

    @cached_property
    def pair_table(self) -> np.ndarray:
        """size x size array of binary products, -1 where the pair is rejected."""
        n = self.size
        out = np.full((n, n), -1, dtype=np.int64)
        grid = np.array([(x, y) for x in range(n) for y in range(n)], dtype=np.int64).reshape(-1, 2)
        acc = self.accept_many(grid).reshape(n, n)
        for x in range(n):
            for y in range(n):
                if acc[x, y]:
                    out[x, y] = self._mul2(x, y)
        return out

    def fold_many(self, words: np.ndarray) -> np.ndarray:
        """Left fold of the binary product; -1 where some step is undefined."""
        n = self.size
        m, k = words.shape
        if k == 0:
            return np.full(m, self.unit, dtype=np.int64)
        ext = np.full((n + 1, n + 1), n, dtype=np.int64)
        t = self.pair_table
        ext[:n, :n] = np.where(t < 0, n, t)
        p = words[:, 0].astype(np.int64)
        for j in range(1, k):
            p = ext[p, words[:, j]]
        return np.where(p == n, -1, p)

    def product_many(self, words: np.ndarray, acc: np.ndarray) -> np.ndarray:
        return np.where(acc, self.fold_many(words), -1)

    # enumeration

    def accepted_words(self, length: int) -> Iterator[Word]:
        """Accepted words of a given length, extending accepted prefixes only."""
        if length == 0:
            if self.accepts(()):
                yield ()
            return
        stack: list[Word] = [()]
        while stack:
            w = stack.pop()
            if len(w) == length:
                yield w
                continue
            for x in reversed(range(self.size)):
                v = w + (x,)
                if self.accepts(v):
                    stack.append(v)


class GroupLike(PartialGroup):
    """The nerve of a finite group: every word is accepted."""

    kind = "GroupLike"

    def __init__(self, group: FiniteGroup, name: str | None = None):
        super().__init__(group.order, group.identity, group.inverse, group.labels,
                         name if name is not None else group.name)
        self.group = group

    def _accepts(self, word):
        return True

    def _mul2(self, x, y):
        return self.group.rows[x][y]

    def accept_many(self, words):
        return np.ones(len(words), dtype=bool)

    @cached_property
    def pair_table(self):
        return self.group.table


class ExplicitTable(PartialGroup):
    """Accepted words listed explicitly (with products) up to ``bound``."""

    kind = "ExplicitTable"

    def __init__(self, size: int, unit: int, inverse: Sequence[int], words: dict,
                 bound: int, labels=None, name=""):
        super().__init__(size, unit, inverse, labels, name)
        self.words = {tuple(w): int(v) for w, v in words.items()}
        self.words.setdefault((), unit)
        self.bound = bound

    def _accepts(self, word):
        return word in self.words

    def _mul2(self, x, y):
        return self.words[(x, y)]

    def _product(self, word):
        return self.words[word]

    def product_many(self, words, acc):
        out = np.full(len(words), -1, dtype=np.int64)
        for i in np.flatnonzero(acc):
            out[i] = self.words[tuple(words[i].tolist())]
        return out

    @classmethod
    def from_partial_group(cls, M: PartialGroup, bound: int, drop: Iterable[Word] = ()) -> "ExplicitTable":
        """Tabulate ``M`` up to ``bound``; words in ``drop`` are omitted (for negative tests)."""
        drop = {tuple(w) for w in drop}
        words = {}
        for k in range(bound + 1):
            for w in M.accepted_words(k):
                if w not in drop:
                    words[w] = M._product(w)
        return cls(M.size, M.unit, M.inverse, words, bound, M.labels, M.name + "~table")


def group_like(group: FiniteGroup) -> GroupLike:
    return GroupLike(group)


# ---------------------------------------------------------------------------
# axiom checking


@dataclass
class LawResult:
    law: str
    passed: bool
    checked: int
    witness: tuple | None = None
    detail: str = ""


@dataclass
class AxiomReport:
    subject: str
    bound: int
    results: list[LawResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[LawResult]:
        return [r for r in self.results if not r.passed]

    def result(self, law: str) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            status = "pass" if r.passed else "FAIL"
            line = f"{r.law}: {status} ({r.checked} checked)"
            if r.witness is not None:
                line += f" witness={r.detail or r.witness}"
            out.append(line)
        return out


LAWS = (
    "letters", "subwords", "identity-on-letters", "fold", "contraction", "inverse-cancel",
    "multiplicative", "associative", "unit-insertion", "cancel-insert", "cancellation",
    "inversion", "uncancellation",
)


class _WordTables:
    """All words of length <= bound over the carrier, indexed in base ``size``."""

    def __init__(self, M: PartialGroup, bound: int):
        self.M = M
        self.n = n = M.size
        self.bound = bound
        self.pw = [n ** k for k in range(2 * bound + 2)]
        self.acc: list[np.ndarray] = []
        self.prod: list[np.ndarray] = []
        self.fold: list[np.ndarray] = []
        for k in range(bound + 1):
            w = self.words(k)
            a = M.accept_many(w)
            self.acc.append(a)
            self.prod.append(M.product_many(w, a))
            self.fold.append(np.where(a, M.fold_many(w), -1))
        inv = np.array(M.inverse, dtype=np.int64)
        self.inv_letters = inv

    def words(self, k: int, idx: np.ndarray | None = None) -> np.ndarray:
        if idx is None:
            idx = np.arange(self.pw[k], dtype=np.int64)
        out = np.empty((len(idx), k), dtype=np.int64)
        for j in range(k):
            out[:, j] = (idx // self.pw[k - 1 - j]) % self.n
        return out

    def decode(self, k: int, i: int) -> tuple:
        return tuple(int(x) for x in self.words(k, np.array([i], dtype=np.int64))[0])

    def infix(self, k: int, idx: np.ndarray, a: int, b: int) -> np.ndarray:
        return (idx // self.pw[k - b]) % self.pw[b - a]

    def inverse_idx(self, k: int, idx: np.ndarray) -> np.ndarray:
        out = np.zeros_like(idx)
        for j in range(k):
            letter = (idx // self.pw[k - 1 - j]) % self.n
            out += self.inv_letters[letter] * self.pw[j]
        return out


def word_tables(M: PartialGroup, bound: int) -> _WordTables:
    """Word tables of ``M`` up to ``bound``, cached on the partial group."""
    cache = M.__dict__.setdefault("_word_tables", {})
    if bound not in cache:
        cache[bound] = _WordTables(M, bound)
    return cache[bound]


def _first(mask: np.ndarray) -> int | None:
    hits = np.flatnonzero(mask)
    return int(hits[0]) if len(hits) else None


def check_axioms(M: PartialGroup, bound: int = DEFAULT_BOUND) -> AxiomReport:
    """Exhaustively check the partial-group axioms and derived laws on words of length <= bound.

    Every word touched by a law has length at most ``bound``.  For an
    ``ExplicitTable`` the bound is capped at the table's own bound.
    """
    if isinstance(M, ExplicitTable):
        bound = min(bound, M.bound)
    T = word_tables(M, bound)
    n, L, pw = T.n, bound, T.pw
    unit = M.unit
    report = AxiomReport(M.name or repr(M), bound)

    def add(law, checked, k=None, i=None, detail=""):
        if i is None:
            report.results.append(LawResult(law, True, checked))
        else:
            w = T.decode(k, i)
            report.results.append(LawResult(law, False, checked, w, detail or M.word_str(w)))

    # letters: the empty word and every letter are accepted
    if not T.acc[0][0]:
        add("letters", n + 1, 0, 0, "[]")
    elif L >= 1 and not T.acc[1].all():
        add("letters", n + 1, 1, _first(~T.acc[1]))
    else:
        add("letters", n + 1)

    # subwords: prefixes and suffixes of accepted words are accepted
    fail = None
    checked = 0
    for k in range(1, L + 1):
        idx = np.flatnonzero(T.acc[k])
        checked += len(idx)
        good = T.acc[k - 1][idx // n] & T.acc[k - 1][idx % pw[k - 1]]
        if fail is None and not good.all():
            fail = (k, int(idx[_first(~good)]))
    add("subwords", checked, *(fail or (None, None)))

    # identity on letters
    if L >= 1:
        bad = T.prod[1] != np.arange(n)
        i = _first(bad)
        add("identity-on-letters", n, *((1, i) if i is not None else (None, None)))

    # fold: left fold of the binary product equals the product of the word
    fail, checked = None, 0
    for k in range(L + 1):
        idx = np.flatnonzero(T.acc[k])
        checked += len(idx)
        bad = T.fold[k][idx] != T.prod[k][idx]
        if fail is None and bad.any():
            fail = (k, int(idx[_first(bad)]))
    add("fold", checked, *(fail or (None, None)))

    def contract(k, idx, a, b, value):
        """Index of w[:a] + (value,) + w[b:] (length k-(b-a)+1)."""
        pre = idx // pw[k - a]
        suf = idx % pw[k - b]
        return pre * pw[k - b + 1] + value * pw[k - b] + suf

    # contraction: u.v.w accepted => u.Pi(v).w accepted with the same product
    fail, checked = None, 0
    for k in range(L + 1):
        idx = np.flatnonzero(T.acc[k])
        if not len(idx):
            continue
        pk = T.prod[k][idx]
        for a in range(k + 1):
            for b in range(a, k + 1):
                if b - a == 1:
                    continue
                k2 = k - (b - a) + 1
                if k2 > L:
                    continue
                v = T.prod[b - a][T.infix(k, idx, a, b)]
                j = contract(k, idx, a, b, v)
                good = T.acc[k2][j] & (T.prod[k2][j] == pk)
                checked += len(idx)
                if fail is None and not good.all():
                    fail = (k, int(idx[_first(~good)]))
    add("contraction", checked, *(fail or (None, None)))

    # inverse-cancel: u accepted => u^-1 . u accepted with product 1
    fail, checked = None, 0
    for k in range(L // 2 + 1):
        idx = np.flatnonzero(T.acc[k])
        j = T.inverse_idx(k, idx) * pw[k] + idx
        good = T.acc[2 * k][j] & (T.prod[2 * k][j] == unit)
        checked += len(idx)
        if fail is None and not good.all():
            fail = (2 * k, int(j[_first(~good)]))
    add("inverse-cancel", checked, *(fail or (None, None)))

    # multiplicative: Pi(u.v) = Pi(Pi(u), Pi(v))
    fail, checked = None, 0
    if L >= 2:
        for k in range(2, L + 1):
            idx = np.flatnonzero(T.acc[k])
            pk = T.prod[k][idx]
            for s in range(1, k):
                p1 = T.prod[s][idx // pw[k - s]]
                p2 = T.prod[k - s][idx % pw[k - s]]
                j = p1 * n + p2
                good = T.acc[2][j] & (T.prod[2][j] == pk)
                checked += len(idx)
                if fail is None and not good.all():
                    fail = (k, int(idx[_first(~good)]))
    add("multiplicative", checked, *(fail or (None, None)))

    # associative: Pi(Pi(u.v).w) = Pi(u.Pi(v.w))
    fail, checked = None, 0
    for k in range(L + 1):
        idx = np.flatnonzero(T.acc[k])
        if not len(idx):
            continue
        for a in range(k + 1):
            for b in range(a, k + 1):
                kl, kr = 1 + k - b, a + 1
                if kl > L or kr > L:
                    continue
                left = contract(k, idx, 0, b, T.prod[b][idx // pw[k - b]])
                right = contract(k, idx, a, k, T.prod[k - a][idx % pw[k - a]])
                good = (T.acc[kl][left] & T.acc[kr][right]
                        & (T.prod[kl][left] == T.prod[kr][right]))
                checked += len(idx)
                if fail is None and not good.all():
                    fail = (k, int(idx[_first(~good)]))
    add("associative", checked, *(fail or (None, None)))

    # unit insertion
    fail, checked = None, 0
    for k in range(L):
        idx = np.flatnonzero(T.acc[k])
        pk = T.prod[k][idx]
        for a in range(k + 1):
            j = contract(k, idx, a, a, np.full_like(idx, unit))
            good = T.acc[k + 1][j] & (T.prod[k + 1][j] == pk)
            checked += len(idx)
            if fail is None and not good.all():
                fail = (k, int(idx[_first(~good)]))
    add("unit-insertion", checked, *(fail or (None, None)))

    # cancel-insert: u.v accepted => u^-1.u.v and u.v.v^-1 accepted with products Pi(v), Pi(u)
    fail, checked = None, 0
    for k in range(L + 1):
        idx = np.flatnonzero(T.acc[k])
        for s in range(k + 1):
            u = idx // pw[k - s]
            v = idx % pw[k - s]
            if 2 * s + (k - s) <= L:
                j = (T.inverse_idx(s, u) * pw[k] + idx)
                kk = 2 * s + k - s
                good = T.acc[kk][j] & (T.prod[kk][j] == T.prod[k - s][v])
                checked += len(idx)
                if fail is None and not good.all():
                    fail = (kk, int(j[_first(~good)]))
            if s + 2 * (k - s) <= L:
                j = idx * pw[k - s] + T.inverse_idx(k - s, v)
                kk = s + 2 * (k - s)
                good = T.acc[kk][j] & (T.prod[kk][j] == T.prod[s][u])
                checked += len(idx)
                if fail is None and not good.all():
                    fail = (kk, int(j[_first(~good)]))
    add("cancel-insert", checked, *(fail or (None, None)))

    def functional(keys: np.ndarray, vals: np.ndarray) -> int | None:
        """Position of a key carrying two different values, if any."""
        if not len(keys):
            return None
        comp = np.sort(keys * (n + 1) + vals)
        ks = comp // (n + 1)
        clash = (ks[1:] == ks[:-1]) & (comp[1:] != comp[:-1])
        i = _first(clash)
        if i is None:
            return None
        hit = comp[i + 1]
        return int(_first(keys * (n + 1) + vals == hit))

    big = n + 1

    def keyed(prefix, p, side):
        return np.where(p < 0, -1, prefix * big * 2 + p * 2 + side)

    def _grouped_pair(name, key_fn, val_fn):
        checked = 0
        fail = None
        for s in range(L + 1):
            keys, vals, origin = [], [], []
            for k in range(s, L + 1):
                idx = np.flatnonzero(T.acc[k])
                keys.append(key_fn(k, s, idx))
                vals.append(val_fn(k, s, idx))
                origin.append((k, np.concatenate([idx, idx])))
            keys_a, vals_a = np.concatenate(keys), np.concatenate(vals)
            # entries with an undefined subword product are subword failures, reported above
            keep = np.flatnonzero((keys_a >= 0) & (vals_a >= 0))
            checked += len(keep)
            if fail is not None:
                continue
            pos = functional(keys_a[keep], vals_a[keep])
            if pos is not None:
                pos = int(keep[pos])
                for k, idx in origin:
                    if pos < len(idx):
                        fail = (k, int(idx[pos]))
                        break
                    pos -= len(idx)
        add(name, checked, *(fail or (None, None)))

    # cancellation: Pi(u.v) = Pi(u.w) => Pi(v) = Pi(w), on both sides
    def canc_key(k, s, idx):
        return np.concatenate([keyed(idx // pw[k - s], T.prod[k][idx], 0),
                               keyed(idx % pw[s], T.prod[k][idx], 1)])

    def canc_val(k, s, idx):
        return np.concatenate([T.prod[k - s][idx % pw[k - s]], T.prod[k - s][idx // pw[s]]])

    _grouped_pair("cancellation", canc_key, canc_val)

    # inversion: u accepted => u^-1 accepted with Pi(u^-1) = Pi(u)^-1
    fail, checked = None, 0
    for k in range(L + 1):
        idx = np.flatnonzero(T.acc[k])
        j = T.inverse_idx(k, idx)
        good = T.acc[k][j] & (T.prod[k][j] == T.inv_letters[T.prod[k][idx]])
        checked += len(idx)
        if fail is None and not good.all():
            fail = (k, int(idx[_first(~good)]))
    add("inversion", checked, *(fail or (None, None)))

    # uncancellation: Pi(v) = Pi(w) => Pi(u.v) = Pi(u.w), on both sides
    def unc_key(k, s, idx):
        return np.concatenate([keyed(idx // pw[k - s], T.prod[k - s][idx % pw[k - s]], 0),
                               keyed(idx % pw[s], T.prod[k - s][idx // pw[s]], 1)])

    def unc_val(k, s, idx):
        return np.concatenate([T.prod[k][idx], T.prod[k][idx]])

    _grouped_pair("uncancellation", unc_key, unc_val)
    return report


# ---------------------------------------------------------------------------
# conjugation and subgroups


def conjugation_domain(M: PartialGroup, u: int) -> set[int]:
    """{x : (u^-1, x, u) accepted}."""
    ui = M.inverse[u]
    return {x for x in range(M.size) if M.accepts((ui, x, u))}


def conjugate(M: PartialGroup, u: int, x: int) -> int:
    """Right conjugate x^u = Pi(u^-1, x, u)."""
    w = (M.inverse[u], x, u)
    if not M.accepts(w):
        raise DomainViolation(f"{M.label(x)} is not in the conjugation domain of {M.label(u)}", w)
    return M._product(w)


def left_conjugate(M: PartialGroup, u: int, x: int) -> int:
    """Left conjugate ^u x = Pi(u, x, u^-1)."""
    return conjugate(M, M.inverse[u], x)


def partial_subgroup_failure(M: PartialGroup, members: Iterable[int], bound: int = DEFAULT_BOUND):
    """First witness against being a partial subgroup, or None."""
    H = set(members)
    if M.unit not in H:
        return ("unit", ())
    for x in sorted(H):
        if M.inverse[x] not in H:
            return ("inversion", (x,))
    hs = np.array(sorted(H), dtype=np.int64)
    inside = np.zeros(M.size, dtype=bool)
    inside[hs] = True
    for k in range(2, bound + 1):
        for w in _member_words(hs, k):
            acc = M.accept_many(w)
            prod = M.product_many(w, acc)
            bad = acc & ~inside[np.where(prod < 0, 0, prod)]
            if bad.any():
                return ("product", tuple(int(v) for v in w[np.flatnonzero(bad)[0]]))
    return None


def _member_words(hs: np.ndarray, k: int, chunk: int = 1 << 18) -> Iterator[np.ndarray]:
    """All words of length k over ``hs``, in lexicographic chunks."""
    n = len(hs)
    total = n ** k
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        out = np.empty((len(idx), k), dtype=np.int64)
        for j in range(k):
            out[:, j] = hs[(idx // n ** (k - 1 - j)) % n]
        yield out


def is_partial_subgroup(M: PartialGroup, members: Iterable[int], bound: int = DEFAULT_BOUND) -> bool:
    return partial_subgroup_failure(M, members, bound) is None


def is_subgroup(M: PartialGroup, members: Iterable[int], bound: int = DEFAULT_BOUND) -> bool:
    """Partial subgroup all of whose words (up to the bound) are accepted."""
    hs = sorted(set(members))
    if not is_partial_subgroup(M, hs, bound):
        return False
    arr = np.array(hs, dtype=np.int64)
    return all(M.accept_many(w).all() for k in range(1, bound + 1) for w in _member_words(arr, k))


def is_partial_normal(M: PartialGroup, members: Iterable[int], bound: int = DEFAULT_BOUND) -> bool:
    """x^g in N whenever x in N and (g^-1, x, g) is accepted."""
    N = set(members)
    bad = partial_subgroup_failure(M, N, bound)
    if bad is not None:
        raise NotASubgroup(f"not a partial subgroup ({bad[0]})", bad[1])
    inside = np.zeros(M.size, dtype=bool)
    inside[sorted(N)] = True
    g = np.repeat(np.arange(M.size, dtype=np.int64), len(N))
    x = np.tile(np.array(sorted(N), dtype=np.int64), M.size)
    w = np.stack([np.array(M.inverse, dtype=np.int64)[g], x, g], axis=1)
    acc = M.accept_many(w)
    prod = M.product_many(w, acc)
    return bool(inside[prod[acc]].all())


@dataclass(frozen=True)
class PartialSubgroup:
    parent: PartialGroup
    members: frozenset
    is_subgroup: bool
    is_normal: bool


def partial_subgroup(M: PartialGroup, members: Iterable[int], bound: int = DEFAULT_BOUND) -> PartialSubgroup:
    members = frozenset(members)
    normal = is_partial_normal(M, members, bound)
    return PartialSubgroup(M, members, is_subgroup(M, members, bound), normal)


def kernel(f, bound: int = DEFAULT_BOUND) -> PartialSubgroup:
    """Kernel of a validated morphism; always a partial normal subgroup."""
    src, tgt = f.source, f.target
    members = frozenset(x for x in range(src.size) if f.on_elements[x] == tgt.unit)
    try:
        normal = is_partial_normal(src, members, bound)
    except NotASubgroup as exc:
        raise InvalidMorphism("kernel is not a partial subgroup", exc.witness) from exc
    if not normal:
        raise InvalidMorphism("kernel is not partial normal")
    return PartialSubgroup(src, members, is_subgroup(src, members, bound), True)
