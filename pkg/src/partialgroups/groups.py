"""Finite groups given by Cayley tables, plus the small groups used throughout.

Elements are the integers ``0 .. order-1``.  Subsets are Python ``int``
bitmasks over those integers, which keeps subgroup lattices cheap to store and
compare.  Permutations compose right to left: ``(s*t)(i) = s(t(i))``.
"""

from __future__ import annotations

import itertools
from collections import deque
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def cycle_string(perm: Sequence[int]) -> str:
    """Cycle notation, 1-based, e.g. ``(1 2 3)``; the identity prints as ``()``."""
    seen = set()
    parts = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        parts.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(parts) or "()"


def compose(s: Sequence[int], t: Sequence[int]) -> tuple[int, ...]:
    """s after t."""
    return tuple(s[t[i]] for i in range(len(t)))


def perm_inverse(s: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(s)
    for i, j in enumerate(s):
        out[j] = i
    return tuple(out)


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse 1-based cycle notation such as ``(1,2)(3,4)`` or ``(1 2 3)``."""
    perm = list(range(degree))
    text = text.strip()
    if text in ("", "()", "1", "e"):
        return tuple(perm)
    for chunk in text.replace(" ", ",").split(")"):
        chunk = chunk.strip().lstrip("(")
        if not chunk:
            continue
        pts = [int(c) - 1 for c in chunk.split(",") if c]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    return tuple(perm)


class FiniteGroup:
    """A finite group given by its multiplication table."""

    def __init__(self, table, labels: Sequence[str] | None = None, name: str = "",
                 perms: Sequence[tuple[int, ...]] | None = None):
        self.table = np.asarray(table, dtype=np.int64)
        n = self.table.shape[0]
        if self.table.shape != (n, n):
            raise ValueError("multiplication table must be square")
        self.order = n
        self.rows: list[list[int]] = self.table.tolist()
        self.name = name
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        self.perms = list(perms) if perms is not None else None
        ident = [e for e in range(n) if self.rows[e] == list(range(n))]
        if len(ident) != 1:
            raise ValueError("table has no unique identity")
        self.identity = ident[0]
        inv = [-1] * n
        for a in range(n):
            row = self.rows[a]
            for b in range(n):
                if row[b] == self.identity:
                    inv[a] = b
                    break
        if -1 in inv:
            raise ValueError("table has an element without inverse")
        self.inverse = inv

    def __repr__(self):
        return f"FiniteGroup({self.name or self.order})"

    # constructors

    @classmethod
    def from_permutations(cls, gens: Sequence[Sequence[int]], degree: int | None = None,
                          name: str = "") -> "FiniteGroup":
        gens = [tuple(g) for g in gens]
        if degree is None:
            degree = len(gens[0]) if gens else 1
        ident = tuple(range(degree))
        elems = [ident]
        index = {ident: 0}
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = compose(x, g)
                if y not in index:
                    index[y] = len(elems)
                    elems.append(y)
                    queue.append(y)
        table = [[index[compose(a, b)] for b in elems] for a in elems]
        return cls(table, [cycle_string(p) for p in elems], name, perms=elems)

    @classmethod
    def cyclic(cls, n: int, gen: str = "a") -> "FiniteGroup":
        table = [[(i + j) % n for j in range(n)] for i in range(n)]
        labels = ["1"] + [gen if k == 1 else f"{gen}^{k}" for k in range(1, n)]
        return cls(table, labels, f"Z{n}")

    @classmethod
    def klein(cls) -> "FiniteGroup":
        table = [[i ^ j for j in range(4)] for i in range(4)]
        return cls(table, ["1", "a", "b", "ab"], "V4")

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        if n == 1:
            return cls.from_permutations([(0,)], 1, "S1")
        gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
        return cls.from_permutations(gens, n, f"S{n}")

    @classmethod
    def alternating(cls, n: int) -> "FiniteGroup":
        gens = []
        for k in range(2, n):
            p = list(range(n))
            p[0], p[1], p[k] = p[1], p[k], p[0]
            gens.append(tuple(p))
        return cls.from_permutations(gens or [tuple(range(n))], n, f"A{n}")

    @classmethod
    def dihedral(cls, order: int) -> "FiniteGroup":
        m = order // 2
        r = tuple((i + 1) % m for i in range(m))
        s = tuple((-i) % m for i in range(m))
        return cls.from_permutations([r, s], m, f"D{order}")

    @classmethod
    def quaternion(cls) -> "FiniteGroup":
        # elements (sign, unit) with unit in 1,i,j,k; index = 4*sign + unit
        mult = {
            (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
            (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
            (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
            (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
        }
        table = []
        for a in range(8):
            row = []
            for b in range(8):
                sg, u = mult[(a % 4, b % 4)]
                row.append(4 * ((a // 4 + b // 4 + sg) % 2) + u)
            table.append(row)
        names = ["1", "i", "j", "k"]
        labels = names + ["-" + x for x in names]
        return cls(table, labels, "Q8")

    @classmethod
    def direct_product(cls, g: "FiniteGroup", h: "FiniteGroup") -> "FiniteGroup":
        n, m = g.order, h.order
        table = [[g.rows[a // m][b // m] * m + h.rows[a % m][b % m] for b in range(n * m)]
                 for a in range(n * m)]
        labels = [f"({g.labels[a // m]},{h.labels[a % m]})" for a in range(n * m)]
        return cls(table, labels, f"{g.name}x{h.name}")

    # arithmetic

    def mul(self, a: int, b: int) -> int:
        return self.rows[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def prod(self, word: Iterable[int]) -> int:
        x = self.identity
        for y in word:
            x = self.rows[x][y]
        return x

    def conj(self, g: int, x: int) -> int:
        """Left conjugate g x g^-1."""
        return self.rows[self.rows[g][x]][self.inverse[g]]

    def power(self, a: int, k: int) -> int:
        x = self.identity
        if k < 0:
            a, k = self.inverse[a], -k
        for _ in range(k):
            x = self.rows[x][a]
        return x

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.rows[x][a]
            k += 1
        return k

    @cached_property
    def full(self) -> int:
        return (1 << self.order) - 1

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    # subsets and subgroups

    def closure(self, gens: Iterable[int]) -> int:
        """Bitmask of the subgroup generated by ``gens``."""
        gens = [g for g in gens if g != self.identity]
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.rows[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return mask_of(seen)

    def is_subgroup(self, mask: int) -> bool:
        els = bits(mask)
        if not (mask >> self.identity) & 1:
            return False
        for a in els:
            row = self.rows[a]
            for b in els:
                if not (mask >> row[b]) & 1:
                    return False
        return True

    def conj_mask(self, g: int, mask: int) -> int:
        """Bitmask of g H g^-1."""
        out = 0
        for x in bits(mask):
            out |= 1 << self.conj(g, x)
        return out

    def normalizer(self, mask: int, within: int | None = None) -> int:
        within = self.full if within is None else within
        return mask_of(g for g in bits(within) if self.conj_mask(g, mask) == mask)

    def centralizer(self, mask: int, within: int | None = None) -> int:
        within = self.full if within is None else within
        els = bits(mask)
        return mask_of(g for g in bits(within)
                       if all(self.rows[g][x] == self.rows[x][g] for x in els))

    def center(self) -> int:
        return self.centralizer(self.full)

    def transporter(self, p_mask: int, q_mask: int, within: int | None = None) -> int:
        """Bitmask of {g : g P g^-1 <= Q}."""
        within = self.full if within is None else within
        return mask_of(g for g in bits(within) if self.conj_mask(g, p_mask) & ~q_mask == 0)

    def is_normal(self, mask: int, within: int | None = None) -> bool:
        within = self.full if within is None else within
        return all(self.conj_mask(g, mask) == mask for g in bits(within))

    def cyclic_subgroups(self, within: int | None = None) -> list[int]:
        within = self.full if within is None else within
        return sorted({self.closure([g]) for g in bits(within)}, key=lambda m: (popcount(m), m))

    def subgroups(self, within: int | None = None) -> list[int]:
        """All subgroups of the subgroup ``within`` (default: the whole group)."""
        within = self.full if within is None else within
        cyclics = self.cyclic_subgroups(within)
        found = set(cyclics)
        queue = deque(cyclics)
        while queue:
            h = queue.popleft()
            for c in cyclics:
                if c & ~h:
                    j = self.closure(bits(h | c))
                    if j not in found:
                        found.add(j)
                        queue.append(j)
        return sorted(found, key=lambda m: (popcount(m), m))

    def is_p_group_mask(self, mask: int, p: int) -> bool:
        n = popcount(mask)
        while n % p == 0:
            n //= p
        return n == 1

    def sylow(self, p: int, within: int | None = None, start: int | None = None) -> int:
        """Deterministic Sylow p-subgroup of ``within`` containing the p-subgroup ``start``.

        Grows P one element at a time: while p divides [N(P):P] pick the first
        g in N(P) - P with g^p in P.
        """
        within = self.full if within is None else within
        P = self.closure([]) if start is None else start
        while True:
            n_mask = self.normalizer(P, within)
            if (popcount(n_mask) // popcount(P)) % p != 0:
                return P
            for g in bits(n_mask & ~P):
                if (P >> self.power(g, p)) & 1:
                    P = self.closure(bits(P) + [g])
                    break
            else:  # pragma: no cover - Cauchy guarantees a candidate
                raise RuntimeError("no element of order p in N(P)/P")

    def subgroup(self, mask: int, name: str = "") -> "FiniteGroup":
        """The subgroup as a standalone group; ``embedding`` maps new indices to old."""
        els = bits(mask)
        pos = {e: i for i, e in enumerate(els)}
        table = [[pos[self.rows[a][b]] for b in els] for a in els]
        sub = FiniteGroup(table, [self.labels[e] for e in els], name)
        sub.embedding = els
        return sub

    def homomorphism_kernel(self, images: Sequence[int], target: "FiniteGroup") -> int:
        return mask_of(g for g in range(self.order) if images[g] == target.identity)


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_power(n: int, p: int) -> bool:
    return p_part(n, p) == n


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1


class PermGroup:
    """A permutation group on a finite set given by explicit permutations (tuples).

    Used for automorphism groups of small subgroups, where elements are maps on
    the points of a subgroup rather than indices of an ambient group.
    """

    def __init__(self, elements: Iterable[tuple[int, ...]]):
        self.elements = sorted(set(elements))
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.order = len(self.elements)

    def as_group(self) -> FiniteGroup:
        els = self.elements
        table = [[self.index[compose(a, b)] for b in els] for a in els]
        return FiniteGroup(table, [str(e) for e in els], perms=els)


def op_subgroup(group: FiniteGroup, p: int) -> int:
    """O_p(G): the largest normal p-subgroup, as the intersection of all Sylow p-subgroups."""
    P = group.sylow(p)
    out = P
    for g in range(group.order):
        out &= group.conj_mask(g, P)
    return out


def all_words(n: int, length: int) -> Iterable[tuple[int, ...]]:
    return itertools.product(range(n), repeat=length)
