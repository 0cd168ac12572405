"""Objective partial groups, localities and their fusion systems.

Conjugation is on the right: ``x^u = Pi(u^-1, x, u)``.  Subgroups of S are
bitmasks over the positions of S's elements.  A word is accepted by an
objective partial group when it conjugates some chain of members of Delta;
this is decided by a transition table on Delta, and cross-checked against the
subgroup ``R_w`` of elements of S that the word conjugates inside S.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import DEFAULT_BOUND, GroupLike, LawResult, PartialGroup, word_tables
from .errors import (BudgetExceeded, DeltaNotClosed, EmptyDelta, NotASubgroup,
                     PreconditionNotMet)
from .groups import FiniteGroup, bits, mask_of, op_subgroup, p_part, popcount

S_BUDGET = 64


# ---------------------------------------------------------------------------
# objective partial groups


class Objective(PartialGroup):
    """The words of ``parent`` conjugating chains in ``delta``.

    ``s_elements`` lists the parent elements of S; ``delta`` holds masks over
    their positions.  The carrier is every parent element that conjugates some
    member of delta onto a member of delta.
    """

    kind = "Objective"

    def __init__(self, parent: PartialGroup, s_elements: Sequence[int], delta: Iterable[int],
                 name: str = ""):
        self.parent = parent
        s_elements = [int(s) for s in s_elements]
        self.s_parent = s_elements
        spos = {s: i for i, s in enumerate(s_elements)}
        self.delta = sorted(set(delta), key=lambda m: (popcount(m), m))
        if not self.delta:
            raise EmptyDelta("the collection of objects is empty")
        dindex = {m: i for i, m in enumerate(self.delta)}
        ns = len(s_elements)
        # s^u in S for every parent element u
        el = np.full((parent.size, ns), -1, dtype=np.int64)
        for u in range(parent.size):
            ui = parent.inverse[u]
            for j, s in enumerate(s_elements):
                w = (ui, s, u)
                if parent.accepts(w):
                    el[u, j] = spos.get(parent._product(w), -1)
        trans = np.full((parent.size, len(self.delta)), -1, dtype=np.int64)
        for u in range(parent.size):
            for d, X in enumerate(self.delta):
                img = el[u, bits(X)]
                if (img >= 0).all():
                    trans[u, d] = dindex.get(mask_of(int(v) for v in img), -1)
        members = [u for u in range(parent.size) if (trans[u] >= 0).any()]
        if parent.unit not in members:
            raise DeltaNotClosed("the unit does not preserve any object")
        self.members = members
        self.to_parent = np.array(members, dtype=np.int64)
        self.from_parent = np.full(parent.size, -1, dtype=np.int64)
        self.from_parent[self.to_parent] = np.arange(len(members))
        self.el_trans = el[self.to_parent]
        self.trans = trans[self.to_parent]
        self.s_members = [int(self.from_parent[s]) for s in s_elements]
        if min(self.s_members) < 0:
            raise DeltaNotClosed("S is not contained in the carrier")
        inverse = [int(self.from_parent[parent.inverse[u]]) for u in members]
        if min(inverse) < 0:
            raise DeltaNotClosed("the carrier is not closed under inversion")
        super().__init__(len(members), int(self.from_parent[parent.unit]), inverse,
                         [parent.labels[u] for u in members], name or parent.name)

    # acceptance through delta-chains

    def _chain_states(self, words: np.ndarray) -> np.ndarray:
        m, k = words.shape
        nd = len(self.delta)
        state = np.broadcast_to(np.arange(nd), (m, nd)).copy()
        for j in range(k):
            col = words[:, j][:, None]
            nxt = self.trans[col, np.where(state < 0, 0, state)]
            state = np.where(state < 0, -1, nxt)
        return state

    @cached_property
    def _trans_rows(self) -> list[list[int]]:
        return self.trans.tolist()

    def _accepts(self, word):
        rows = self._trans_rows
        states = range(len(self.delta))
        for x in word:
            row = rows[x]
            states = [row[s] for s in states if row[s] >= 0]
            if not states:
                return False
        return True

    def accept_many(self, words):
        if words.shape[1] == 0:
            return np.ones(len(words), dtype=bool)
        return (self._chain_states(words) >= 0).any(axis=1)

    def _product(self, word):
        v = self.parent.product(tuple(int(self.to_parent[x]) for x in word))
        out = int(self.from_parent[v])
        if out < 0:
            raise PreconditionNotMet("product leaves the carrier", tuple(word))
        return out

    def _mul2(self, x, y):
        return self._product((x, y))

    def product_many(self, words, acc):
        pw = self.to_parent[words] if words.size else words
        pacc = self.parent.accept_many(pw) & acc
        out = np.full(len(words), -1, dtype=np.int64)
        if pacc.any():
            pv = self.parent.product_many(pw[pacc], np.ones(int(pacc.sum()), dtype=bool))
            out[pacc] = self.from_parent[pv]
        return out

    # the subgroup conjugated into S

    def r_mask(self, word) -> int:
        state = list(range(len(self.s_parent)))
        for x in word:
            state = [int(self.el_trans[x, s]) if s >= 0 else -1 for s in state]
        return mask_of(j for j, s in enumerate(state) if s >= 0)

    def r_masks(self, words: np.ndarray) -> np.ndarray:
        """R_w for many words as uint64 masks; needs |S| <= 64."""
        m, k = words.shape
        ns = len(self.s_parent)
        state = np.broadcast_to(np.arange(ns), (m, ns)).copy()
        for j in range(k):
            nxt = self.el_trans[words[:, j][:, None], np.where(state < 0, 0, state)]
            state = np.where(state < 0, -1, nxt)
        weights = np.left_shift(np.uint64(1), np.arange(ns, dtype=np.uint64))
        return ((state >= 0).astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)

    def conj_images(self, word, mask: int) -> int:
        """Image of the subgroup ``mask`` under right conjugation by ``word``."""
        out = mask
        for x in word:
            img = [int(self.el_trans[x, s]) for s in bits(out)]
            if min(img, default=0) < 0:
                raise PreconditionNotMet("conjugate leaves S", tuple(word))
            out = mask_of(img)
        return out


# ---------------------------------------------------------------------------
# localities


class Locality:
    """A triple (pg, delta, S) with pg objective for delta."""

    def __init__(self, pg: Objective, prime: int, name: str = "", source=None):
        self.pg = pg
        self.prime = prime
        self.name = name or pg.name
        self.source = source
        self.S = list(pg.s_members)
        self.delta = list(pg.delta)
        self.S_group = _s_group(pg, self.S)
        if popcount(self.S_group.full) != len(self.S) or p_part(len(self.S), prime) != len(self.S):
            raise PreconditionNotMet("S is not a p-group")

    def __repr__(self):
        return f"Locality({self.name}, |L|={self.pg.size}, |S|={len(self.S)}, |Delta|={len(self.delta)})"

    @property
    def s_full(self) -> int:
        return self.S_group.full

    @cached_property
    def s_subgroups(self) -> list[int]:
        if len(self.S) > S_BUDGET:
            raise BudgetExceeded(f"|S| = {len(self.S)} exceeds {S_BUDGET}")
        return self.S_group.subgroups()

    def s_label(self, mask: int) -> str:
        return "<" + ",".join(self.pg.labels[self.S[j]] for j in bits(mask)) + ">"

    def normalizer_of_S(self) -> list[int]:
        return [u for u in range(self.pg.size) if (self.pg.el_trans[u] >= 0).all()]

    def normalizer_of(self, mask: int) -> list[int]:
        """N_L(P) as carrier elements with P^u = P."""
        out = []
        for u in range(self.pg.size):
            img = self.pg.el_trans[u, bits(mask)]
            if (img >= 0).all() and mask_of(int(v) for v in img) == mask:
                out.append(u)
        return out

    def normalizer_group(self, mask: int) -> FiniteGroup:
        els = self.normalizer_of(mask)
        pos = {u: i for i, u in enumerate(els)}
        table = [[pos[self.pg.product((a, b))] for b in els] for a in els]
        g = FiniteGroup(table, [self.pg.labels[u] for u in els], f"N({self.s_label(mask)})")
        g.embedding = els
        return g

    def r_w(self, word) -> int:
        return self.pg.r_mask(word)

    def l_w(self, word) -> int:
        return self.pg.r_mask(self.pg.inv_word(word))

    def is_characteristic_p(self, mask: int) -> bool:
        N = self.normalizer_group(mask)
        O = op_subgroup(N, self.prime)
        return N.centralizer(O) & ~O == 0

    def fusion_system(self) -> "FusionSystem":
        return fusion_system(self)


def _s_group(pg: PartialGroup, S: Sequence[int]) -> FiniteGroup:
    pos = {s: i for i, s in enumerate(S)}
    table = []
    for a in S:
        row = []
        for b in S:
            v = pg.prod2(a, b)
            if v is None or v not in pos:
                raise NotASubgroup("S is not closed under the product", (a, b))
            row.append(pos[v])
        table.append(row)
    g = FiniteGroup(table, [pg.labels[s] for s in S], "S")
    g.embedding = list(S)
    return g


def compute_Rw_Lw(L: Locality, word) -> tuple[int, int]:
    return L.r_w(word), L.l_w(word)


DELTA_POLICIES = ("all", "centric", "centric-radical", "custom")


def locality_from_group(G: FiniteGroup, p: int, delta_policy: str = "all",
                        custom: Iterable[int] | None = None, name: str = "",
                        sylow: int | None = None) -> Locality:
    """The locality of G at p on a collection of subgroups of a chosen Sylow subgroup.

    ``custom`` masks are over the elements of G; ``sylow`` overrides the
    deterministic choice of Sylow subgroup.
    """
    if delta_policy not in DELTA_POLICIES:
        raise PreconditionNotMet(f"unknown delta policy {delta_policy!r}")
    S_mask = G.sylow(p) if sylow is None else sylow
    if not G.is_subgroup(S_mask) or popcount(S_mask) != p_part(G.order, p):
        raise PreconditionNotMet("the given subgroup is not a Sylow subgroup", tuple(bits(S_mask)))
    s_elements = bits(S_mask)
    spos = {s: i for i, s in enumerate(s_elements)}
    if len(s_elements) > S_BUDGET:
        raise BudgetExceeded(f"|S| = {len(s_elements)} exceeds {S_BUDGET}")
    to_s = lambda m: mask_of(spos[g] for g in bits(m))  # noqa: E731
    subs = G.subgroups(S_mask)
    if delta_policy == "all":
        delta = [to_s(m) for m in subs]
    elif delta_policy == "custom":
        delta = []
        for m in custom or ():
            if m & ~S_mask or not G.is_subgroup(m):
                raise DeltaNotClosed("custom objects must be subgroups of S", tuple(bits(m)))
            delta.append(to_s(m))
        if not delta:
            raise EmptyDelta("the custom collection is empty")
    else:
        F = group_fusion_system(G, S_mask)
        flags = F.classify()
        keep = [P for P, fl in flags.items() if fl.centric and
                (delta_policy == "centric" or fl.radical)]
        delta = keep
    if not delta:
        raise EmptyDelta("the collection of objects is empty")
    pg = Objective(GroupLike(G), s_elements, delta, name or f"{G.name}@{p}:{delta_policy}")
    L = Locality(pg, p, pg.name, source=G)
    failure = objective_failure(L)
    if failure is not None:
        raise DeltaNotClosed(failure[0], failure[1])
    return L


def objective_failure(L: Locality):
    """First violation of S in Delta or of the closure condition on normalizers, or None."""
    full = L.s_full
    delta = set(L.delta)
    if full not in delta:
        return "S is not an object", ()
    subs = L.s_subgroups
    pg = L.pg
    Sg = L.S_group
    for X in L.delta:
        for u in range(pg.size):
            img = pg.el_trans[u, bits(X)]
            if (img < 0).any():
                continue
            Xu = mask_of(int(v) for v in img)
            for Y in subs:
                if Xu & ~Y:
                    continue
                N = Sg.normalizer(Xu, Y)
                if N not in delta:
                    return "normalizer of a conjugate object is not an object", (X, u, Y)
    return None


def check_locality(L: Locality, bound: int = DEFAULT_BOUND) -> list[LawResult]:
    """Objects, closure, maximality of S, and acceptance through R_w and L_w."""
    out = []
    f = objective_failure(L)
    out.append(LawResult("objective", f is None, len(L.delta), None if f is None else f[1],
                         "" if f is None else f[0]))
    NS = L.normalizer_of_S()
    ok = p_part(len(NS), L.prime) == len(L.S)
    out.append(LawResult("sylow-maximal", ok, len(NS)))
    # acceptance <=> R_w in Delta <=> L_w in Delta
    T = word_tables(L.pg, bound)
    dmask = np.array(L.delta, dtype=np.uint64)
    checked, witness = 0, None
    for k in range(1, bound + 1):
        w = T.words(k)
        r = np.isin(L.pg.r_masks(w), dmask)
        inv = np.array(L.pg.inverse, dtype=np.int64)
        li = np.isin(L.pg.r_masks(inv[w[:, ::-1]]), dmask)
        good = (T.acc[k] == r) & (r == li)
        checked += len(w)
        if not good.all() and witness is None:
            witness = T.decode(k, int(np.flatnonzero(~good)[0]))
    out.append(LawResult("objects-via-R", witness is None, checked, witness))
    # the (S,S)-biset property
    checked, witness = 0, None
    ns = np.array(NS, dtype=np.int64)
    for k in range(1, bound):
        idx = np.flatnonzero(T.acc[k])
        w = T.words(k, idx)
        for s in ns:
            for side in (0, 1):
                col = np.full((len(w), 1), s)
                ext = np.concatenate([w, col] if side else [col, w], axis=1)
                good = L.pg.accept_many(ext)
                checked += len(w)
                if not good.all() and witness is None:
                    witness = tuple(int(v) for v in ext[np.flatnonzero(~good)[0]])
    out.append(LawResult("biset", witness is None, checked, witness))
    return out


# ---------------------------------------------------------------------------
# fusion systems


Map = tuple  # images of bits(P) in order


@dataclass
class SubgroupFlags:
    fully_centralized: bool
    fully_normalized: bool
    centric: bool
    radical: bool
    weakly_closed: bool
    strongly_closed: bool
    normal: bool
    central: bool


class FusionSystem:
    """Injective homomorphisms between subgroups of ``R`` (default S), stored as Hom(P, S)."""

    def __init__(self, S: FiniteGroup, homs: dict, prime: int, R: int | None = None, name: str = ""):
        self.S = S
        self.R = S.full if R is None else R
        self.homs = homs
        self.prime = prime
        self.name = name

    @classmethod
    def generate(cls, S: FiniteGroup, generators: Iterable[tuple[int, Sequence[int]]], prime: int,
                 R: int | None = None, name: str = "") -> "FusionSystem":
        """Closure of the generators under restriction and composition.

        A generator is (domain mask, images indexed by S elements, -1 off the domain).
        """
        if S.order > S_BUDGET:
            raise BudgetExceeded(f"|S| = {S.order} exceeds {S_BUDGET}")
        R = S.full if R is None else R
        gens = {}
        for D, arr in generators:
            arr = tuple(int(arr[x]) if (D >> x) & 1 else -1 for x in range(S.order))
            gens[(D, arr)] = None
        gens = list(gens)
        for D, arr in gens:
            _check_injective_hom(S, D, arr)
        homs = {}
        for P in S.subgroups(R):
            els = bits(P)
            start = tuple(els)
            seen = {start}
            queue = [start]
            while queue:
                f = queue.pop()
                Q = mask_of(f)
                for D, arr in gens:
                    if Q & ~D == 0:
                        g = tuple(arr[y] for y in f)
                        if mask_of(g) & ~R == 0 and g not in seen:
                            seen.add(g)
                            queue.append(g)
            homs[P] = frozenset(seen)
        return cls(S, homs, prime, R, name)

    @cached_property
    def subgroups(self) -> list[int]:
        return sorted(self.homs, key=lambda m: (popcount(m), m))

    def hom(self, P: int, Q: int | None = None) -> list[Map]:
        maps = self.homs[P]
        if Q is None:
            return sorted(maps)
        return sorted(f for f in maps if mask_of(f) & ~Q == 0)

    def aut(self, P: int) -> list[Map]:
        return self.hom(P, P)

    def conjugates(self, P: int) -> set[int]:
        return {mask_of(f) for f in self.homs[P]}

    def restrict(self, P: int, f: Map, Q: int) -> Map:
        pos = {x: i for i, x in enumerate(bits(P))}
        return tuple(f[pos[x]] for x in bits(Q))

    def as_dict(self, P: int, f: Map) -> dict:
        return dict(zip(bits(P), f))

    def same_as(self, other: "FusionSystem") -> tuple[bool, object]:
        """Elementwise equality of Hom(P, S) for every P."""
        if set(self.homs) != set(other.homs):
            return False, "different object sets"
        for P in self.subgroups:
            if self.homs[P] != other.homs[P]:
                return False, P
        return True, None

    # automorphism groups

    def aut_group(self, P: int, maps: Iterable[Map] | None = None) -> tuple[FiniteGroup, dict]:
        maps = sorted(set(self.aut(P) if maps is None else maps))
        pos = {x: i for i, x in enumerate(bits(P))}
        perms = [tuple(pos[v] for v in f) for f in maps]
        index = {f: i for i, f in enumerate(perms)}
        table = [[index[tuple(a[b[i]] for i in range(len(a)))] for b in perms] for a in perms]
        g = FiniteGroup(table, [str(i) for i in range(len(maps))], f"Aut({P})")
        return g, {f: i for i, f in enumerate(maps)}

    def conj_map(self, s: int, P: int) -> Map:
        """Restriction to P of x -> s^-1 x s."""
        S = self.S
        return tuple(S.mul(S.mul(S.inverse[s], x), s) for x in bits(P))

    def inn(self, P: int) -> set[Map]:
        return {self.conj_map(s, P) for s in bits(P)}

    def aut_s(self, P: int) -> set[Map]:
        return {self.conj_map(s, P) for s in bits(self.S.normalizer(P, self.R))}

    def out_order(self, P: int) -> int:
        return len(self.aut(P)) // len(self.inn(P))

    def out_op_trivial(self, P: int) -> bool:
        """O_p(Out_F(P)) = 1."""
        A, idx = self.aut_group(P)
        inner = mask_of(idx[f] for f in self.inn(P))
        Q = _quotient(A, inner)
        return popcount(op_subgroup(Q, self.prime)) == 1

    # classifiers

    def fully_centralized(self, P: int) -> bool:
        c = popcount(self.S.centralizer(P, self.R))
        return all(c >= popcount(self.S.centralizer(Q, self.R)) for Q in self.conjugates(P))

    def fully_normalized(self, P: int) -> bool:
        n = popcount(self.S.normalizer(P, self.R))
        return all(n >= popcount(self.S.normalizer(Q, self.R)) for Q in self.conjugates(P))

    def is_centric(self, P: int) -> bool:
        S = self.S
        return all(S.centralizer(Q, self.R) == S.centralizer(Q, Q) for Q in self.conjugates(P))

    def is_radical(self, P: int) -> bool:
        return self.out_op_trivial(P)

    def weakly_closed(self, A: int) -> bool:
        return all(mask_of(f) == A for f in self.homs[A])

    def strongly_closed(self, A: int) -> bool:
        for P in self.subgroups:
            I = P & A
            for f in self.homs[P]:
                img = {y for x, y in zip(bits(P), f) if (I >> x) & 1}
                if mask_of(img) & ~A:
                    return False
        return True

    def normal_failure(self, A: int):
        """A morphism f on P with no extension to PA restricting to an automorphism of A."""
        S = self.S
        if S.normalizer(A, self.R) != self.R:
            return (A,)
        autA = set(self.aut(A))
        for P in self.subgroups:
            PA = S.closure(bits(P) + bits(A))
            ext = self.homs.get(PA, frozenset())
            for f in self.homs[P]:
                if not any(self.restrict(PA, g, P) == f and self.restrict(PA, g, A) in autA
                           for g in ext):
                    return (P, f)
        return None

    def is_normal(self, A: int) -> bool:
        return self.normal_failure(A) is None

    def is_central(self, A: int) -> bool:
        ident = tuple(bits(A))
        return self.is_normal(A) and self.aut(A) == [ident]

    def center(self) -> int:
        Z = self.S.centralizer(self.R, self.R)
        best = self.S.closure([])
        for A in self.S.subgroups(Z):
            if self.is_central(A) and popcount(A) > popcount(best):
                best = A
        return best

    def classify(self) -> dict[int, SubgroupFlags]:
        out = {}
        for P in self.subgroups:
            normal = self.is_normal(P)
            out[P] = SubgroupFlags(
                self.fully_centralized(P), self.fully_normalized(P), self.is_centric(P),
                self.is_radical(P), self.weakly_closed(P), self.strongly_closed(P), normal,
                normal and self.aut(P) == [tuple(bits(P))])
        return out


def subgroup_classifiers(F: FusionSystem) -> tuple[dict[int, SubgroupFlags], int]:
    return F.classify(), F.center()


def _check_injective_hom(S: FiniteGroup, D: int, arr: Sequence[int]):
    els = bits(D)
    if len({arr[x] for x in els}) != len(els) or min(arr[x] for x in els) < 0:
        raise PreconditionNotMet("generator is not injective on its domain", (D,))
    for a in els:
        for b in els:
            if arr[S.mul(a, b)] != S.mul(arr[a], arr[b]):
                raise PreconditionNotMet("generator is not a homomorphism", (D, a, b))


def _quotient(G: FiniteGroup, N: int) -> FiniteGroup:
    cosets, which = [], {}
    for g in range(G.order):
        if g in which:
            continue
        c = [G.mul(g, n) for n in bits(N)]
        for x in c:
            which[x] = len(cosets)
        cosets.append(c[0])
    table = [[which[G.mul(a, b)] for b in cosets] for a in cosets]
    return FiniteGroup(table, [str(i) for i in range(len(cosets))], "quotient")


def group_fusion_system(G: FiniteGroup, S_mask: int, prime: int | None = None) -> FusionSystem:
    """F_S(G) by brute force: Hom(P, S) = {c_g restricted to P : P^g <= S}."""
    s_els = bits(S_mask)
    spos = {s: i for i, s in enumerate(s_els)}
    Sg = G.subgroup(S_mask, "S")
    if Sg.order > S_BUDGET:
        raise BudgetExceeded(f"|S| = {Sg.order} exceeds {S_BUDGET}")
    if prime is None:
        prime = next(q for q in range(2, Sg.order + 1) if Sg.order % q == 0) if Sg.order > 1 else 2
    homs = {}
    for P in Sg.subgroups():
        maps = set()
        for g in range(G.order):
            gi = G.inverse[g]
            img = [G.mul(G.mul(gi, s_els[x]), g) for x in bits(P)]
            if all(y in spos for y in img):
                maps.add(tuple(spos[y] for y in img))
        homs[P] = frozenset(maps)
    return FusionSystem(Sg, homs, prime, name=f"F_S({G.name})")


def fusion_system(L: Locality) -> FusionSystem:
    """Generated by conjugation c_u on R_u, or on the objects inside R_u when R_u is not one."""
    pg = L.pg
    delta = set(L.delta)
    gens = []
    for u in range(pg.size):
        row = pg.el_trans[u]
        R = mask_of(j for j in range(len(L.S)) if row[j] >= 0)
        domains = [R] if R in delta else [X for X in L.delta if X & ~R == 0]
        for D in domains:
            gens.append((D, [int(v) for v in row]))
    return FusionSystem.generate(L.S_group, gens, L.prime, name=f"F({L.name})")


# ---------------------------------------------------------------------------
# saturation and normal subsystems


@dataclass
class SaturationReport:
    axiom_I: bool
    axiom_II: bool
    checked: int = 0
    witness: tuple | None = None
    detail: str = ""

    @property
    def saturated(self) -> bool:
        return self.axiom_I and self.axiom_II


def check_saturation(F: FusionSystem) -> SaturationReport:
    S, p = F.S, F.prime
    checked = 0
    for P in F.subgroups:
        if not F.fully_normalized(P):
            continue
        checked += 1
        if not F.fully_centralized(P):
            return SaturationReport(False, True, checked, (P,), "fully normalized but not fully centralized")
        out_s = len(F.aut_s(P)) // len(F.inn(P))
        if out_s != p_part(F.out_order(P), p):
            return SaturationReport(False, True, checked, (P,),
                                    "Out_S(P) is not a Sylow subgroup of Out_F(P)")
    for P in F.subgroups:
        NP = S.normalizer(P, F.R)
        for f in F.homs[P]:
            Q = mask_of(f)
            if not F.fully_centralized(Q):
                continue
            checked += 1
            fd = F.as_dict(P, f)
            finv = {v: k for k, v in fd.items()}
            aut_s_q = F.aut_s(Q)
            Nf = []
            for g in bits(NP):
                cg = F.conj_map(g, P)
                cgd = dict(zip(bits(P), cg))
                composite = tuple(fd[cgd[finv[y]]] for y in bits(Q))
                if composite in aut_s_q:
                    Nf.append(g)
            Nf_mask = mask_of(Nf)
            if not any(F.restrict(Nf_mask, g, P) == f for g in F.homs.get(Nf_mask, ())):
                return SaturationReport(True, False, checked, (P, f),
                                        "a morphism does not extend to N_f")
    return SaturationReport(True, True, checked)


@dataclass
class NormalSubsystemReport:
    N1: bool
    N2: bool
    N3: bool
    N4: bool
    witness: dict = field(default_factory=dict)

    @property
    def normal(self) -> bool:
        return self.N1 and self.N2 and self.N3 and self.N4


def check_normal_subsystem(E: FusionSystem, F: FusionSystem) -> NormalSubsystemReport:
    S, R = F.S, E.R
    wit = {}
    n1 = check_saturation(E).saturated
    if not n1:
        wit["N1"] = check_saturation(E).witness
    n2 = F.strongly_closed(R) if R in F.homs else False
    if not n2:
        wit["N2"] = (R,)
    n3 = True
    for Q in E.subgroups:
        for P in E.subgroups:
            if P & ~Q:
                continue
            homs = E.hom(P, Q)
            for gamma in F.homs[Q]:
                gd = F.as_dict(Q, gamma)
                gQ, gP = mask_of(gamma), mask_of(gd[x] for x in bits(P))
                if gQ & ~R or gP not in E.homs:
                    n3 = False
                    wit.setdefault("N3", (P, Q, gamma))
                    continue
                inv = {v: k for k, v in gd.items()}
                image = set()
                for f in homs:
                    fd = E.as_dict(P, f)
                    image.add(tuple(gd[fd[inv[y]]] for y in bits(gP)))
                if image != set(E.hom(gP, gQ)) or len(image) != len(homs):
                    n3 = False
                    wit.setdefault("N3", (P, Q, gamma))
    n4 = True
    C = S.centralizer(R, F.R)
    RC = S.closure(bits(R) + bits(C))
    ZR = S.centralizer(R, R)
    autF = F.aut(RC) if RC in F.homs else []
    for f in E.aut(R):
        ok = False
        for g in autF:
            if F.restrict(RC, g, R) != f:
                continue
            gd = F.as_dict(RC, g)
            if all((ZR >> S.mul(gd[x], S.inverse[x])) & 1 for x in bits(C)):
                ok = True
                break
        if not ok:
            n4 = False
            wit.setdefault("N4", (f,))
    return NormalSubsystemReport(n1, n2, n3, n4, wit)


def subsystem_over(F: FusionSystem, R: int, generators=None, name: str = "") -> FusionSystem:
    """Subsystem over R generated by ``generators``; by default F restricted to subgroups of R."""
    if generators is None:
        homs = {P: frozenset(f for f in F.homs[P] if mask_of(f) & ~R == 0)
                for P in F.S.subgroups(R)}
        return FusionSystem(F.S, homs, F.prime, R, name)
    return FusionSystem.generate(F.S, generators, F.prime, R, name)


def inner_subsystem(S: FiniteGroup, R: int, H: Sequence[int], prime: int) -> FusionSystem:
    """Fusion over R generated by conjugation by the elements ``H`` of S normalizing R."""
    gens = []
    for h in H:
        hi = S.inverse[h]
        arr = [S.mul(S.mul(hi, x), h) if (R >> x) & 1 else -1 for x in range(S.order)]
        gens.append((R, arr))
    return FusionSystem.generate(S, gens, prime, R)


def hand_built_fusion(S: FiniteGroup, prime: int, automorphisms: Sequence[Sequence[int]]) -> FusionSystem:
    """Inner fusion of S together with the given automorphisms of S, closed under restriction and composition."""
    gens = [(S.full, [S.mul(S.mul(S.inverse[s], x), s) for x in range(S.order)])
            for s in range(S.order)]
    gens += [(S.full, list(a)) for a in automorphisms]
    return FusionSystem.generate(S, gens, prime)
