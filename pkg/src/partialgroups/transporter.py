"""Transporter systems and the locality obtained by collapsing inclusions.

Morphisms act on the right: a morphism ``P -> Q`` labelled ``g`` satisfies
``P^g <= Q``, and ``compose(i, j)`` is "i then j".  Objects are masks over
the positions of S.  The quotient identifies a morphism with its restrictions
along inclusions; classes become the elements of a locality whose words are
the chains of composable isomorphisms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .core import LawResult, PartialGroup
from .errors import AxiomsFailed, PreconditionNotMet
from .groups import FiniteGroup, bits, mask_of, p_part, popcount
from .locality import (FusionSystem, Locality, Objective, check_locality, fusion_system,
                       group_fusion_system)


class TransporterSystem:
    """Objects, labelled morphisms, and the structure maps eps and rho.

    ``morphisms`` lists (source, target, label); composition multiplies labels
    with ``mul`` and looks the result up among the morphisms.
    """

    def __init__(self, S: FiniteGroup, prime: int, objects: Sequence[int],
                 morphisms: Sequence[tuple[int, int, object]], mul: Callable,
                 eps_label: Callable[[int], object], rho: Sequence[tuple],
                 F: FusionSystem, name: str = ""):
        self.S = S
        self.prime = prime
        self.objects = sorted(set(objects), key=lambda m: (popcount(m), m))
        self.morphisms = list(morphisms)
        self.mul = mul
        self.eps_label = eps_label
        self.rho = list(rho)
        self.F = F
        self.name = name
        self.index = {m: i for i, m in enumerate(self.morphisms)}
        self.by_pair: dict[tuple[int, int], list[int]] = {}
        for i, (P, Q, _) in enumerate(self.morphisms):
            self.by_pair.setdefault((P, Q), []).append(i)

    def __repr__(self):
        return f"TransporterSystem({self.name}, {len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    @property
    def top(self) -> int:
        return self.S.full

    def source(self, i: int) -> int:
        return self.morphisms[i][0]

    def target(self, i: int) -> int:
        return self.morphisms[i][1]

    def mor(self, P: int, Q: int) -> list[int]:
        return self.by_pair.get((P, Q), [])

    def compose(self, i: int, j: int) -> int | None:
        """i then j, or None when the composite is missing."""
        P, Q, a = self.morphisms[i]
        Q2, R, b = self.morphisms[j]
        if Q != Q2:
            raise PreconditionNotMet("morphisms are not composable", (i, j))
        return self.index.get((P, R, self.mul(a, b)))

    def eps(self, P: int, Q: int, s: int) -> int | None:
        return self.index.get((P, Q, self.eps_label(s)))

    def identity(self, P: int) -> int | None:
        return self.eps(P, P, self.S.identity)

    def incl(self, P: int, Q: int) -> int | None:
        return self.eps(P, Q, self.S.identity)

    def image(self, i: int) -> int:
        return mask_of(self.rho[i])

    def is_iso(self, i: int) -> bool:
        return self.image(i) == self.target(i)

    def inverse(self, i: int) -> int | None:
        P, Q = self.source(i), self.target(i)
        ident = self.identity(P)
        return next((j for j in self.mor(Q, P) if self.compose(i, j) == ident), None)

    def extend_to_top(self, i: int) -> int | None:
        return self.compose(i, self.incl(self.target(i), self.top))

    def restrict(self, i: int, P: int) -> int | None:
        """The isomorphism from P <= source(i) onto its image that i restricts to."""
        src = self.source(i)
        if P & ~src:
            raise PreconditionNotMet("not a subgroup of the source", (i, P))
        ext = self.compose(self.incl(P, src), self.extend_to_top(i))
        return self._iso_by_extension.get(ext)

    @cached_property
    def _iso_by_extension(self) -> dict[int, int]:
        out = {}
        for i in range(len(self.morphisms)):
            if self.is_iso(i):
                out[self.extend_to_top(i)] = i
        return out

    def delete(self, i: int) -> "TransporterSystem":
        """A copy with one morphism removed (for negative controls)."""
        keep = [k for k in range(len(self.morphisms)) if k != i]
        return TransporterSystem(self.S, self.prime, self.objects, [self.morphisms[k] for k in keep],
                                 self.mul, self.eps_label, [self.rho[k] for k in keep], self.F,
                                 self.name + f"-{i}")


# ---------------------------------------------------------------------------
# constructions


def _conj_positions(G: FiniteGroup, s_els: list[int], g: int, P: int) -> tuple | None:
    pos = {s: i for i, s in enumerate(s_els)}
    gi = G.inverse[g]
    out = []
    for x in bits(P):
        y = G.mul(G.mul(gi, s_els[x]), g)
        if y not in pos:
            return None
        out.append(pos[y])
    return tuple(out)


def from_group(G: FiniteGroup, p: int, policy: str = "centric", objects: Sequence[int] | None = None,
               sylow: int | None = None) -> TransporterSystem:
    """The transporter category of G on a collection of subgroups of a Sylow subgroup."""
    S_mask = G.sylow(p) if sylow is None else sylow
    s_els = bits(S_mask)
    F = group_fusion_system(G, S_mask, p)
    Sg = F.S
    if objects is None:
        if policy == "all":
            objects = list(F.subgroups)
        elif policy in ("centric", "centric-radical"):
            flags = F.classify()
            objects = [P for P, fl in flags.items() if fl.centric and (policy == "centric" or fl.radical)]
        else:
            raise PreconditionNotMet(f"unknown object policy {policy!r}")
    morphisms, rho = [], []
    objs = sorted(set(objects), key=lambda m: (popcount(m), m))
    for P in objs:
        for g in range(G.order):
            img = _conj_positions(G, s_els, g, P)
            if img is None:
                continue
            Pg = mask_of(img)
            for Q in objs:
                if Pg & ~Q == 0:
                    morphisms.append((P, Q, g))
                    rho.append(img)
    return TransporterSystem(Sg, p, objs, morphisms, G.mul, lambda s: s_els[s], rho, F,
                             f"T({G.name}@{p}:{policy})")


def from_locality(L: Locality) -> TransporterSystem:
    """The transporter category of a locality: Mor(P, Q) = {u : P^u <= Q}."""
    pg = L.pg
    morphisms, rho = [], []
    for P in L.delta:
        for u in range(pg.size):
            img = pg.el_trans[u, bits(P)]
            if (img < 0).any():
                continue
            img = tuple(int(v) for v in img)
            Pu = mask_of(img)
            for Q in L.delta:
                if Pu & ~Q == 0:
                    morphisms.append((P, Q, u))
                    rho.append(img)
    mul = lambda a, b: pg._product((a, b))  # noqa: E731
    return TransporterSystem(L.S_group, L.prime, L.delta, morphisms, mul, lambda s: L.S[s], rho,
                             fusion_system(L), f"T({L.name})")


# ---------------------------------------------------------------------------
# axioms


@dataclass
class TransporterReport:
    results: list

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, name: str) -> LawResult:
        return next(r for r in self.results if r.law == name)

    def lines(self) -> list[str]:
        return [f"{r.law}: {'pass' if r.passed else 'FAIL'} checked={r.checked}"
                + ("" if r.witness is None else f" witness={r.witness}") for r in self.results]


def check_transporter_axioms(T: TransporterSystem) -> TransporterReport:
    S, F = T.S, T.F
    out = []
    objs = set(T.objects)

    # objects closed under conjugacy and overgroups
    witness = None
    for P in T.objects:
        for Q in F.conjugates(P) | {R for R in F.subgroups if R & P == P}:
            if Q not in objs:
                witness = witness or (P, Q)
    out.append(LawResult("objects-closed", witness is None, len(objs), witness))

    # a category: composites exist, identities, associativity
    witness, checked = None, 0
    for P in T.objects:
        e = T.identity(P)
        if e is None:
            witness = witness or ("identity", P)
            continue
        for Q in T.objects:
            for i in T.mor(P, Q):
                checked += 1
                if T.compose(e, i) != i or T.compose(i, T.identity(Q)) != i:
                    witness = witness or ("unit", i)
    for (P, Q), ii in T.by_pair.items():
        for R in T.objects:
            for j in T.mor(Q, R):
                for i in ii:
                    checked += 1
                    if T.compose(i, j) is None:
                        witness = witness or ("composite", i, j)
    out.append(LawResult("category", witness is None, checked, witness))
    if witness is not None:
        return TransporterReport(out)
    witness, checked = None, 0
    for (P, Q), ii in T.by_pair.items():
        for R in T.objects:
            for j in T.mor(Q, R):
                for Z in T.objects:
                    for k in T.mor(R, Z):
                        for i in ii:
                            checked += 1
                            if T.compose(T.compose(i, j), k) != T.compose(i, T.compose(j, k)):
                                witness = witness or (i, j, k)
    out.append(LawResult("associative", witness is None, checked, witness))

    # (A1): rho is a surjective functor onto F; eps is a functor
    witness, checked = None, 0
    for P in T.objects:
        for Q in T.objects:
            got = {T.rho[i] for i in T.mor(P, Q)}
            checked += 1
            if got != set(F.hom(P, Q)):
                witness = witness or ("rho-onto", P, Q)
    for (P, Q), ii in T.by_pair.items():
        for R in T.objects:
            for j in T.mor(Q, R):
                for i in ii:
                    k = T.compose(i, j)
                    d = dict(zip(bits(Q), T.rho[j]))
                    if T.rho[k] != tuple(d[x] for x in T.rho[i]):
                        witness = witness or ("rho-functor", i, j)
    for P in T.objects:
        for s in bits(S.normalizer(P)):
            for t in bits(S.normalizer(P)):
                a, b = T.eps(P, P, s), T.eps(P, P, t)
                if a is None or b is None or T.compose(a, b) != T.eps(P, P, S.mul(s, t)):
                    witness = witness or ("eps-functor", P, s, t)
    out.append(LawResult("A1", witness is None, checked, witness))

    # (A2): E(P) acts freely on both sides, rho is the orbit map
    witness, checked = None, 0
    E = {}
    for P in T.objects:
        ident = tuple(bits(P))
        E[P] = [i for i in T.mor(P, P) if T.rho[i] == ident]
    for (P, Q), ii in T.by_pair.items():
        for i in ii:
            checked += 1
            right = {T.compose(e, i) for e in E[P]}
            left = {T.compose(i, e) for e in E[Q]}
            fibre = {j for j in ii if T.rho[j] == T.rho[i]}
            if len(right) != len(E[P]) or right != fibre:
                witness = witness or ("right", i)
            if len(left) != len(E[Q]):
                witness = witness or ("left", i)
    out.append(LawResult("A2", witness is None, checked, witness))

    # (B): eps injective, rho(eps(s)) = c_s
    witness, checked = None, 0
    for P in T.objects:
        for Q in T.objects:
            seen = {}
            for s in bits(_s_transporter(S, P, Q)):
                checked += 1
                m = T.eps(P, Q, s)
                if m is None or m in seen:
                    witness = witness or ("injective", P, Q, s)
                    continue
                seen[m] = s
                want = tuple(S.mul(S.mul(S.inverse[s], x), s) for x in bits(P))
                if T.rho[m] != want:
                    witness = witness or ("rho-eps", P, Q, s)
    out.append(LawResult("B", witness is None, checked, witness))

    # (C): eps_P(g) then phi = phi then eps_Q(rho(phi)(g))
    witness, checked = None, 0
    for (P, Q), ii in T.by_pair.items():
        for i in ii:
            d = dict(zip(bits(P), T.rho[i]))
            for g in bits(P):
                checked += 1
                if T.compose(T.eps(P, P, g), i) != T.compose(i, T.eps(Q, Q, d[g])):
                    witness = witness or (i, g)
    out.append(LawResult("C", witness is None, checked, witness))

    # (I): each class has P with eps(N_S(P)) Sylow in Aut_T(P)
    witness, checked, seen = None, 0, set()
    for P in T.objects:
        if P in seen:
            continue
        cls = F.conjugates(P) & objs
        seen |= cls
        checked += 1
        if not any(popcount(S.normalizer(R)) == p_part(len(T.mor(R, R)), T.prime) for R in cls):
            witness = witness or (P,)
    out.append(LawResult("I", witness is None, checked, witness))

    # (II): isomorphisms extend along normalizing overgroups
    witness, checked = None, 0
    for P in T.objects:
        for Q in T.objects:
            for i in T.mor(P, Q):
                if not T.is_iso(i):
                    continue
                inv = T.inverse(i)
                for Pt in T.objects:
                    if Pt & P != P or Pt == P or S.normalizer(P, Pt) != Pt:
                        continue
                    images, ok = [], True
                    for a in bits(Pt):
                        m = T.compose(T.compose(inv, T.eps(P, P, a)), i)
                        b = next((b for b in bits(S.normalizer(Q)) if T.eps(Q, Q, b) == m), None)
                        if b is None:
                            ok = False
                            break
                        images.append(b)
                    if not ok:
                        continue
                    Qt = S.closure(bits(Q) + images)
                    checked += 1
                    target = T.compose(i, T.incl(Q, Qt))
                    if not any(T.compose(T.incl(P, Pt), j) == target for j in T.mor(Pt, Qt)):
                        witness = witness or (i, Pt, Qt)
    out.append(LawResult("II", witness is None, checked, witness))
    return TransporterReport(out)


def _s_transporter(S: FiniteGroup, P: int, Q: int) -> int:
    """N_S(P, Q) = {s : P^s <= Q} in the right convention."""
    return mask_of(s for s in range(S.order)
                   if all((Q >> S.mul(S.mul(S.inverse[s], x), s)) & 1 for x in bits(P)))


# ---------------------------------------------------------------------------
# maximal representatives


def _max_single(T: TransporterSystem, i: int) -> int:
    """The isomorphism with the largest source restricting to the isomorphism i."""
    P = T.source(i)
    best = i
    for R in T.objects:
        if R & P != P or R == P:
            continue
        for j in T._iso_by_extension.values():
            if T.source(j) == R and T.restrict(j, P) == i and popcount(R) > popcount(T.source(best)):
                best = j
    return best


def _restrict_chain(T: TransporterSystem, chain: Sequence[int], P0: int) -> list[int]:
    out, P = [], P0
    for i in chain:
        r = T.restrict(i, P)
        out.append(r)
        P = T.target(r)
    return out


def maximal_representative(T: TransporterSystem, chain: Sequence[int]) -> list[int]:
    """The unique maximal chain of isomorphisms restricting to ``chain``.

    Recursively extend the tail and the first letter separately, then
    restrict both to the intersection X1 n Y1.
    """
    chain = list(chain)
    for a, b in zip(chain, chain[1:]):
        if T.target(a) != T.source(b):
            raise PreconditionNotMet("chain is not composable", (a, b))
    if any(not T.is_iso(i) for i in chain):
        raise PreconditionNotMet("chain contains a non-isomorphism")
    if not chain:
        return []
    first = _max_single(T, chain[0])
    if len(chain) == 1:
        return [first]
    tail = maximal_representative(T, chain[1:])
    R1 = T.source(tail[0]) & T.target(first)
    inv = {y: x for x, y in zip(bits(T.source(first)), T.rho[first])}
    R0 = mask_of(inv[y] for y in bits(R1))
    return _restrict_chain(T, [first] + tail, R0)


def representatives(T: TransporterSystem, chain: Sequence[int]) -> list[list[int]]:
    """Every chain of isomorphisms restricting to ``chain`` (brute force)."""
    P0 = T.source(chain[0])
    found = []

    def extend(prefix, P, k):
        if k == len(chain):
            found.append(prefix)
            return
        want_src = T.source(chain[k])
        for j in T._iso_by_extension.values():
            if T.source(j) == P and T.restrict(j, want_src) == chain[k]:
                extend(prefix + [j], T.target(j), k + 1)

    for R in T.objects:
        if R & P0 == P0:
            extend([], R, 0)
    return found


def random_chain(T: TransporterSystem, rng: random.Random, length: int) -> list[int]:
    isos = sorted(T._iso_by_extension.values())
    by_src: dict[int, list[int]] = {}
    for i in isos:
        by_src.setdefault(T.source(i), []).append(i)
    P = rng.choice(T.objects)
    chain = []
    for _ in range(length):
        i = rng.choice(by_src[P])
        chain.append(i)
        P = T.target(i)
    return chain


def check_maximal_representatives(T: TransporterSystem, samples: int = 500, seed: int = 0,
                                  max_length: int = 4) -> list[LawResult]:
    rng = random.Random(seed)
    idem, uniq = None, None
    for _ in range(samples):
        chain = random_chain(T, rng, rng.randint(1, max_length))
        m = maximal_representative(T, chain)
        if maximal_representative(T, m) != m or _restrict_chain(T, m, T.source(chain[0])) != chain:
            idem = idem or tuple(chain)
        reps = representatives(T, chain)
        top = max(popcount(T.source(r[0])) for r in reps)
        if popcount(T.source(m[0])) != top or any(_restrict_chain(T, m, T.source(r[0])) != r for r in reps):
            uniq = uniq or tuple(chain)
    return [LawResult("maxrep-idempotent", idem is None, samples, idem),
            LawResult("maxrep-unique", uniq is None, samples, uniq)]


# ---------------------------------------------------------------------------
# the quotient


class QuotientPartialGroup(PartialGroup):
    """Classes of morphisms; words are chains of composable isomorphisms."""

    kind = "Quotient"

    def __init__(self, T: TransporterSystem, cls: list[int], n_classes: int, name: str = ""):
        self.T = T
        self.cls = cls
        objs = T.objects
        oidx = {P: k for k, P in enumerate(objs)}
        trans = np.full((n_classes, len(objs)), -1, dtype=np.int64)
        rep = np.full((n_classes, len(objs)), -1, dtype=np.int64)
        clash = None
        for i in T._iso_by_extension.values():
            c, k = cls[i], oidx[T.source(i)]
            if rep[c, k] >= 0 and rep[c, k] != i:
                clash = clash or (c, T.source(i))
            rep[c, k], trans[c, k] = i, oidx[T.target(i)]
        if clash is not None:
            raise AxiomsFailed("a class has two isomorphisms from one object", clash)
        self.trans, self.rep = trans, rep
        self._rows = trans.tolist()
        unit = cls[T.identity(T.top)]
        inverse = []
        for c in range(n_classes):
            ks = np.flatnonzero(rep[c] >= 0)
            if not len(ks):
                raise AxiomsFailed("a class has no isomorphism representative", (c,))
            inverse.append(cls[T.inverse(int(rep[c, ks[-1]]))])
        labels = [str(T.morphisms[int(rep[c][np.flatnonzero(rep[c] >= 0)[-1]])][2]) for c in range(n_classes)]
        super().__init__(n_classes, unit, inverse, labels, name or f"{T.name}/P")

    def _chain(self, word):
        """Objects starting a chain for ``word``, largest first."""
        starts = []
        for k in range(len(self.T.objects)):
            s = k
            for x in word:
                s = self._rows[x][s]
                if s < 0:
                    break
            if s >= 0:
                starts.append(k)
        return sorted(starts, key=lambda k: -popcount(self.T.objects[k]))

    def _accepts(self, word):
        return bool(self._chain(word))

    def _product(self, word):
        starts = self._chain(word)
        if not starts:
            raise PreconditionNotMet("word is not accepted", tuple(word))
        return self.product_from(word, starts[0])

    def product_from(self, word, start: int) -> int:
        T = self.T
        k = start
        acc = T.identity(T.objects[k])
        for x in word:
            i = int(self.rep[x, k])
            acc = T.compose(acc, i)
            k = self._rows[x][k]
        return self.cls[acc]

    def _mul2(self, x, y):
        return self._product((x, y))

    def accept_many(self, words):
        m, n = words.shape
        nd = len(self.T.objects)
        state = np.broadcast_to(np.arange(nd), (m, nd)).copy()
        for j in range(n):
            nxt = self.trans[words[:, j][:, None], np.where(state < 0, 0, state)]
            state = np.where(state < 0, -1, nxt)
        return (state >= 0).any(axis=1) if n else np.ones(m, dtype=bool)


def _classes(T: TransporterSystem) -> tuple[list[int], int]:
    parent = list(range(len(T.morphisms)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for i in range(len(T.morphisms)):
        e = T.extend_to_top(i)
        if e is None:
            raise AxiomsFailed("a morphism does not extend to S", (i,))
        union(i, e)
        P = T.source(i)
        for R in T.objects:
            if R & ~P == 0 and R != P:
                union(i, T.compose(T.incl(R, P), i))
    roots = sorted({find(i) for i in range(len(T.morphisms))})
    rid = {r: k for k, r in enumerate(roots)}
    return [rid[find(i)] for i in range(len(T.morphisms))], len(roots)


@dataclass
class QuotientResult:
    locality: Locality
    quotient: QuotientPartialGroup
    projection: list
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def quotient_to_locality(T: TransporterSystem, bound: int = 3, check: bool = True) -> QuotientResult:
    if check:
        rep = check_transporter_axioms(T)
        if not rep.ok:
            bad = next(r for r in rep.results if not r.passed)
            raise AxiomsFailed(f"transporter axiom {bad.law} fails", bad.witness)
    cls, n = _classes(T)
    Q = QuotientPartialGroup(T, cls, n)
    s_els = [cls[T.eps(T.top, T.top, s)] for s in range(T.S.order)]
    pg = Objective(Q, s_els, T.objects, f"{T.name}/P")
    L = Locality(pg, T.prime, pg.name, source=T)
    out = QuotientResult(L, Q, cls)
    if check:
        out.checks = check_quotient(out, bound)
    return out


def check_quotient(res: QuotientResult, bound: int = 3) -> list[LawResult]:
    """Locality checks, agreement of chain and objective acceptance, and functoriality of the projection."""
    L, Q = res.locality, res.quotient
    T = Q.T
    out = list(check_locality(L, bound))
    missing = [c for c in range(Q.size) if L.pg.from_parent[c] < 0]
    witness = tuple(missing[:1]) or None
    checked = 0
    if not missing:
        from .locext import accepted_word_arrays
        for k, words in enumerate(accepted_word_arrays(Q, bound)):
            checked += len(words)
            if len(words) and not L.pg.accept_many(L.pg.from_parent[words]).all():
                witness = witness or ("objective", k)
        for words in accepted_word_arrays(L.pg, bound)[1:]:
            if len(words) and not Q.accept_many(L.pg.to_parent[words]).all():
                witness = witness or ("chain",)
    out.append(LawResult("objective-equals-chains", witness is None, checked, witness))
    # every starting object gives the same product class
    witness, checked = None, 0
    from .locext import accepted_word_arrays
    for words in accepted_word_arrays(Q, bound)[1:]:
        for w in words.tolist():
            starts = Q._chain(w)
            vals = {Q.product_from(w, k) for k in starts}
            checked += 1
            if len(vals) != 1:
                witness = witness or tuple(w)
    out.append(LawResult("product-well-defined", witness is None, checked, witness))
    # composable morphisms project to accepted words with the composite's class
    witness, checked = None, 0
    for (P, R), ii in T.by_pair.items():
        for Z in T.objects:
            for j in T.mor(R, Z):
                for i in ii:
                    checked += 1
                    w = (res.projection[i], res.projection[j])
                    if not Q.accepts(w) or Q._product(w) != res.projection[T.compose(i, j)]:
                        witness = witness or (i, j)
    out.append(LawResult("projection-functorial", witness is None, checked, witness))
    unit = Q.unit
    bad = [i for P in T.objects for R in T.objects if R & P == P
           for i in [T.incl(P, R)] if res.projection[i] != unit]
    out.append(LawResult("inclusions-collapse", not bad, len(T.objects), tuple(bad[:1]) or None))
    return out
