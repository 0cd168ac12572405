"""Normalized cochains with coefficients in the center of the fibre.

Cochains of degree n are functions on the accepted base words of length n with
no unit letter (normalization); coefficients are written additively.  The
differential is

    (dc)(x0..xn) = x0 . c(x1..xn) + sum_i (-1)^i c(.. x(i-1) xi ..) + (-1)^(n+1) c(x0..x(n-1))

and any face landing on a word with a unit letter contributes zero.
"""

from __future__ import annotations

import itertools

import numpy as np
from dataclasses import dataclass, field
from typing import Sequence

from .autcx import (compose_aut, compute_center, compute_normalizer, enumerate_automorphisms,
                    identity_aut, invert_aut)
from .core import DEFAULT_BOUND, PartialGroup
from .errors import (BudgetExceeded, DegreeOutOfRange, NoLiftExists, PreconditionNotMet)
from .groups import FiniteGroup
from .simplicial import morphism_failure, simplices
from .twist import Twisted, TwistingPair, enumerate_twisting_pairs

MAX_DEGREE = 4
DEFAULT_COCHAIN_BUDGET = 10 ** 6


class CochainComplex:
    """Normalized cochains of ``base`` in degrees 0..4 with coefficients Z(fibre).

    ``action[g]`` is any automorphism of the fibre lifting the outer class of g;
    only its restriction to the center is used.
    """

    def __init__(self, fibre: PartialGroup, base: PartialGroup, action: Sequence[Sequence[int]],
                 bound: int = DEFAULT_BOUND):
        self.fibre = fibre
        self.base = base
        self.bound = bound
        F = fibre
        center = compute_center(F, bound=bound)
        self.coeff = sorted(center.members)
        self.zero = F.unit
        members = set(self.coeff)
        self._add = {(a, b): F.product((a, b)) for a in self.coeff for b in self.coeff}
        if any(v not in members for v in self._add.values()):
            raise PreconditionNotMet("the center is not closed under the product")
        self._neg = {a: F.inverse[a] for a in self.coeff}
        self.action = []
        for g in range(base.size):
            a = tuple(action[g])
            if any(a[z] not in members for z in self.coeff):
                raise PreconditionNotMet("an action automorphism does not preserve the center",
                                         (g,))
            self.action.append({z: a[z] for z in self.coeff})
        self.check_action()

    def check_action(self):
        """Inner automorphisms fix the center, and the action respects accepted products."""
        N = compute_normalizer(self.fibre, self.bound)
        for v in N.members:
            c = N.conj_action[v]
            if any(c[z] != z for z in self.coeff):
                raise PreconditionNotMet("an inner automorphism moves the center", (v,))
        B = self.base
        for g, h in simplices(B, 2):
            gh = B._product((g, h))
            for z in self.coeff:
                if self.action[g][self.action[h][z]] != self.action[gh][z]:
                    raise PreconditionNotMet("the action is not multiplicative", (g, h))
        if any(self.action[B.unit][z] != z for z in self.coeff):
            raise PreconditionNotMet("the unit acts nontrivially", (B.unit,))

    def add(self, a: int, b: int) -> int:
        return self._add[(a, b)]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def words(self, n: int) -> list[tuple]:
        if not 0 <= n <= MAX_DEGREE + 1:
            raise DegreeOutOfRange(f"degree {n} is outside 0..{MAX_DEGREE}", (n,))
        cache = self.__dict__.setdefault("_words", {})
        if n not in cache:
            e = self.base.unit
            cache[n] = [w for w in simplices(self.base, n) if e not in w]
        return cache[n]

    def index(self, n: int) -> dict:
        cache = self.__dict__.setdefault("_index", {})
        if n not in cache:
            cache[n] = {w: i for i, w in enumerate(self.words(n))}
        return cache[n]

    def size(self, n: int) -> int:
        """Number of cochains of degree n."""
        return len(self.coeff) ** len(self.words(n))

    def zero_cochain(self, n: int) -> tuple:
        return (self.zero,) * len(self.words(n))

    def cochain(self, n: int, values: dict) -> tuple:
        """Cochain from a dict on words; unlisted words get zero."""
        return tuple(values.get(w, self.zero) for w in self.words(n))

    def value(self, n: int, c: Sequence[int], word: tuple) -> int:
        i = self.index(n).get(word)
        return self.zero if i is None else c[i]

    def terms(self, n: int, word: tuple) -> list[tuple]:
        """The differential on ``word`` (length n+1) as (action, face word, sign) terms."""
        B = self.base
        out = [(word[0], word[1:], 1)]
        for i in range(1, n + 1):
            merged = word[:i - 1] + (B._product(word[i - 1:i + 1]),) + word[i + 1:]
            out.append((None, merged, -1 if i % 2 else 1))
        out.append((None, word[:-1], -1 if (n + 1) % 2 else 1))
        return out

    def differential(self, n: int, c: Sequence[int]) -> tuple:
        if not 0 <= n <= MAX_DEGREE - 1:
            raise DegreeOutOfRange(f"the differential is materialized from degrees 0..{MAX_DEGREE - 1}",
                                   (n,))
        if len(c) != len(self.words(n)):
            raise PreconditionNotMet("cochain has the wrong length for its degree")
        out = []
        for w in self.words(n + 1):
            acc = self.zero
            for g, face, sign in self.terms(n, w):
                v = self.value(n, c, face)
                if g is not None:
                    v = self.action[g][v]
                acc = self.add(acc, v if sign > 0 else self.neg(v))
            out.append(acc)
        return tuple(out)

    def solutions(self, n: int, target: Sequence[int] | None = None, limit: int | None = None,
                  budget: int = DEFAULT_COCHAIN_BUDGET):
        """Yield every degree-n cochain c with dc = target (zero by default).

        Backtracks over the values of c, checking each condition once all the
        words it involves are assigned.
        """
        if not 0 <= n <= MAX_DEGREE - 1:
            raise DegreeOutOfRange(f"degree {n} is outside 0..{MAX_DEGREE - 1}", (n,))
        words = self.words(n)
        idx = self.index(n)
        upper = self.words(n + 1)
        target = self.zero_cochain(n + 1) if target is None else tuple(target)
        closing: list[list] = [[] for _ in words]
        constants = []
        for j, v in enumerate(upper):
            terms = []
            for g, face, sign in self.terms(n, v):
                i = idx.get(face)
                if i is not None:
                    terms.append((i, g, sign))
            if terms:
                closing[max(i for i, _, _ in terms)].append((j, terms))
            elif target[j] != self.zero:
                return
            constants.append(terms)
        c = [self.zero] * len(words)
        found = 0
        nodes = 0

        def ok(i):
            for j, terms in closing[i]:
                acc = self.zero
                for k, g, sign in terms:
                    v = c[k] if g is None else self.action[g][c[k]]
                    acc = self.add(acc, v if sign > 0 else self.neg(v))
                if acc != target[j]:
                    return False
            return True

        def search(i):
            nonlocal found, nodes
            if i == len(words):
                found += 1
                yield tuple(c)
                return
            for z in self.coeff:
                nodes += 1
                if nodes > budget:
                    raise BudgetExceeded(f"cochain search exceeded {budget} steps")
                c[i] = z
                if ok(i):
                    yield from search(i + 1)
                    if limit is not None and found >= limit:
                        return
            c[i] = self.zero

        yield from search(0)

    def cocycle_count(self, n: int, budget: int = DEFAULT_COCHAIN_BUDGET) -> int:
        return sum(1 for _ in self.solutions(n, budget=budget))

    def is_coboundary(self, n: int, c: Sequence[int], budget: int = DEFAULT_COCHAIN_BUDGET):
        """A degree-(n-1) cochain whose differential is c, or None."""
        if n == 0:
            return tuple(c) if all(v == self.zero for v in c) else None
        for b in self.solutions(n - 1, c, limit=1, budget=budget):
            return b
        return None

    def cohomology_order(self, n: int, budget: int = DEFAULT_COCHAIN_BUDGET) -> int:
        """|H^n| = |Z^n| |Z^(n-1)| / |C^(n-1)|, since d maps C^(n-1) onto B^n with kernel Z^(n-1)."""
        z = self.cocycle_count(n, budget)
        if n == 0:
            return z
        zl = self.cocycle_count(n - 1, budget)
        cl = self.size(n - 1)
        assert (z * zl) % cl == 0
        return z * zl // cl

    def check_dd(self, n: int, cochains=None) -> bool:
        """d o d = 0 from degree n, on the given cochains or all of them."""
        if cochains is None:
            cochains = itertools.product(self.coeff, repeat=len(self.words(n)))
        zero = self.zero_cochain(n + 2)
        return all(self.differential(n + 1, self.differential(n, c)) == zero for c in cochains)


# ---------------------------------------------------------------------------
# actions and lifts


def outer_action(fibre: PartialGroup, base: PartialGroup, reps: Sequence[Sequence[int]],
                 bound: int = DEFAULT_BOUND) -> list[list]:
    """The outer classes of the given representatives, as lists of automorphisms."""
    aut = enumerate_automorphisms(fibre, bound=bound)
    out = []
    for g, a in enumerate(reps):
        try:
            out.append(sorted(aut.outer_classes[aut.outer_class_of(tuple(a))]))
        except KeyError:
            raise NoLiftExists("the action has no automorphism representative", (g,)) from None
    return out


def named_action(fibre: PartialGroup, base: PartialGroup, name: str) -> list[tuple]:
    """Representatives for the actions 'trivial' and 'inversion' (inversion acts through a map onto order 2)."""
    ident = identity_aut(fibre)
    if name == "trivial":
        return [ident] * base.size
    if name == "inversion":
        inv = tuple(fibre.inverse)
        # a base element acts by inversion when it lies outside the unique index-2 subgroup
        sign = _index_two_sign(base)
        return [inv if s else ident for s in sign]
    raise PreconditionNotMet(f"unknown action {name!r}")


def _index_two_sign(base: PartialGroup) -> list[int]:
    """A surjection of the base onto Z/2 as a 0/1 list; the lexicographically first."""
    n, e = base.size, base.unit
    pairs = simplices(base, 2)
    for bits in itertools.product((0, 1), repeat=n - 1):
        sign = list(bits[:e]) + [0] + list(bits[e:])
        if any(sign) and all(sign[base._product((g, h))] == (sign[g] ^ sign[h]) for g, h in pairs):
            return sign
    raise PreconditionNotMet("the base has no quotient of order 2")


def choose_lifts(fibre: PartialGroup, base: PartialGroup, action: Sequence[Sequence[int]],
                 bound: int = DEFAULT_BOUND, eta_order: str = "first"):
    """Lifts Psi_g with Psi_1 = Id and eta(g, h) with Psi_g Psi_h = c_eta Psi_gh.

    ``eta_order`` picks the first or last admissible normalizer element, which
    gives two different but equally valid choices.
    """
    classes = outer_action(fibre, base, action, bound)
    psi = [tuple(cls[0]) for cls in classes]
    psi[base.unit] = identity_aut(fibre)
    if tuple(identity_aut(fibre)) not in classes[base.unit]:
        raise NoLiftExists("the unit must act trivially", (base.unit,))
    N = compute_normalizer(fibre, bound)
    by_conj: dict = {}
    for v in sorted(N.members):
        by_conj.setdefault(N.conj_action[v], []).append(v)
    eta = {}
    for g, h in simplices(base, 2):
        gh = base._product((g, h))
        target = compose_aut(compose_aut(psi[g], psi[h]), invert_aut(psi[gh]))
        cands = by_conj.get(target)
        if not cands:
            raise NoLiftExists("no normalizer element realizes Psi_g Psi_h Psi_gh^-1", (g, h))
        if g == base.unit or h == base.unit:
            eta[(g, h)] = fibre.unit
        else:
            eta[(g, h)] = cands[0] if eta_order == "first" else cands[-1]
    return psi, eta


@dataclass
class ObstructionReport:
    kappa: tuple
    is_cocycle: bool
    is_coboundary: bool
    witness: tuple | None
    complex: CochainComplex
    lifts: tuple = ()

    def nonzero(self) -> dict:
        W = self.complex.words(3)
        return {W[i]: v for i, v in enumerate(self.kappa) if v != self.complex.zero}


def obstruction_class(fibre: PartialGroup, base: PartialGroup, action: Sequence[Sequence[int]],
                      lifts=None, bound: int = DEFAULT_BOUND,
                      budget: int = DEFAULT_COCHAIN_BUDGET) -> ObstructionReport:
    """The 3-cochain measuring the failure of the cocycle formula for chosen lifts."""
    psi, eta = lifts if lifts is not None else choose_lifts(fibre, base, action, bound)
    K = CochainComplex(fibre, base, psi, bound)
    F, B = fibre, base
    members = set(K.coeff)
    values = {}
    for g, h, k in K.words(3):
        gh, hk = B._product((g, h)), B._product((h, k))
        lhs = F.product((psi[g][eta[(h, k)]], eta[(g, hk)]))
        rhs = F.product((eta[(g, h)], eta[(gh, k)]))
        z = F.product((lhs, F.inverse[rhs]))
        if z not in members:
            raise PreconditionNotMet("the cocycle discrepancy is not central", (g, h, k))
        values[(g, h, k)] = z
    kappa = K.cochain(3, values)
    is_cocycle = K.differential(3, kappa) == K.zero_cochain(4)
    witness = K.is_coboundary(3, kappa, budget)
    return ObstructionReport(kappa, is_cocycle, witness is not None, witness, K, (psi, eta))


def shift_pair(p: TwistingPair, c: Sequence[int], K: CochainComplex) -> TwistingPair:
    """Multiply eta by a central 2-cochain."""
    eta = dict(p.eta)
    for w, v in zip(K.words(2), c):
        eta[w] = p.fibre.product((p.eta[w], v))
    return TwistingPair(p.fibre, p.base, p.psi, eta, p.name)


# ---------------------------------------------------------------------------
# classification


def strong_equivalence(p: TwistingPair, q: TwistingPair, bound: int = DEFAULT_BOUND,
                       budget: int = DEFAULT_COCHAIN_BUDGET):
    """A map (x, g) -> (x f(g), g) from ext(p) to ext(q) that is an isomorphism of partial groups.

    Any isomorphism fixing the fibre and covering the identity of the base has
    this form, since (x, g) = (x, 1)(1, g).
    """
    F, B = p.fibre, p.base
    M, Q = total_space(p), total_space(q)
    free = [g for g in range(B.size) if g != B.unit]
    if F.size ** len(free) > budget:
        raise BudgetExceeded("too many candidate strong equivalences")
    mt, qt = M.pair_table, Q.pair_table
    for vals in itertools.product(range(F.size), repeat=len(free)):
        f = dict(zip(free, vals))
        f[B.unit] = F.unit
        images = []
        for i in range(M.size):
            x, g = M.decode(i)
            y = F.prod2(x, f[g])
            if y is None:
                break
            images.append(Q.encode(y, g))
        else:
            if len(set(images)) != M.size:
                continue
            phi = np.array(images)
            # binary products first, then every accepted word up to the bound
            lhs = np.where(mt >= 0, phi[np.where(mt >= 0, mt, 0)], -1)
            if not np.array_equal(lhs, qt[np.ix_(phi, phi)]):
                continue
            if morphism_failure(images, M, Q, bound) is None and \
                    morphism_failure(invert_aut(images), Q, M, bound) is None:
                return tuple(images)
    return None


def total_space(p: TwistingPair) -> Twisted:
    """The extension partial group of a pair, cached on the pair."""
    if "_total" not in p.__dict__:
        p.__dict__["_total"] = Twisted(p)
    return p.__dict__["_total"]


@dataclass
class ClassificationReport:
    pairs: list
    classes: list
    h2_order: int
    obstruction: ObstructionReport | None = None
    exists: bool = False
    notes: list = field(default_factory=list)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def agrees(self) -> bool:
        return self.class_count == (self.h2_order if self.exists else 0)

    def lines(self) -> list[str]:
        return [f"pairs={len(self.pairs)}", f"classes={self.class_count}",
                f"h2_order={self.h2_order}", f"extension_exists={str(self.exists).lower()}",
                f"agrees={str(self.agrees).lower()}"]


def classify_extensions(fibre: PartialGroup, base: PartialGroup, action: Sequence[Sequence[int]],
                        budget: int = DEFAULT_COCHAIN_BUDGET,
                        bound: int = DEFAULT_BOUND) -> ClassificationReport:
    """All twisting pairs over the given outer action, grouped into strong-equivalence classes."""
    classes_of = outer_action(fibre, base, action, bound)
    allowed = {g: [tuple(a) for a in cls] for g, cls in enumerate(classes_of)}
    pairs = []
    for p in enumerate_twisting_pairs(fibre, base, bound, allowed=allowed):
        pairs.append(p)
        if len(pairs) > budget:
            raise BudgetExceeded("too many twisting pairs")
    # union of pairs by strong equivalence, in enumeration order
    reps: list = []
    members: list[list] = []
    for p in pairs:
        for i, r in enumerate(reps):
            if strong_equivalence(r, p, bound, budget) is not None:
                members[i].append(p)
                break
        else:
            reps.append(p)
            members.append([p])
    K = CochainComplex(fibre, base, [classes_of[g][0] for g in range(base.size)], bound)
    h2 = K.cohomology_order(2, budget)
    try:
        obs = obstruction_class(fibre, base, action, bound=bound, budget=budget)
    except NoLiftExists:
        obs = None
    exists = bool(pairs)
    report = ClassificationReport(pairs, members, h2, obs, exists)
    if obs is not None and obs.is_coboundary != exists:
        report.notes.append("obstruction and search disagree")
    return report


# ---------------------------------------------------------------------------
# classical oracles for groups


def classical_cohomology_order(G: FiniteGroup, A: FiniteGroup, action: Sequence[Sequence[int]],
                               n: int) -> int:
    """|H^n(G; A)| for an abelian group A with G acting by ``action[g]``, via the normalized bar complex.

    Brute force over all normalized functions G^k -> A; only for tiny inputs.
    """
    e = G.identity
    nz = [g for g in range(G.order) if g != e]

    def cochains(k):
        keys = list(itertools.product(nz, repeat=k))
        for vals in itertools.product(range(A.order), repeat=len(keys)):
            yield dict(zip(keys, vals))

    def ev(c, word):
        if e in word:
            return A.identity
        return c[tuple(word)] if word else c[()]

    def d(c, k):
        out = {}
        for w in itertools.product(nz, repeat=k + 1):
            acc = action[w[0]][ev(c, w[1:])]
            for i in range(1, k + 1):
                v = ev(c, w[:i - 1] + (G.mul(w[i - 1], w[i]),) + w[i + 1:])
                acc = A.mul(acc, v if i % 2 == 0 else A.inv(v))
            v = ev(c, w[:-1])
            acc = A.mul(acc, v if (k + 1) % 2 == 0 else A.inv(v))
            out[w] = acc
        return out

    def is_zero(c):
        return all(v == A.identity for v in c.values())

    cocycles = sum(1 for c in cochains(n) if is_zero(d(c, n)))
    if n == 0:
        return cocycles
    boundaries = {tuple(sorted(d(c, n - 1).items())) for c in cochains(n - 1)}
    return cocycles // len(boundaries)


def classical_extensions(G: FiniteGroup, A: FiniteGroup, action: Sequence[Sequence[int]]):
    """Equivalence classes of group extensions of A by G with the given action.

    Enumerates normalized factor sets f, builds the groups A x G with
    (a, g)(b, h) = (a + g.b + f(g, h), gh), discards non-associative ones, and
    groups them by isomorphisms (a, g) -> (a + c(g), g).  Returns a list of
    classes, each a list of multiplication tables.
    """
    e = G.identity
    nz = [g for g in range(G.order) if g != e]
    keys = list(itertools.product(nz, repeat=2))
    na = A.order
    groups = []
    for vals in itertools.product(range(na), repeat=len(keys)):
        f = dict(zip(keys, vals))

        def fs(g, h):
            return A.identity if e in (g, h) else f[(g, h)]

        size = na * G.order
        table = [[0] * size for _ in range(size)]
        for i in range(size):
            a, g = i % na, i // na
            for j in range(size):
                b, h = j % na, j // na
                c = A.mul(A.mul(a, action[g][b]), fs(g, h))
                table[i][j] = c + na * G.mul(g, h)
        assoc = all(table[table[i][j]][k] == table[i][table[j][k]]
                    for i in range(size) for j in range(size) for k in range(size))
        if assoc:
            groups.append(table)
    classes: list[list] = []
    for t in groups:
        for cls in classes:
            if _equivalent_tables(cls[0], t, A, G):
                cls.append(t)
                break
        else:
            classes.append([t])
    return classes


def _equivalent_tables(t1, t2, A, G) -> bool:
    e, na = G.identity, A.order
    nz = [g for g in range(G.order) if g != e]
    size = na * G.order
    for vals in itertools.product(range(na), repeat=len(nz)):
        c = dict(zip(nz, vals))
        c[e] = A.identity
        phi = [A.mul(i % na, c[i // na]) + na * (i // na) for i in range(size)]
        if all(phi[t1[i][j]] == t2[phi[i]][phi[j]] for i in range(size) for j in range(size)):
            return True
    return False


def group_type(table) -> tuple:
    """(order, number of involutions, is abelian) as a coarse isomorphism type."""
    n = len(table)
    e = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    inv2 = sum(1 for i in range(n) if i != e and table[i][i] == e)
    abelian = all(table[i][j] == table[j][i] for i in range(n) for j in range(n))
    return n, inv2, abelian
