"""Normalizer, center and automorphisms of a partial group, and the homotopy category.

An element ``eta`` lies in the normalizer when left conjugation ``x -> eta x eta^-1``
is defined everywhere and extends to an automorphism, and when inserting
``eta`` into any simplex (conjugating the letters before it) keeps the word
accepted with an unchanged product.  Morphisms ``(Psi0 <-eta- Psi1)`` of the
homotopy category satisfy ``Psi0(x) eta = eta Psi1(x)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import DEFAULT_BOUND, PartialGroup, word_tables
from .errors import BudgetExceeded, DomainViolation, InvalidMorphism
from .groups import FiniteGroup
from .simplicial import Simplex, morphism_failure

BUDGET_ENV = "PARTIALGROUPS_BUDGET"

Aut = tuple


def default_budget() -> int:
    return int(os.environ.get(BUDGET_ENV, "24"))


def identity_aut(M: PartialGroup) -> Aut:
    return tuple(range(M.size))


def compose_aut(a: Aut, b: Aut) -> Aut:
    """a after b."""
    return tuple(a[y] for y in b)


def invert_aut(a: Aut) -> Aut:
    out = [0] * len(a)
    for x, y in enumerate(a):
        out[y] = x
    return tuple(out)


def left_conjugation(M: PartialGroup, eta: int) -> Aut | None:
    """x -> Pi(eta, x, eta^-1), or None if some triple is rejected."""
    ei = M.inverse[eta]
    out = []
    for x in range(M.size):
        w = (eta, x, ei)
        if not M.accepts(w):
            return None
        out.append(M._product(w))
    return tuple(out)


def normalizer_failure(M: PartialGroup, eta: int, bound: int = DEFAULT_BOUND):
    """Why ``eta`` is not in the normalizer (checked on words up to the bound), or None."""
    c = left_conjugation(M, eta)
    if c is None:
        return ("conjugation-undefined", None)
    if sorted(c) != list(range(M.size)):
        return ("conjugation-not-bijective", None)
    w = morphism_failure(c, M, M, bound)
    if w is not None:
        return ("conjugation-not-automorphism", w)
    w = morphism_failure(invert_aut(c), M, M, bound)
    if w is not None:
        return ("conjugation-inverse-not-automorphism", w)
    T = word_tables(M, bound)
    conj = np.asarray(c, dtype=np.int64)
    for k in range(bound):
        idx = np.flatnonzero(T.acc[k])
        if not len(idx):
            continue
        words = T.words(k, idx)
        ref = None
        for i in range(k + 1):
            ins = np.empty((len(idx), k + 1), dtype=np.int64)
            ins[:, :i] = conj[words[:, :i]]
            ins[:, i] = eta
            ins[:, i + 1:] = words[:, i:]
            ok = M.accept_many(ins)
            prod = M.product_many(ins, ok)
            if ref is None:
                ref = prod
            bad = ~ok | (prod != ref)
            if bad.any():
                j = int(np.flatnonzero(bad)[0])
                return ("insertion", tuple(int(v) for v in ins[j]))
    return None


@dataclass
class Normalizer:
    owner: PartialGroup
    members: tuple
    conj_action: dict
    bound: int
    exact: bool

    def __contains__(self, x):
        return x in self.conj_action

    @property
    def order(self):
        return len(self.members)


@dataclass
class Center:
    owner: PartialGroup
    members: tuple

    @property
    def order(self):
        return len(self.members)


def compute_normalizer(M: PartialGroup, bound: int = DEFAULT_BOUND) -> Normalizer:
    cache = M.__dict__.setdefault("_normalizer", {})
    if bound in cache:
        return cache[bound]
    from .core import GroupLike
    members, action = [], {}
    if isinstance(M, GroupLike):
        for eta in range(M.size):
            members.append(eta)
            action[eta] = left_conjugation(M, eta)
        exact = True
    else:
        for eta in range(M.size):
            if normalizer_failure(M, eta, bound) is None:
                members.append(eta)
                action[eta] = left_conjugation(M, eta)
        exact = False
    out = Normalizer(M, tuple(members), action, bound, exact)
    cache[bound] = out
    return out


def compute_center(M: PartialGroup, normalizer: Normalizer | None = None,
                   bound: int = DEFAULT_BOUND) -> Center:
    N = normalizer or compute_normalizer(M, bound)
    ident = identity_aut(M)
    return Center(M, tuple(e for e in N.members if N.conj_action[e] == ident))


# ---------------------------------------------------------------------------
# automorphism search


def _signatures(M: PartialGroup) -> list:
    t = M.pair_table
    sig = []
    for x in range(M.size):
        p, steps = x, 1
        while p != M.unit and p >= 0 and steps <= M.size:
            p = int(t[p, x])
            steps += 1
        sig.append((int((t[x] >= 0).sum()), int((t[:, x] >= 0).sum()),
                    M.inverse[x] == x, steps if p == M.unit else -steps))
    return sig


def _search_bijections(M: PartialGroup, target: PartialGroup, limit: int | None = None) -> list[Aut]:
    """Bijections preserving unit, inversion and the binary product (with definedness)."""
    n = M.size
    if target.size != n:
        return []
    A, B = M.pair_table.tolist(), target.pair_table.tolist()
    sa, sb = _signatures(M), _signatures(target)
    found: list[Aut] = []

    def propagate(f, used, queue):
        while queue:
            x = queue.pop()
            fx = f[x]
            for a in range(n):
                fa = f[a]
                if fa < 0:
                    continue
                for (p, q, fp, fq) in ((a, x, fa, fx), (x, a, fx, fa)):
                    c, d = A[p][q], B[fp][fq]
                    if (c < 0) != (d < 0):
                        return False
                    if c < 0:
                        continue
                    if f[c] < 0:
                        if used[d] or sa[c] != sb[d]:
                            return False
                        f[c], used[d] = d, True
                        ci, di = M.inverse[c], target.inverse[d]
                        if f[ci] < 0:
                            if used[di]:
                                return False
                            f[ci], used[di] = di, True
                            queue.append(ci)
                        elif f[ci] != di:
                            return False
                        queue.append(c)
                    elif f[c] != d:
                        return False
        return True

    def extend(f, used):
        if limit is not None and len(found) >= limit:
            return
        free = [x for x in range(n) if f[x] < 0]
        if not free:
            found.append(tuple(f))
            return
        x = free[0]
        for y in range(n):
            if used[y] or sa[x] != sb[y]:
                continue
            yi, xi = target.inverse[y], M.inverse[x]
            if (xi == x) != (yi == y):
                continue
            g, u = list(f), list(used)
            g[x], u[y] = y, True
            if g[xi] < 0:
                if u[yi]:
                    continue
                g[xi], u[yi] = yi, True
            elif g[xi] != yi:
                continue
            if propagate(g, u, [x, xi]):
                extend(g, u)

    f = [-1] * n
    used = [False] * n
    f[M.unit], used[target.unit] = target.unit, True
    if sa[M.unit] == sb[target.unit] and propagate(f, used, [M.unit]):
        extend(f, used)
    return found


def find_isomorphism(M: PartialGroup, target: PartialGroup, bound: int = DEFAULT_BOUND) -> Aut | None:
    """An isomorphism of partial groups, verified up to the word bound in both directions."""
    for f in _search_bijections(M, target):
        if morphism_failure(f, M, target, bound) is None and \
                morphism_failure(invert_aut(f), target, M, bound) is None:
            return f
    return None


@dataclass
class AutGroup:
    owner: PartialGroup
    automorphisms: list
    inner: list
    outer_classes: list
    bound: int
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {a: i for i, a in enumerate(self.automorphisms)}

    @property
    def order(self):
        return len(self.automorphisms)

    def __contains__(self, a):
        return tuple(a) in self.index

    def as_group(self) -> FiniteGroup:
        n = len(self.automorphisms)
        table = [[self.index[compose_aut(a, b)] for b in self.automorphisms]
                 for a in self.automorphisms]
        return FiniteGroup(table, [f"aut{i}" for i in range(n)], name=f"Aut({self.owner.name})")

    def outer_class_of(self, a: Aut) -> int:
        for i, cls in enumerate(self.outer_classes):
            if tuple(a) in cls:
                return i
        raise KeyError(a)


def _outer_classes(auts: Sequence[Aut], inner: Sequence[Aut]) -> list[list]:
    seen, classes = set(), []
    for a in auts:
        if a in seen:
            continue
        cls = sorted({compose_aut(a, i) for i in inner})
        seen.update(cls)
        classes.append(cls)
    return classes


def enumerate_automorphisms(M: PartialGroup, budget: int | None = None,
                            bound: int = DEFAULT_BOUND) -> AutGroup:
    budget = default_budget() if budget is None else budget
    if M.size > budget:
        raise BudgetExceeded(f"carrier of size {M.size} exceeds the automorphism budget {budget}")
    cache = M.__dict__.setdefault("_aut", {})
    if bound in cache:
        return cache[bound]
    auts = []
    for f in _search_bijections(M, M):
        if morphism_failure(f, M, M, bound) is None and \
                morphism_failure(invert_aut(f), M, M, bound) is None:
            auts.append(f)
    auts.sort()
    N = compute_normalizer(M, bound)
    inner = sorted(set(N.conj_action.values()))
    out = AutGroup(M, auts, inner, _outer_classes(auts, inner), bound)
    cache[bound] = out
    return out


@dataclass
class ExactSequenceReport:
    orders: dict
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def exact_sequence(M: PartialGroup, aut: AutGroup | None = None,
                   bound: int = DEFAULT_BOUND) -> ExactSequenceReport:
    """Verify 1 -> Z -> N -> Aut -> Out -> 1 and Inn = N/Z by an explicit isomorphism."""
    aut = aut or enumerate_automorphisms(M, bound=bound)
    N = compute_normalizer(M, bound)
    Z = compute_center(M, N)
    return _exact_sequence(M, aut, N.members, N.conj_action, Z.members, aut.inner)


def _exact_sequence(M, aut, n_members, action, z_members, inner) -> ExactSequenceReport:
    ident = identity_aut(M)
    nset, zset = set(n_members), set(z_members)
    checks = {}
    checks["normalizer-subgroup"] = all(
        M.accepts((a, b)) and M._product((a, b)) in nset for a in nset for b in nset
    ) and all(M.inverse[a] in nset for a in nset)
    checks["center-abelian"] = all(
        M._product((a, b)) == M._product((b, a)) for a in zset for b in zset)
    checks["center-is-kernel"] = zset == {e for e in nset if action[e] == ident}
    image = sorted(set(action[e] for e in nset))
    checks["image-is-inner"] = image == sorted(inner)
    checks["inner-in-aut"] = all(a in aut for a in inner)
    checks["inner-normal"] = all(
        compose_aut(compose_aut(a, i), invert_aut(a)) in set(inner)
        for a in aut.automorphisms for i in inner)
    checks["lagrange"] = aut.order == len(inner) * len(aut.outer_classes)
    # explicit isomorphism N/Z -> Inn given by eta Z -> c_eta
    cosets, rep_of = [], {}
    for e in sorted(nset):
        if e in rep_of:
            continue
        coset = sorted({M._product((e, z)) for z in zset})
        for c in coset:
            rep_of[c] = e
        cosets.append(coset)
    phi = {}
    well_defined = True
    for coset in cosets:
        images = {action[c] for c in coset}
        well_defined &= len(images) == 1
        phi[coset[0]] = next(iter(images))
    checks["quotient-map-well-defined"] = well_defined
    checks["quotient-map-bijective"] = sorted(phi.values()) == image and len(phi) == len(image)
    checks["quotient-map-homomorphism"] = all(
        phi[rep_of[M._product((a, b))]] == compose_aut(phi[a], phi[b]) for a in phi for b in phi)
    orders = {"N": len(nset), "Z": len(zset), "Aut": aut.order, "Inn": len(inner),
              "Out": len(aut.outer_classes)}
    return ExactSequenceReport(orders, checks)


# ---------------------------------------------------------------------------
# the homotopy category


def is_homotopy(M: PartialGroup, target: Aut, eta: int, source: Aut) -> bool:
    """Psi0(x) eta = eta Psi1(x) for every x, i.e. Psi0 = c_eta o Psi1."""
    for x in range(M.size):
        a, b = (target[x], eta), (eta, source[x])
        if not (M.accepts(a) and M.accepts(b)) or M._product(a) != M._product(b):
            return False
    return True


@dataclass(frozen=True)
class AutChain:
    """A simplex (Psi0 <-eta1- Psi1 <- ... <-eta_m- Psi_m) of the homotopy category's nerve."""

    owner: PartialGroup
    objects: tuple
    labels: tuple

    def __post_init__(self):
        assert len(self.objects) == len(self.labels) + 1

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def is_valid(self) -> bool:
        return all(is_homotopy(self.owner, self.objects[i], self.labels[i], self.objects[i + 1])
                   for i in range(self.dimension))

    def face(self, i: int) -> "AutChain":
        M, ob, lb = self.owner, list(self.objects), list(self.labels)
        m = self.dimension
        if not 0 <= i <= m or m == 0:
            raise IndexError(i)
        if i == 0:
            return AutChain(M, tuple(ob[1:]), tuple(lb[1:]))
        if i == m:
            return AutChain(M, tuple(ob[:-1]), tuple(lb[:-1]))
        merged = M.product((lb[i - 1], lb[i]))
        return AutChain(M, tuple(ob[:i] + ob[i + 1:]), tuple(lb[:i - 1] + [merged] + lb[i + 1:]))

    def degeneracy(self, i: int) -> "AutChain":
        ob, lb = list(self.objects), list(self.labels)
        return AutChain(self.owner, tuple(ob[:i + 1] + ob[i:]),
                        tuple(lb[:i] + [self.owner.unit] + lb[i:]))

    def tensor(self, other: "AutChain") -> "AutChain":
        """Objectwise composition, labels Phi_{i-1}(eta_i) . omega_i."""
        M = self.owner
        objects = tuple(compose_aut(a, b) for a, b in zip(self.objects, other.objects))
        labels = tuple(M.product((self.objects[i][other.labels[i]], self.labels[i]))
                       for i in range(self.dimension))
        return AutChain(M, objects, labels)

    def tensor_alt(self, other: "AutChain") -> "AutChain":
        """Same product, labels written omega_i . Phi_i(eta_i)."""
        M = self.owner
        objects = tuple(compose_aut(a, b) for a, b in zip(self.objects, other.objects))
        labels = tuple(M.product((self.labels[i], self.objects[i + 1][other.labels[i]]))
                       for i in range(self.dimension))
        return AutChain(M, objects, labels)

    def inverse(self) -> "AutChain":
        """Tensor inverse: objects inverted, labels Psi_{i-1}^-1(eta_i^-1)."""
        M = self.owner
        inv = [invert_aut(a) for a in self.objects]
        labels = tuple(inv[i][M.inverse[self.labels[i]]] for i in range(self.dimension))
        return AutChain(M, tuple(inv), labels)

    def inverse_alt(self) -> "AutChain":
        """Same inverse, labels written Psi_i^-1(eta_i^-1)."""
        M = self.owner
        inv = [invert_aut(a) for a in self.objects]
        labels = tuple(inv[i + 1][M.inverse[self.labels[i]]] for i in range(self.dimension))
        return AutChain(M, tuple(inv), labels)

    @classmethod
    def identity(cls, M: PartialGroup, dimension: int) -> "AutChain":
        ident = identity_aut(M)
        return cls(M, (ident,) * (dimension + 1), (M.unit,) * dimension)


def homotopy_action(chain: AutChain, s: Simplex) -> Simplex:
    """Act on a simplex of the chain's dimension; both expansions must agree."""
    M = chain.owner
    if s.dimension != chain.dimension:
        raise DomainViolation("chain and simplex dimensions differ", s.word)
    left, right = [], []
    for i, x in enumerate(s.word):
        eta = chain.labels[i]
        a = (chain.objects[i][x], eta)
        b = (eta, chain.objects[i + 1][x])
        left.append(M.product(a))
        right.append(M.product(b))
    if left != right:
        raise InvalidMorphism("the two expansions of the action disagree", s.word)
    if not M.accepts(tuple(left)):
        raise DomainViolation("action leaves the domain", tuple(left))
    return Simplex(M, tuple(left))


def homotopy_morphism(M: PartialGroup, target: Aut, eta: int, source: Aut) -> AutChain:
    ch = AutChain(M, (tuple(target), tuple(source)), (eta,))
    if not ch.is_valid():
        raise InvalidMorphism("label does not relate the two automorphisms", (eta,))
    return ch


# ---------------------------------------------------------------------------
# localities


def restricted_aut(L, budget: int | None = None, bound: int = DEFAULT_BOUND):
    """Automorphisms of a locality preserving S, with the exact sequence through N_L(S)."""
    M = L.pg
    aut = enumerate_automorphisms(M, budget, bound)
    S = set(L.S)
    auts = [a for a in aut.automorphisms if {a[x] for x in S} == S]
    NS = L.normalizer_of_S()
    action = {e: left_conjugation(M, e) for e in NS}
    Z = compute_center(M, bound=bound).members
    inner = sorted({action[e] for e in NS})
    sub = AutGroup(M, auts, inner, _outer_classes(auts, inner), bound)
    report = _exact_sequence(M, sub, NS, action, Z, inner)
    return sub, report
