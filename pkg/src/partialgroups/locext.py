"""Isotypical extensions of localities and the locality they induce.

An extension ``F -> L -> B`` of localities is isotypical when every Psi_g
preserves S' and the objects of the fibre, and eta takes values in
N_F(S').  The group N = {(x, g) : x in N_F(S'), g in N_B(S'')} carries a
Sylow subgroup S over S', and the objects

    Delta = {P <= S : P n S' in Delta' and tau(P) in Delta''}

cut out the sub-partial-group T of words conjugating Delta-chains.  Subgroups
of S are masks over the positions of S; fibre and base subgroups are masks
over the positions of S' and S'' in their own localities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .autcx import enumerate_automorphisms, find_isomorphism, left_conjugation
from .core import (DEFAULT_BOUND, GroupLike, LawResult, PartialGroup, is_partial_normal,
                   is_subgroup)
from .errors import (BudgetExceeded, DeltaNotClosed, InvalidTwistingPair, NoCompatibleSylow,
                     NotAGroup, NotASubgroup, PreconditionNotMet, SearchFailed,
                     SylowConditionFails)
from .groups import FiniteGroup, bits, mask_of, p_part, popcount
from .locality import (FusionSystem, Locality, NormalSubsystemReport, Objective,
                       SaturationReport, check_locality, check_normal_subsystem,
                       check_saturation, fusion_system, group_fusion_system,
                       locality_from_group, objective_failure)
from .simplicial import morphism_failure
from .twist import Twisted, TwistingPair, validate_twisting_pair


# ---------------------------------------------------------------------------
# helpers


class Restricted(PartialGroup):
    """The words of ``parent`` whose letters lie in ``members``."""

    kind = "Restricted"

    def __init__(self, parent: PartialGroup, members: Iterable[int], name: str = ""):
        members = sorted(set(int(m) for m in members))
        self.parent = parent
        self.to_parent = np.array(members, dtype=np.int64)
        self.from_parent = np.full(parent.size, -1, dtype=np.int64)
        self.from_parent[self.to_parent] = np.arange(len(members))
        if self.from_parent[parent.unit] < 0:
            raise NotASubgroup("the unit is missing")
        inverse = [int(self.from_parent[parent.inverse[m]]) for m in members]
        if min(inverse) < 0:
            raise NotASubgroup("not closed under inversion")
        super().__init__(len(members), int(self.from_parent[parent.unit]), inverse,
                         [parent.labels[m] for m in members], name or parent.name + "|H")

    def _accepts(self, word):
        return self.parent.accepts(tuple(int(self.to_parent[x]) for x in word))

    def _product(self, word):
        v = int(self.from_parent[self.parent.product(tuple(int(self.to_parent[x]) for x in word))])
        if v < 0:
            raise NotASubgroup("product leaves the members", tuple(word))
        return v

    def _mul2(self, x, y):
        return self._product((x, y))

    def accept_many(self, words):
        return self.parent.accept_many(self.to_parent[words] if words.size else words)

    def product_many(self, words, acc):
        pw = self.to_parent[words] if words.size else words
        out = np.full(len(words), -1, dtype=np.int64)
        if acc.any():
            out[acc] = self.from_parent[self.parent.product_many(pw[acc], np.ones(int(acc.sum()), dtype=bool))]
        return out


def accepted_word_arrays(M: PartialGroup, bound: int) -> list[np.ndarray]:
    """Accepted words of each length up to ``bound``, grown from accepted prefixes."""
    out = [np.zeros((1, 0), dtype=np.int64)]
    letters = np.arange(M.size, dtype=np.int64)
    for _ in range(bound):
        prev = out[-1]
        if not len(prev):
            out.append(np.zeros((0, prev.shape[1] + 1), dtype=np.int64))
            continue
        w = np.concatenate([np.repeat(prev, M.size, axis=0),
                            np.tile(letters, len(prev))[:, None]], axis=1)
        out.append(w[M.accept_many(w)])
    return out


def _inclusion_failure(M: PartialGroup, target: PartialGroup, f: np.ndarray, bound: int):
    """First accepted word of M whose image under f is rejected by target."""
    for words in accepted_word_arrays(M, bound)[1:]:
        if not len(words):
            continue
        image = f[words]
        bad = ~target.accept_many(image) | (image < 0).any(axis=1)
        if bad.any():
            return tuple(int(v) for v in words[np.flatnonzero(bad)[0]])
    return None


def _group_iso(A: FiniteGroup, B: FiniteGroup):
    if A.order != B.order:
        return None
    return find_isomorphism(GroupLike(A), GroupLike(B), bound=2)


# ---------------------------------------------------------------------------
# isotypical extensions


@dataclass
class IsotypicalExtension:
    fibre_loc: Locality
    base_loc: Locality
    pair: TwistingPair
    total: Twisted
    name: str = ""
    aut_checked: str = "full"
    ambient: FiniteGroup | None = None
    group_map: list | None = None

    @property
    def prime(self) -> int:
        return self.fibre_loc.prime

    def embed(self, x: int) -> int:
        return self.total.encode(x, self.base_loc.pg.unit)

    @cached_property
    def fibre_fusion(self) -> FusionSystem:
        return fusion_system(self.fibre_loc)

    @cached_property
    def base_fusion(self) -> FusionSystem:
        return fusion_system(self.base_loc)

    def psi_on_s(self, g: int) -> tuple:
        """Psi_g restricted to S', as images of the positions of S'."""
        F = self.fibre_loc
        pos = {s: j for j, s in enumerate(F.S)}
        return tuple(pos[self.pair.psi[g][s]] for s in F.S)


def _preserves(a: Sequence[int], L: Locality) -> tuple[bool, bool]:
    """(a(S) = S, a maps the objects of L onto objects)."""
    pos = {s: j for j, s in enumerate(L.S)}
    if {a[s] for s in L.S} != set(L.S):
        return False, False
    delta = set(L.delta)
    image = {mask_of(pos[a[L.S[j]]] for j in bits(P)) for P in L.delta}
    return True, image == delta


def isotypical_extension(fibre_loc: Locality, base_loc: Locality, pair: TwistingPair,
                         name: str = "", bound: int = DEFAULT_BOUND,
                         budget: int | None = None) -> IsotypicalExtension:
    """Validate the twisting data and the isotypical conditions, then build the total space."""
    if pair.fibre is not fibre_loc.pg or pair.base is not base_loc.pg:
        raise PreconditionNotMet("the pair is not defined over these localities")
    if fibre_loc.prime != base_loc.prime:
        raise PreconditionNotMet("the localities are at different primes")
    cert = validate_twisting_pair(pair, bound)
    if not cert.valid:
        raise InvalidTwistingPair(cert.reason, cert.witness)
    ns = set(fibre_loc.normalizer_of_S())
    for gh, v in sorted(pair.eta.items()):
        if v not in ns:
            raise InvalidTwistingPair("eta value outside N(S')", gh)
    for g, a in enumerate(pair.psi):
        keeps_s, keeps_delta = _preserves(a, fibre_loc)
        if not keeps_s:
            raise PreconditionNotMet("Psi_g does not preserve S'", (g,))
        if not keeps_delta:
            raise DeltaNotClosed("Psi_g does not preserve the fibre objects", (g,))
    checked = "full"
    try:
        auts = enumerate_automorphisms(fibre_loc.pg, budget, bound).automorphisms
    except BudgetExceeded:
        auts, checked = [], "psi-only"
    for a in auts:
        keeps_s, keeps_delta = _preserves(a, fibre_loc)
        if keeps_s and not keeps_delta:
            raise DeltaNotClosed("the fibre objects are not invariant under Aut(L';S')", a)
    total = Twisted(pair, name or f"{fibre_loc.name}.{base_loc.name}")
    return IsotypicalExtension(fibre_loc, base_loc, pair, total, total.name, checked)


def trivial_extension(fibre_loc: Locality, base_loc: Locality, bound: int = DEFAULT_BOUND) -> IsotypicalExtension:
    return isotypical_extension(fibre_loc, base_loc, TwistingPair.trivial(fibre_loc.pg, base_loc.pg),
                                f"{fibre_loc.name}x{base_loc.name}", bound)


def check_conjugation_formula(ext: IsotypicalExtension) -> LawResult:
    """(x,g)(y,1)(x,g)^-1 = (x Psi_g(y) x^-1, 1) for y in S' whenever the word is accepted."""
    M, F = ext.total, ext.fibre_loc.pg
    checked, witness = 0, None
    for u in range(M.size):
        x, g = M.decode(u)
        for y in ext.fibre_loc.S:
            w = (u, ext.embed(y), M.inverse[u])
            if not M.accepts(w):
                continue
            checked += 1
            inner = (x, ext.pair.psi[g][y], F.inverse[x])
            ok = F.accepts(inner) and M._product(w) == ext.embed(F._product(inner))
            if not ok and witness is None:
                witness = w
    return LawResult("conjugation-formula", witness is None, checked, witness)


# ---------------------------------------------------------------------------
# the induced locality


@dataclass
class InducedLocality:
    ext: IsotypicalExtension
    N: FiniteGroup
    S: list
    S_group: FiniteGroup
    delta: list
    T: Locality
    fibre_positions: list
    checks: list = field(default_factory=list)

    @cached_property
    def s_prime(self) -> int:
        return mask_of(self.fibre_positions)

    @cached_property
    def _base_pos(self) -> list[int]:
        bpos = {g: j for j, g in enumerate(self.ext.base_loc.S)}
        return [bpos[self.ext.total.decode(s)[1]] for s in self.S]

    def fibre_part(self, P: int) -> int:
        """P n S' as a mask over the positions of S'."""
        return mask_of(j for j, i in enumerate(self.fibre_positions) if (P >> i) & 1)

    def base_part(self, P: int) -> int:
        """tau(P) as a mask over the positions of S''."""
        return mask_of(self._base_pos[i] for i in bits(P))

    def over_base(self, H: int) -> int:
        """Positions of S lying over the base subgroup H."""
        return mask_of(i for i, b in enumerate(self._base_pos) if (H >> b) & 1)

    @cached_property
    def fusion(self) -> FusionSystem:
        return fusion_system(self.T)

    @cached_property
    def fibre_fusion_in_S(self) -> FusionSystem:
        """The fibre fusion system transported to S' <= S."""
        Fp = self.ext.fibre_fusion
        phi = self.fibre_positions
        homs = {}
        for P, maps in Fp.homs.items():
            Q = mask_of(phi[j] for j in bits(P))
            moved = set()
            for f in maps:
                d = {phi[a]: phi[b] for a, b in zip(bits(P), f)}
                moved.add(tuple(d[i] for i in bits(Q)))
            homs[Q] = frozenset(moved)
        return FusionSystem(self.T.S_group, homs, self.ext.prime, self.s_prime, "F'")


def build_sylow_and_delta(ext: IsotypicalExtension, bound: int = DEFAULT_BOUND) -> InducedLocality:
    M, p = ext.total, ext.prime
    Fl, Bl = ext.fibre_loc, ext.base_loc
    els = [M.encode(x, g) for g in Bl.normalizer_of_S() for x in Fl.normalizer_of_S()]
    pos = {u: i for i, u in enumerate(els)}
    table = []
    for a in els:
        row = []
        for b in els:
            if not M.accepts((a, b)):
                raise NotAGroup("a product in N is undefined", (a, b))
            v = pos.get(M._mul2(a, b))
            if v is None:
                raise NotAGroup("N is not closed under the product", (a, b))
            row.append(v)
        table.append(row)
    try:
        N = FiniteGroup(table, [M.labels[u] for u in els], "N")
    except ValueError as exc:
        raise NotAGroup(str(exc)) from exc
    N.embedding = els
    start = mask_of(pos[ext.embed(s)] for s in Fl.S)
    if not N.is_subgroup(start):
        raise NotAGroup("S' is not a subgroup of N")
    S_mask = N.sylow(p, start=start)
    S = [els[i] for i in bits(S_mask)]
    if {M.decode(s)[1] for s in S} != set(Bl.S):
        raise NoCompatibleSylow("the Sylow subgroup does not lie over S''")
    S_group = N.subgroup(S_mask, "S")
    spos = {s: i for i, s in enumerate(S)}
    fibre_positions = [spos[ext.embed(s)] for s in Fl.S]
    ind = InducedLocality(ext, N, S, S_group, [], None, fibre_positions)
    dp, db = set(Fl.delta), set(Bl.delta)
    delta = [P for P in S_group.subgroups()
             if ind.fibre_part(P) in dp and ind.base_part(P) in db]
    ind.delta = delta
    pg = Objective(M, S, delta, f"T({ext.name})")
    ind.T = Locality(pg, p, pg.name, source=ext)
    fail = objective_failure(ind.T)
    ind.checks.append(LawResult("objective", fail is None, len(delta),
                                None if fail is None else fail[1], "" if fail is None else fail[0]))
    witness = _inclusion_failure(pg, M, pg.to_parent, bound)
    ind.checks.append(LawResult("T-inside-L", witness is None, bound, witness))
    return ind


# ---------------------------------------------------------------------------
# T versus L


@dataclass
class TEqualsLReport:
    equal: bool
    precondition: str
    missing_elements: list
    witness: tuple | None
    bound: int

    def __bool__(self):
        return self.equal

    def lines(self) -> list[str]:
        out = [f"T = L: {'yes' if self.equal else 'no'}", f"precondition: {self.precondition}",
               f"missing elements: {len(self.missing_elements)}"]
        if self.witness is not None:
            out.append(f"witness: {self.witness}")
        return out


def _precondition(ind: InducedLocality) -> str:
    Fl, Bl = ind.ext.fibre_loc, ind.ext.base_loc
    # a carrier equal to S' accepts every word whatever the objects are
    if Fl.pg.size == len(Fl.S):
        return "p-group fibre"
    G = Bl.source
    if isinstance(G, FiniteGroup) and Bl.pg.size == G.order and len(Bl.delta) == len(Bl.s_subgroups):
        return "group base"
    return "none"


def verify_examples_T_equals_L(ind: InducedLocality, bound: int = 3, strict: bool = True) -> TEqualsLReport:
    """Compare the carriers and the accepted words of T and L up to ``bound``.

    With ``strict`` the fibre must be a p-group or the base a group with every
    subgroup of S'' an object.
    """
    pre = _precondition(ind)
    if strict and pre == "none":
        raise PreconditionNotMet("fibre is not a p-group and base is not a full group")
    M, pg = ind.ext.total, ind.T.pg
    missing = [u for u in range(M.size) if pg.from_parent[u] < 0]
    witness = None
    if not missing:
        witness = _inclusion_failure(M, pg, pg.from_parent, bound)
    return TEqualsLReport(not missing and witness is None, pre, missing, witness, bound)


# ---------------------------------------------------------------------------
# restriction to a subgroup of the base


def pullback_sub_locality(ind: InducedLocality, H: Iterable[int], bound: int = DEFAULT_BOUND) -> Locality:
    """The locality L(H) over a subgroup H of the base carrier, with its checks attached."""
    ext = ind.ext
    Bl, M = ext.base_loc, ext.total
    H = sorted(set(int(h) for h in H))
    if not is_subgroup(Bl.pg, H, bound):
        raise NotASubgroup("H is not a subgroup of the base", tuple(H))
    bpos = {g: j for j, g in enumerate(Bl.S)}
    HS = mask_of(bpos[h] for h in H if h in bpos)
    if popcount(HS) != p_part(len(H), ext.prime):
        raise SylowConditionFails("H n S'' is not a Sylow subgroup of H", tuple(H))
    nf = ext.fibre_loc.pg.size
    R = Restricted(M, [M.encode(x, h) for h in H for x in range(nf)], f"L({len(H)})")
    sub = ind.over_base(HS)
    s_els = [ind.S[i] for i in bits(sub)]
    local = {i: j for j, i in enumerate(bits(sub))}
    dp = set(ext.fibre_loc.delta)
    delta = [mask_of(local[i] for i in bits(P)) for P in ind.S_group.subgroups(sub)
             if ind.fibre_part(P) in dp]
    pg = Objective(R, [int(R.from_parent[s]) for s in s_els], delta, R.name)
    L = Locality(pg, ext.prime, pg.name, source=ind)
    L.checks = check_locality(L, bound)
    missing = [u for u in range(R.size) if pg.from_parent[u] < 0]
    witness = None if missing else _inclusion_failure(R, pg, pg.from_parent, bound)
    L.checks.append(LawResult("carrier-is-objective", not missing and witness is None, R.size,
                              tuple(missing[:1]) or witness))
    return L


# ---------------------------------------------------------------------------
# sections of the projection


def section_sigma0(ext: IsotypicalExtension) -> list[int]:
    M = ext.total
    return [M.encode(ext.fibre_loc.pg.unit, g) for g in range(ext.base_loc.pg.size)]


def _left_conj(M: PartialGroup, u: int, x: int) -> int | None:
    w = (u, x, M.inverse[u])
    return M._product(w) if M.accepts(w) else None


def section_sigma(ind: InducedLocality) -> list[int]:
    """A section through T: correct (1,g) by an element of L(R_g) carrying the image of S(L_g) onto S(R_g)."""
    ext = ind.ext
    M, Fl, Bl = ext.total, ext.fibre_loc, ext.base_loc
    nf = Fl.pg.size
    out = []
    for g in range(Bl.pg.size):
        if g == Bl.pg.unit:
            out.append(M.unit)
            continue
        Pb, Qb = Bl.l_w((g,)), Bl.r_w((g,))
        SP = [ind.S[i] for i in bits(ind.over_base(Pb))]
        SQ = {ind.S[i] for i in bits(ind.over_base(Qb))}
        u0 = M.encode(Fl.pg.unit, g)
        X = [_left_conj(M, u0, s) for s in SP]
        if None in X:
            raise SearchFailed("(1,g) does not conjugate S(L_g)", (g,))
        X = set(X)
        q_els = [Bl.S[j] for j in bits(Qb)]
        found = None
        for h in q_els:
            for y in range(nf):
                v = M.encode(y, h)
                img = {_left_conj(M, v, a) for a in X}
                if img == SQ and M.accepts((v, u0)):
                    found = v
                    break
            if found is not None:
                break
        if found is None:
            raise SearchFailed("no element of L(R_g) carries the conjugate onto S(R_g)", (g,))
        w = M._product((found, u0))
        h = M.decode(found)[1]
        z = next(s for s in ind.S if M.decode(s)[1] == h and s in SQ)
        word = (M.inverse[z], w)
        if not M.accepts(word):
            raise SearchFailed("the corrected element is undefined", (g,))
        sigma = M._product(word)
        if ind.T.pg.from_parent[sigma] < 0:
            raise SearchFailed("the section value is not in T", (g,))
        out.append(sigma)
    return out


def check_section(ext: IsotypicalExtension, sigma: Sequence[int], bound: int = DEFAULT_BOUND,
                  T: Locality | None = None) -> list[LawResult]:
    """Properties of a section: it lifts, conjugation is in Aut(L';S'), it carries L(L_g) to L(R_g), words lift."""
    M, Fl, Bl = ext.total, ext.fibre_loc, ext.base_loc
    F = Fl.pg
    out = []
    bad = next((g for g in range(Bl.pg.size) if M.decode(sigma[g])[1] != g), None)
    out.append(LawResult("section", bad is None, Bl.pg.size, None if bad is None else (bad,)))
    witness = None
    for g in range(Bl.pg.size):
        u = sigma[g]
        images = [_left_conj(M, u, ext.embed(x)) for x in range(F.size)]
        if None in images or any(M.decode(v)[1] != Bl.pg.unit for v in images):
            witness = (g,)
            break
        a = tuple(M.decode(v)[0] for v in images)
        if sorted(a) != list(range(F.size)) or not _preserves(a, Fl)[0] \
                or morphism_failure(a, F, F, bound) is not None:
            witness = (g,)
            break
    out.append(LawResult("conjugation-in-Aut(L';S')", witness is None, Bl.pg.size, witness))
    witness, checked = None, 0
    bS = Bl.S
    for g in range(Bl.pg.size):
        K, H = Bl.l_w((g,)), Bl.r_w((g,))
        Kset = {bS[j] for j in bits(K)}
        Hset = {bS[j] for j in bits(H)}
        u = sigma[g]
        for v in range(M.size):
            if M.decode(v)[1] not in Kset:
                continue
            checked += 1
            c = _left_conj(M, u, v)
            if c is None or M.decode(c)[1] not in Hset:
                witness = witness or (g, v)
    out.append(LawResult("carries-L(K)-to-L(H)", witness is None, checked, witness))
    sig = np.array(sigma, dtype=np.int64)
    witness = _inclusion_failure(Bl.pg, M, sig, bound)
    out.append(LawResult("lifts-words", witness is None, bound, witness))
    if T is not None:
        bad = [g for g in range(Bl.pg.size) if T.pg.from_parent[sigma[g]] < 0]
        out.append(LawResult("lands-in-T", not bad, Bl.pg.size, tuple(bad[:1]) or None))
    return out


# ---------------------------------------------------------------------------
# rigidity, admissibility, goodness


def kernel_subgroups(ext: IsotypicalExtension) -> tuple[int, int]:
    """(S0'', S1''): elements of S'' acting by inner automorphisms of L', resp. by fusion of S'."""
    Fl, Bl = ext.fibre_loc, ext.base_loc
    inner = {a for a in (left_conjugation(Fl.pg, n) for n in Fl.normalizer_of_S()) if a is not None}
    aut_fs = set(ext.fibre_fusion.aut(Fl.s_full))
    s0 = mask_of(j for j, g in enumerate(Bl.S) if ext.pair.psi[g] in inner)
    s1 = mask_of(j for j, g in enumerate(Bl.S) if ext.psi_on_s(g) in aut_fs)
    for m in (s0, s1):
        if not Bl.S_group.is_subgroup(m):
            raise PreconditionNotMet("the kernel is not a subgroup; the outer action is not a homomorphism",
                                     tuple(bits(m)))
    return s0, s1


def check_rigid(ext: IsotypicalExtension) -> bool:
    s0, _ = kernel_subgroups(ext)
    return s0 in set(ext.base_loc.delta)


def admissibility_failure(ext: IsotypicalExtension) -> int | None:
    """A fully centralized P'' with C_{S1''}(P'') <= P'' that is not an object, or None."""
    Bl = ext.base_loc
    _, s1 = kernel_subgroups(ext)
    Fb = ext.base_fusion
    Sg = Bl.S_group
    delta = set(Bl.delta)
    for P in Bl.s_subgroups:
        if P in delta or not Fb.fully_centralized(P):
            continue
        if Sg.centralizer(P, s1) & ~P == 0:
            return P
    return None


def check_admissible(ext: IsotypicalExtension) -> bool:
    return admissibility_failure(ext) is None


@dataclass
class GoodnessReport:
    fibre_in_T: bool
    fibre_partial_normal: bool
    centric_radical: list
    saturation: SaturationReport
    normal_subsystem: NormalSubsystemReport
    rigid: bool
    admissible: bool
    witness: dict = field(default_factory=dict)

    @property
    def good(self) -> bool:
        return self.fibre_in_T and self.fibre_partial_normal and all(d for _, d in self.centric_radical)

    @property
    def implication_holds(self) -> bool:
        return self.good or not (self.rigid and self.admissible)

    def lines(self) -> list[str]:
        yn = lambda b: "yes" if b else "no"  # noqa: E731
        out = [f"good: {yn(self.good)}",
               f"fibre_in_T: {yn(self.fibre_in_T)}",
               f"fibre_partial_normal: {yn(self.fibre_partial_normal)}",
               f"centric_radical: {len(self.centric_radical)}",
               f"centric_radical_in_delta: {yn(all(d for _, d in self.centric_radical))}",
               f"saturated: {yn(self.saturation.saturated)}",
               f"fibre_fusion_normal: {yn(self.normal_subsystem.normal)}",
               f"rigid: {yn(self.rigid)}",
               f"admissible: {yn(self.admissible)}",
               f"rigid_and_admissible_implies_good: {yn(self.implication_holds)}"]
        for k, v in sorted(self.witness.items()):
            out.append(f"witness_{k}: {v}")
        return out


def check_good(ind: InducedLocality, bound: int = DEFAULT_BOUND) -> GoodnessReport:
    ext = ind.ext
    T = ind.T.pg
    F = ext.fibre_loc.pg
    wit = {}
    emb = np.array([ext.embed(x) for x in range(F.size)], dtype=np.int64)
    into_T = T.from_parent[emb]
    inside = bool((into_T >= 0).all())
    if inside:
        w = _inclusion_failure(F, T, into_T, bound)
        if w is not None:
            inside = False
            wit["fibre_in_T"] = w
    else:
        wit["fibre_in_T"] = (int(np.flatnonzero(into_T < 0)[0]),)
    normal = False
    if inside:
        try:
            normal = is_partial_normal(T, [int(v) for v in into_T], bound)
        except NotASubgroup as exc:
            wit["fibre_partial_normal"] = exc.witness
    FT = ind.fusion
    flags = FT.classify()
    delta = set(ind.delta)
    cr = [(P, P in delta) for P, fl in sorted(flags.items(), key=lambda kv: (popcount(kv[0]), kv[0]))
          if fl.centric and fl.radical]
    missing = [P for P, d in cr if not d]
    if missing:
        wit["centric_radical"] = (missing[0],)
    sat = check_saturation(FT)
    ns = check_normal_subsystem(ind.fibre_fusion_in_S, FT)
    return GoodnessReport(inside, normal, cr, sat, ns, check_rigid(ext), check_admissible(ext), wit)


# ---------------------------------------------------------------------------
# structural checks on the induced locality


def check_strongly_closed(ind: InducedLocality) -> LawResult:
    ok = ind.fusion.strongly_closed(ind.s_prime)
    return LawResult("S'-strongly-closed", ok, 1, None if ok else (ind.s_prime,))


def check_conjugacy_representatives(ind: InducedLocality) -> LawResult:
    """Each fusion class of objects has a member whose fibre and base parts are fully normalized."""
    FT, Ff, Fb = ind.fusion, ind.ext.fibre_fusion, ind.ext.base_fusion
    seen, witness, classes = set(), None, 0
    for P in ind.delta:
        if P in seen:
            continue
        cls = FT.conjugates(P) & set(ind.delta)
        seen |= cls
        classes += 1
        if not any(Ff.fully_normalized(ind.fibre_part(Q)) and Fb.fully_normalized(ind.base_part(Q))
                   for Q in cls):
            witness = witness or (P,)
    return LawResult("conjugacy-representatives", witness is None, classes, witness)


def _generated_by_total(ind: InducedLocality) -> FusionSystem:
    """Fusion over S generated by conjugation by single elements of L."""
    M = ind.ext.total
    spos = {s: i for i, s in enumerate(ind.S)}
    Sg = ind.S_group
    subs = Sg.subgroups()
    gens = []
    for u in range(M.size):
        ui = M.inverse[u]
        arr = [-1] * len(ind.S)
        for i, s in enumerate(ind.S):
            w = (ui, s, u)
            if M.accepts(w):
                arr[i] = spos.get(M._product(w), -1)
        D = mask_of(i for i in range(len(arr)) if arr[i] >= 0)
        for P in subs:
            if P & ~D:
                continue
            els = bits(P)
            img = [arr[i] for i in els]
            if len(set(img)) != len(els):
                continue
            if all(arr[Sg.mul(a, b)] == Sg.mul(arr[a], arr[b]) for a in els for b in els):
                gens.append((P, arr))
    return FusionSystem.generate(Sg, gens, ind.ext.prime, name="F(L)")


def check_hom_equality(ind: InducedLocality) -> LawResult:
    """Hom in the fusion of T equals Hom in the fusion generated by L, on objects."""
    FT, FL = ind.fusion, _generated_by_total(ind)
    witness, checked = None, 0
    for P in ind.delta:
        checked += 1
        if FT.homs[P] != FL.homs[P]:
            witness = witness or (P,)
    return LawResult("hom-equality-on-objects", witness is None, checked, witness)


def check_centric_radical_parts(ind: InducedLocality) -> LawResult:
    """Every centric radical object P has P' centric in F' and C_{S1''}(P'') <= P''."""
    ext = ind.ext
    FT, Ff = ind.fusion, ext.fibre_fusion
    _, s1 = kernel_subgroups(ext)
    Sb = ext.base_loc.S_group
    flags = FT.classify()
    witness, checked = None, 0
    for P in ind.delta:
        fl = flags[P]
        if not (fl.centric and fl.radical):
            continue
        checked += 1
        Pb = ind.base_part(P)
        ok = Ff.is_centric(ind.fibre_part(P)) and Sb.centralizer(Pb, s1) & ~Pb == 0
        if not ok:
            witness = witness or (P,)
    return LawResult("centric-radical-parts", witness is None, checked, witness)


def check_cyclic_sylow(ind: InducedLocality) -> LawResult:
    """Every cyclic p-subgroup of L is conjugate into S by a single element."""
    M, p = ind.ext.total, ind.ext.prime
    S = set(ind.S)
    witness, checked = None, 0
    for x in range(M.size):
        powers, y = [M.unit], x
        while y != M.unit and len(powers) <= M.size:
            powers.append(y)
            nxt = M.prod2(y, x)
            if nxt is None:
                powers = None
                break
            y = nxt
        if powers is None or y != M.unit or p_part(len(powers), p) != len(powers):
            continue
        checked += 1
        ok = any(all((lambda w: M.accepts(w) and M._product(w) in S)((M.inverse[u], z, u))
                     for z in powers) for u in range(M.size))
        if not ok:
            witness = witness or (x,)
    return LawResult("cyclic-p-subgroups-into-S", witness is None, checked, witness)


# ---------------------------------------------------------------------------
# group extensions


def _find_normal(K: FiniteGroup, G: FiniteGroup, Q: FiniteGroup):
    """(mask of K in G, projection G -> Q) for the first normal subgroup matching K with quotient Q."""
    if K.order * Q.order != G.order:
        return None
    for m in G.subgroups():
        if popcount(m) != K.order or not G.is_normal(m):
            continue
        if _group_iso(G.subgroup(m), K) is None:
            continue
        cosets, which = [], {}
        for g in range(G.order):
            if g in which:
                continue
            c = [G.mul(g, n) for n in bits(m)]
            for x in c:
                which[x] = len(cosets)
            cosets.append(c[0])
        table = [[which[G.mul(a, b)] for b in cosets] for a in cosets]
        Qc = FiniteGroup(table, [G.labels[c] for c in cosets], "G/K")
        iso = _group_iso(Qc, Q)
        if iso is None:
            continue
        return m, [iso[which[g]] for g in range(G.order)]
    return None


def group_extension_to_locality_extension(K: FiniteGroup, G: FiniteGroup, Q: FiniteGroup, p: int,
                                          fibre_policy: str = "centric", base_policy: str = "all",
                                          bound: int = DEFAULT_BOUND) -> IsotypicalExtension:
    """The extension of localities of a group extension K -> G -> Q at p.

    Sections are taken in N_G(S_K), Psi_q is conjugation by s(q) and
    eta(q, r) = s(q) s(r) s(qr)^-1.
    """
    found = _find_normal(K, G, Q)
    if found is None:
        raise PreconditionNotMet("G has no normal subgroup isomorphic to K with quotient Q")
    k_mask, proj = found
    Kg = G.subgroup(k_mask, K.name or "K")
    fibre = locality_from_group(Kg, p, fibre_policy, name=f"{Kg.name}@{p}")
    sk = mask_of(Kg.embedding[fibre.pg.to_parent[s]] for s in fibre.S)
    sg = G.sylow(p, start=sk)
    sq = mask_of(proj[g] for g in bits(sg))
    if popcount(sq) != p_part(Q.order, p) or popcount(sg & k_mask) != popcount(sk):
        raise NoCompatibleSylow("the Sylow subgroups do not restrict compatibly")
    base = locality_from_group(Q, p, base_policy, name=f"{Q.name}@{p}", sylow=sq)
    F, B = fibre.pg, base.pg
    fib_of_g = {Kg.embedding[int(F.to_parent[x])]: x for x in range(F.size)}
    normalizer = G.normalizer(sk)
    section = {}
    for b in range(B.size):
        q = int(B.to_parent[b])
        if q == Q.identity:
            section[b] = G.identity
            continue
        section[b] = next(g for g in bits(normalizer) if proj[g] == q)
    psi = []
    for b in range(B.size):
        s, si = section[b], G.inverse[section[b]]
        a = []
        for x in range(F.size):
            y = G.mul(G.mul(s, Kg.embedding[int(F.to_parent[x])]), si)
            if y not in fib_of_g:
                raise InvalidTwistingPair("conjugation leaves the fibre carrier", (b, x))
            a.append(fib_of_g[y])
        psi.append(tuple(a))
    eta = {}
    for b in range(B.size):
        for c in range(B.size):
            if not B.accepts((b, c)):
                continue
            bc = B._product((b, c))
            v = G.mul(G.mul(section[b], section[c]), G.inverse[section[bc]])
            if v not in fib_of_g:
                raise InvalidTwistingPair("eta leaves the fibre carrier", (b, c))
            eta[(b, c)] = fib_of_g[v]
    pair = TwistingPair(F, B, psi, eta, f"{G.name}")
    ext = isotypical_extension(fibre, base, pair, f"{Kg.name}.{Q.name}", bound)
    M = ext.total
    gm = []
    for u in range(M.size):
        x, b = M.decode(u)
        gm.append(G.mul(Kg.embedding[int(F.to_parent[x])], section[b]))
    ext.ambient, ext.group_map = G, gm
    return ext


def check_group_map(ext: IsotypicalExtension) -> LawResult:
    """The map (x, q) -> x s(q) into the ambient group is injective and multiplicative."""
    M, G, gm = ext.total, ext.ambient, ext.group_map
    witness, checked = None, 0
    if len(set(gm)) != len(gm):
        witness = ("not injective",)
    pt = M.pair_table
    for a in range(M.size):
        for b in range(M.size):
            v = int(pt[a, b])
            if v < 0:
                continue
            checked += 1
            if gm[v] != G.mul(gm[a], gm[b]):
                witness = witness or (a, b)
    return LawResult("group-map", witness is None, checked, witness)


def compare_with_group_fusion(ind: InducedLocality) -> tuple[bool, object]:
    """The fusion of T against the fusion of the ambient group on the image of S."""
    ext = ind.ext
    if ext.group_map is None:
        raise PreconditionNotMet("the extension does not come from a group extension")
    G = ext.ambient
    image = [ext.group_map[s] for s in ind.S]
    gm_mask = mask_of(image)
    ref = group_fusion_system(G, gm_mask, ext.prime)
    gpos = {g: i for i, g in enumerate(bits(gm_mask))}
    phi = [gpos[g] for g in image]
    homs = {}
    for P, maps in ind.fusion.homs.items():
        Q = mask_of(phi[i] for i in bits(P))
        moved = set()
        for f in maps:
            d = {phi[a]: phi[b] for a, b in zip(bits(P), f)}
            moved.add(tuple(d[i] for i in bits(Q)))
        homs[Q] = frozenset(moved)
    return FusionSystem(ref.S, homs, ext.prime).same_as(ref)
