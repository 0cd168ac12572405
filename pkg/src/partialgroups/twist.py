"""Twisting pairs and the extensions they define.

A twisting pair over a fibre ``F`` and a base ``B`` assigns an automorphism
``Psi_g`` of ``F`` to each base element and a normalizer element
``eta(g, h)`` to each accepted base pair.  The extension has carrier
``F x B``; the word ``[(x1,g1)|...|(xn,gn)]`` is accepted when the base word is
accepted and so is the fibre word

    [x1 | Psi_{G1}(x2) eta(G1, g2) | ... | Psi_{G(n-1)}(xn) eta(G(n-1), gn)]

where ``Gk`` is the product of ``g1 .. gk``.  Binary products are

    (x1, g1)(x2, g2) = (x1 Psi_{g1}(x2) eta(g1, g2), g1 g2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .autcx import (AutChain, compose_aut, compute_normalizer, enumerate_automorphisms,
                    identity_aut, invert_aut)
from .core import (DEFAULT_BOUND, AxiomReport, LawResult, PartialGroup, check_axioms,
                   word_tables)
from .errors import BudgetExceeded, DomainViolation, InvalidTwistingPair
from .simplicial import (PartialGroupMorphism, Simplex, check_anti_involution, face,
                         morphism_failure, simplices, validate_morphism)


class TwistingPair:
    def __init__(self, fibre: PartialGroup, base: PartialGroup, psi: Sequence[Sequence[int]],
                 eta: dict, name: str = ""):
        self.fibre = fibre
        self.base = base
        self.psi = [tuple(int(v) for v in a) for a in psi]
        self.psi_inv = [invert_aut(a) for a in self.psi]
        self.eta = {(int(g), int(h)): int(v) for (g, h), v in eta.items()}
        self.name = name

    @property
    def t(self) -> list:
        return self.psi

    def Psi(self, g: int) -> tuple:
        return self.psi[g]

    def eta_of(self, g: int, h: int) -> int:
        try:
            return self.eta[(g, h)]
        except KeyError:
            raise DomainViolation(f"eta is not defined on the rejected pair "
                                  f"{self.base.word_str((g, h))}", (g, h)) from None

    @cached_property
    def psi_table(self) -> np.ndarray:
        return np.array(self.psi, dtype=np.int64)

    @cached_property
    def eta_table(self) -> np.ndarray:
        n = self.base.size
        t = np.full((n, n), -1, dtype=np.int64)
        for (g, h), v in self.eta.items():
            t[g, h] = v
        return t

    @classmethod
    def from_indices(cls, fibre: PartialGroup, base: PartialGroup, aut_group, t: Sequence[int],
                     eta: dict, name: str = "") -> "TwistingPair":
        """t given as indices into ``aut_group.automorphisms``."""
        return cls(fibre, base, [aut_group.automorphisms[i] for i in t], eta, name)

    @classmethod
    def trivial(cls, fibre: PartialGroup, base: PartialGroup) -> "TwistingPair":
        ident = identity_aut(fibre)
        eta = {(g, h): fibre.unit for g in range(base.size) for h in range(base.size)
               if base.accepts((g, h))}
        return cls(fibre, base, [ident] * base.size, eta, "trivial")

    @classmethod
    def from_functions(cls, fibre: PartialGroup, base: PartialGroup,
                       psi: Callable[[int], Sequence[int]], eta: Callable[[int, int], int],
                       name: str = "") -> "TwistingPair":
        table = {(g, h): eta(g, h) for g in range(base.size) for h in range(base.size)
                 if base.accepts((g, h))}
        return cls(fibre, base, [psi(g) for g in range(base.size)], table, name)


@dataclass
class CocycleCertificate:
    valid: bool
    triples: list = field(default_factory=list)
    reason: str = ""
    witness: tuple | None = None

    def __bool__(self):
        return self.valid


def validate_twisting_pair(p: TwistingPair, bound: int = DEFAULT_BOUND) -> CocycleCertificate:
    F, B = p.fibre, p.base
    one, e = F.unit, B.unit
    if len(p.psi) != B.size:
        return CocycleCertificate(False, reason="t is not total on the base")
    for g in range(B.size):
        for h in range(B.size):
            if B.accepts((g, h)) and (g, h) not in p.eta:
                return CocycleCertificate(False, reason="eta missing on an accepted pair",
                                          witness=(g, h))
    if p.psi[e] != identity_aut(F):
        return CocycleCertificate(False, reason="t(1) is not the identity", witness=(e,))
    for g in range(B.size):
        if p.eta_of(e, g) != one or p.eta_of(g, e) != one:
            return CocycleCertificate(False, reason="eta is not normalized", witness=(e, g))
    try:
        auts = set(enumerate_automorphisms(F, bound=bound).automorphisms)
    except BudgetExceeded:
        auts = None
    for g in range(B.size):
        a = p.psi[g]
        if auts is not None:
            ok = a in auts
        else:
            ok = sorted(a) == list(range(F.size)) and morphism_failure(a, F, F, bound) is None \
                and morphism_failure(invert_aut(a), F, F, bound) is None
        if not ok:
            return CocycleCertificate(False, reason="t(g) is not an automorphism", witness=(g,))
    N = compute_normalizer(F, bound)
    for (g, h), v in sorted(p.eta.items()):
        if v not in N:
            return CocycleCertificate(False, reason="eta value outside the normalizer",
                                      witness=(g, h))
    # Psi_g o Psi_h = c_eta(g,h) o Psi_gh
    for (g, h), v in sorted(p.eta.items()):
        gh = B._product((g, h))
        lhs = compose_aut(p.psi[g], p.psi[h])
        rhs = compose_aut(N.conj_action[v], p.psi[gh])
        if lhs != rhs:
            return CocycleCertificate(False, reason="eta does not relate Psi_g Psi_h to Psi_gh",
                                      witness=(g, h))
    triples = []
    for w in simplices(B, 3):
        g, h, k = w
        gh, hk = B._product((g, h)), B._product((h, k))
        lhs = F.product((p.psi[g][p.eta_of(h, k)], p.eta_of(g, hk)))
        rhs = F.product((p.eta_of(g, h), p.eta_of(gh, k)))
        triples.append(w)
        if lhs != rhs:
            return CocycleCertificate(False, triples, "cocycle formula fails", w)
    return CocycleCertificate(True, triples)


# ---------------------------------------------------------------------------
# the extension as a partial group


class Twisted(PartialGroup):
    kind = "Twisted"

    def __init__(self, pair: TwistingPair, name: str = ""):
        F, B = pair.fibre, pair.base
        self.pair = pair
        self.fibre = F
        self.base = B
        nf = F.size
        size = nf * B.size
        labels = [f"({F.labels[i % nf]},{B.labels[i // nf]})" for i in range(size)]
        inverse = []
        for i in range(size):
            x, g = i % nf, i // nf
            gi = B.inverse[g]
            y = F.product((F.inverse[pair.eta_of(gi, g)], pair.psi[gi][F.inverse[x]]))
            inverse.append(y + nf * gi)
        super().__init__(size, F.unit + nf * B.unit, inverse, labels,
                         name or f"{F.name}.{B.name}")
        self._right_eta = None

    def encode(self, x: int, g: int) -> int:
        return x + self.fibre.size * g

    def decode(self, i: int) -> tuple[int, int]:
        return i % self.fibre.size, i // self.fibre.size

    def split(self, word) -> tuple[tuple, tuple]:
        nf = self.fibre.size
        return tuple(i % nf for i in word), tuple(i // nf for i in word)

    def fibre_word(self, word) -> tuple | None:
        """The fibre word of the acceptance test, or None if the base word is rejected."""
        xs, gs = self.split(word)
        B, F, p = self.base, self.fibre, self.pair
        if not B.accepts(gs):
            return None
        if not word:
            return ()
        out = [xs[0]]
        G = gs[0]
        for x, g in zip(xs[1:], gs[1:]):
            out.append(F.product((p.psi[G][x], p.eta_of(G, g))))
            G = B._product((G, g))
        return tuple(out)

    def untwisted_fibre_word(self, word) -> tuple | None:
        """[x1 | Psi_g1(x2) | Psi_g1 Psi_g2(x3) | ...], or None if the base word is rejected."""
        xs, gs = self.split(word)
        if not self.base.accepts(gs):
            return None
        out, a = [], identity_aut(self.fibre)
        for x, g in zip(xs, gs):
            out.append(a[x])
            a = compose_aut(a, self.pair.psi[g])
        return tuple(out)

    def _accepts(self, word):
        y = self.fibre_word(word)
        return y is not None and self.fibre.accepts(y)

    def _product(self, word):
        if not word:
            return self.unit
        y = self.fibre_word(word)
        _, gs = self.split(word)
        return self.encode(self.fibre._product(y), self.base._product(gs))

    def _mul2(self, a, b):
        (x1, g1), (x2, g2) = self.decode(a), self.decode(b)
        F, p = self.fibre, self.pair
        tail = F.product((p.psi[g1][x2], p.eta_of(g1, g2)))
        return self.encode(F.product((x1, tail)), self.base._product((g1, g2)))

    # vectorized oracle

    def _fibre_words(self, words: np.ndarray):
        F, B, p = self.fibre, self.base, self.pair
        nf = F.size
        xs, gs = words % nf, words // nf
        base_ok = B.accept_many(gs)
        m, k = words.shape
        fw = np.zeros_like(xs)
        if k == 0:
            return fw, base_ok, gs
        right = self._right_eta_table()
        fw[:, 0] = xs[:, 0]
        G = gs[:, 0].copy()
        bt = np.where(B.pair_table < 0, 0, B.pair_table)
        for j in range(1, k):
            e = p.eta_table[G, gs[:, j]]
            y = p.psi_table[G, xs[:, j]]
            fw[:, j] = np.where(e < 0, 0, right[y, np.where(e < 0, 0, e)])
            G = bt[G, gs[:, j]]
        return fw, base_ok, gs

    def _right_eta_table(self):
        if self._right_eta is None:
            F = self.fibre
            t = np.full((F.size, F.size), -1, dtype=np.int64)
            for e in set(self.pair.eta.values()):
                for y in range(F.size):
                    t[y, e] = F.product((y, e))
            self._right_eta = t
        return self._right_eta

    def accept_many(self, words):
        fw, base_ok, _ = self._fibre_words(words)
        out = base_ok.copy()
        if out.any():
            out[out] = self.fibre.accept_many(fw[out])
        return out

    def product_many(self, words, acc):
        fw, _, gs = self._fibre_words(words)
        out = np.full(len(words), -1, dtype=np.int64)
        if acc.any():
            fp = self.fibre.product_many(fw[acc], np.ones(int(acc.sum()), dtype=bool))
            bp = self.base.product_many(gs[acc], np.ones(int(acc.sum()), dtype=bool))
            out[acc] = fp + self.fibre.size * bp
        return out


@dataclass
class Extension:
    pair: TwistingPair
    total: Twisted
    iota: PartialGroupMorphism
    tau: PartialGroupMorphism
    certificate: CocycleCertificate


def build_extension(p: TwistingPair, bound: int = DEFAULT_BOUND, validate: bool = True) -> Extension:
    cert = validate_twisting_pair(p, bound) if validate else CocycleCertificate(True)
    if not cert.valid:
        raise InvalidTwistingPair(cert.reason, cert.witness)
    M = Twisted(p)
    F, B = p.fibre, p.base
    iota = validate_morphism([M.encode(x, B.unit) for x in range(F.size)], F, M, bound)
    tau = validate_morphism([M.decode(i)[1] for i in range(M.size)], M, B, bound)
    return Extension(p, M, iota, tau, cert)


# ---------------------------------------------------------------------------
# the twisting function


def twisting_function(p: TwistingPair, base_word: Sequence[int]) -> AutChain:
    """phi_n(b): objects t(g1..g(j+1)) t(g2..g(j+1))^-1, labels eta(g1, g2..gk)^-1 eta(g1, g2..g(k+1))."""
    B, F = p.base, p.fibre
    b = tuple(base_word)
    if not B.accepts(b):
        raise DomainViolation(f"{B.word_str(b)} is not accepted by the base", b)
    n = len(b)
    if n == 0:
        raise DomainViolation("the twisting function starts in dimension 1", b)
    objects = [p.psi[b[0]]]
    for j in range(1, n):
        full = B._product(b[:j + 1])
        tail = B._product(b[1:j + 1])
        objects.append(compose_aut(p.psi[full], p.psi_inv[tail]))
    labels = []
    if n >= 2:
        labels.append(p.eta_of(b[0], b[1]))
    for k in range(2, n):
        a = p.eta_of(b[0], B._product(b[1:k]))
        c = p.eta_of(b[0], B._product(b[1:k + 1]))
        labels.append(F.product((F.inverse[a], c)))
    return AutChain(F, tuple(objects), tuple(labels))


def twisting_inverse_formula(p: TwistingPair, base_word: Sequence[int]) -> AutChain:
    """Closed form of phi_n(b)^-1 with labels omega_{k,k+1}."""
    B, F = p.base, p.fibre
    b = tuple(base_word)
    chain = twisting_function(p, b)
    inv = [invert_aut(a) for a in chain.objects]
    labels = []
    n = len(b)
    if n >= 2:
        labels.append(inv[0][F.inverse[p.eta_of(b[0], b[1])]])
    for k in range(2, n):
        head = B._product(b[:k])
        mid = B._product(b[1:k])
        a = inv[k - 1][F.inverse[p.eta_of(head, b[k])]]
        labels.append(F.product((a, p.eta_of(mid, b[k]))))
    return AutChain(F, tuple(inv), tuple(labels))


class _Tally:
    def __init__(self, name):
        self.name, self.checked, self.witness = name, 0, None

    def check(self, ok, witness):
        self.checked += 1
        if not ok and self.witness is None:
            self.witness = witness

    def result(self, M=None):
        if self.witness is None:
            return LawResult(self.name, True, self.checked)
        detail = M.word_str(self.witness) if M is not None else str(self.witness)
        return LawResult(self.name, False, self.checked, tuple(self.witness), detail)


def check_twisting_function(p: TwistingPair, max_dim: int = 3) -> list[LawResult]:
    """Chain validity, the four twisting-function conditions and the inverse formula."""
    B, F = p.base, p.fibre
    valid, t1, t2, t3, t4, inv = (_Tally(n) for n in (
        "chain-valid", "twist-inner-faces", "twist-first-face", "twist-degeneracies",
        "twist-first-degeneracy", "twist-inverse-formula"))
    for n in range(1, max_dim + 1):
        for b in simplices(B, n):
            phi = twisting_function(p, b)
            valid.check(phi.is_valid(), b)
            s = Simplex(B, b)
            inv.check(phi.inverse() == twisting_inverse_formula(p, b) == phi.inverse_alt(), b)
            if n >= 2:
                for i in range(2, n + 1):
                    t1.check(twisting_function(p, face(s, i).word) == phi.face(i - 1), b)
                lhs = twisting_function(p, face(s, 1).word)
                rhs = phi.face(0).tensor(twisting_function(p, face(s, 0).word))
                alt = phi.face(0).tensor_alt(twisting_function(p, face(s, 0).word))
                t2.check(lhs == rhs == alt, b)
            for i in range(1, n + 1):
                up = b[:i] + (B.unit,) + b[i:]
                t3.check(twisting_function(p, up) == phi.degeneracy(i - 1), b)
            up = (B.unit,) + b
            t4.check(twisting_function(p, up) == AutChain.identity(F, n), b)
    return [t.result(B) for t in (valid, t1, t2, t3, t4, inv)]


# ---------------------------------------------------------------------------
# the twisted Cartesian product model


def chain_act(chain: AutChain, word: Sequence[int]) -> tuple:
    """Letterwise action [Psi_{i-1}(x_i) eta_i]."""
    F = chain.owner
    return tuple(F.product((chain.objects[i][x], chain.labels[i])) for i, x in enumerate(word))


def alpha(ext: Twisted, word: Sequence[int]) -> tuple[tuple, tuple]:
    """The bijection onto pairs (fibre simplex, base simplex) of the twisted Cartesian product."""
    _, gs = ext.split(word)
    return ext.fibre_word(word), gs


def rtcp_face(p: TwistingPair, y: tuple, b: tuple, i: int) -> tuple[tuple, tuple]:
    """Faces of the twisted Cartesian product; the first face twists by phi(b)^-1."""
    F, B = p.fibre, p.base
    if i > 0:
        return face(Simplex(F, y), i).word, face(Simplex(B, b), i).word
    chain = twisting_function(p, b).inverse()
    return chain_act(chain, y[1:]), b[1:]


def rtcp_edges(p: TwistingPair, y: tuple, b: tuple) -> list[tuple[int, int]]:
    """E_n = (Id x E_{n-1}) o (F_1, d_0) on the twisted Cartesian product."""
    out = []
    while len(b) > 1:
        out.append((y[0], b[0]))
        y, b = rtcp_face(p, y, b, 0)
    out.append((y[0], b[0]))
    return out


def edge_formula(p: TwistingPair, y: tuple, b: tuple) -> list[tuple[int, int]]:
    """z_k = Psi_{G(k-1)}^-1(y_k eta(G(k-1), g_k)^-1)."""
    F, B = p.fibre, p.base
    out = [(y[0], b[0])]
    for k in range(1, len(b)):
        G = B._product(b[:k])
        e = F.inverse[p.eta_of(G, b[k])]
        out.append((p.psi_inv[G][F.product((y[k], e))], b[k]))
    return out


def check_bundle_model(ext: Twisted, max_dim: int = 3) -> list[LawResult]:
    """Membership equivalence, faces transported along alpha, and the edge formula.

    Loops over base simplices and handles every fibre word over one base word at once.
    """
    p, F, B = ext.pair, ext.fibre, ext.base
    nf = F.size
    ftab, mtab = F.pair_table, ext.pair_table
    memb, faces, degs, edges, inj = (_Tally(n) for n in (
        "membership-equivalence", "bundle-faces", "bundle-degeneracies", "edge-formula",
        "edge-injective"))

    def note(t, ok, W, mask=None):
        ok = np.asarray(ok)
        t.checked += int(ok.size if mask is None else mask.sum())
        bad = ~ok if mask is None else (~ok & mask)
        if bad.any() and t.witness is None:
            t.witness = tuple(int(v) for v in W[np.flatnonzero(bad)[0]])

    for n in range(1, max_dim + 1):
        X = np.array(list(np.ndindex(*([nf] * n))), dtype=np.int64).reshape(-1, n)
        for b in simplices(B, n):
            W = X + nf * np.array(b, dtype=np.int64)
            Y, _, _ = ext._fibre_words(W)
            acc = F.accept_many(Y)
            # membership: the untwisted word uses composites Psi_g1 ... Psi_g(k-1)
            U = np.empty_like(X)
            a = identity_aut(F)
            for k in range(n):
                U[:, k] = np.asarray(a)[X[:, k]]
                a = compose_aut(a, p.psi[b[k]])
            note(memb, acc == F.accept_many(U), W)
            if not acc.any():
                continue
            W, Y, X_ = W[acc], Y[acc], X[acc]
            sb = Simplex(B, b)
            # faces i > 0: merge letters in the total space and in the fibre
            for i in range(1, n + 1):
                if i < n:
                    merged = mtab[W[:, i - 1], W[:, i]]
                    DW = np.concatenate([W[:, :i - 1], merged[:, None], W[:, i + 1:]], axis=1)
                    fm = ftab[Y[:, i - 1], Y[:, i]]
                    DY = np.concatenate([Y[:, :i - 1], fm[:, None], Y[:, i + 1:]], axis=1)
                    ok = (merged >= 0) & (fm >= 0)
                else:
                    DW, DY = W[:, :-1], Y[:, :-1]
                    ok = np.ones(len(W), dtype=bool)
                db = face(sb, i).word
                got, _, gb = ext._fibre_words(np.where(DW < 0, 0, DW))
                ok &= (got == DY).all(axis=1) & (gb == np.array(db, dtype=np.int64)).all(axis=1)
                note(faces, ok, W)
            # first face: twist by the inverse chain
            chain = twisting_function(p, b).inverse()
            act = np.empty((len(W), n - 1), dtype=np.int64)
            for k in range(n - 1):
                act[:, k] = ftab[np.asarray(chain.objects[k])[Y[:, k + 1]], chain.labels[k]]
            got, _, _ = ext._fibre_words(W[:, 1:])
            note(faces, (got == act).all(axis=1) & (act >= 0).all(axis=1), W)
            # degeneracies insert units componentwise
            for i in range(n + 1):
                UW = np.insert(W, i, ext.unit, axis=1)
                got, _, _ = ext._fibre_words(UW)
                note(degs, (got == np.insert(Y, i, F.unit, axis=1)).all(axis=1), W)
            # edges: iterate the twisted first face, then compare with the closed form
            E = np.empty_like(Y)
            cur, cb = Y, b
            for k in range(n):
                E[:, k] = cur[:, 0]
                if k < n - 1:
                    chain = twisting_function(p, cb).inverse()
                    nxt = np.empty((len(cur), len(cb) - 1), dtype=np.int64)
                    for j in range(len(cb) - 1):
                        nxt[:, j] = ftab[np.asarray(chain.objects[j])[cur[:, j + 1]],
                                         chain.labels[j]]
                    cur, cb = nxt, cb[1:]
            closed = np.empty_like(Y)
            closed[:, 0] = Y[:, 0]
            for k in range(1, n):
                G = B._product(b[:k])
                e = F.inverse[p.eta_of(G, b[k])]
                closed[:, k] = np.asarray(p.psi_inv[G])[ftab[Y[:, k], e]]
            note(edges, (E == closed).all(axis=1) & (E == X_).all(axis=1), W)
            note(inj, np.array([len(np.unique(E, axis=0)) == len(E)] * len(E)), W)
    return [t.result(ext) for t in (memb, faces, degs, edges, inj)]


def check_bundle_model_scalar(ext: Twisted, max_dim: int = 3) -> list[LawResult]:
    """Word-by-word version of check_bundle_model, kept as an oracle for it."""
    p = ext.pair
    memb, faces, degs, edges, inj = (_Tally(n) for n in (
        "membership-equivalence", "bundle-faces", "bundle-degeneracies", "edge-formula",
        "edge-injective"))
    nf = ext.fibre.size
    for n in range(1, max_dim + 1):
        seen = {}
        for b in simplices(ext.base, n):
            for xs in np.ndindex(*([nf] * n)):
                w = tuple(x + nf * g for x, g in zip(xs, b))
                a = ext.fibre.accepts(ext.fibre_word(w))
                memb.check(a == ext.fibre.accepts(ext.untwisted_fibre_word(w)), w)
                if not a:
                    continue
                y, _ = alpha(ext, w)
                s = Simplex(ext, w)
                for i in range(n + 1):
                    faces.check(alpha(ext, face(s, i).word) == rtcp_face(p, y, b, i), w)
                for i in range(n + 1):
                    up = w[:i] + (ext.unit,) + w[i:]
                    yb = (y[:i] + (ext.fibre.unit,) + y[i:], b[:i] + (ext.base.unit,) + b[i:])
                    degs.check(alpha(ext, up) == yb, w)
                e = rtcp_edges(p, y, b)
                edges.check(e == edge_formula(p, y, b) == [ext.decode(v) for v in w], w)
                key = tuple(e)
                inj.check(seen.setdefault(key, (y, b)) == (y, b), w)
    return [t.result(ext) for t in (memb, faces, degs, edges, inj)]


def check_theorem_A(ext: Extension | Twisted, bound: int = DEFAULT_BOUND,
                    max_dim: int | None = None) -> AxiomReport:
    """Partial-group axioms of the extension plus its bundle structure."""
    if isinstance(ext, Extension):
        M = ext.total
    else:
        M = ext
    max_dim = min(bound, 3) if max_dim is None else max_dim
    report = check_axioms(M, bound)
    report.results.extend(check_bundle_model(M, max_dim))
    report.results.extend(_anti_involution_fast(M, bound))
    report.results.extend(_projection_checks(M, bound))
    return report


def _anti_involution_fast(M: PartialGroup, bound: int) -> list[LawResult]:
    T = word_tables(M, bound)
    inv = _Tally("anti-involution")
    loop = _Tally("anti-involution-loop")
    for k in range(bound + 1):
        idx = np.flatnonzero(T.acc[k])
        if not len(idx):
            continue
        j = T.inverse_idx(k, idx)
        back = T.inverse_idx(k, j)
        ok = T.acc[k][j] & (back == idx)
        inv.checked += len(idx)
        if not ok.all() and inv.witness is None:
            inv.witness = T.decode(k, int(idx[np.flatnonzero(~ok)[0]]))
        words = np.concatenate([T.words(k, j), T.words(k, idx)], axis=1)
        acc = M.accept_many(words)
        prod = M.product_many(words, acc)
        ok = acc & (prod == M.unit)
        loop.checked += len(idx)
        if not ok.all() and loop.witness is None:
            loop.witness = T.decode(k, int(idx[np.flatnonzero(~ok)[0]]))
    return [inv.result(M), loop.result(M)]


def _projection_checks(M: Twisted, bound: int) -> list[LawResult]:
    F, B = M.fibre, M.base
    out = []
    iota = [M.encode(x, B.unit) for x in range(F.size)]
    tau = [M.decode(i)[1] for i in range(M.size)]
    w = morphism_failure(iota, F, M, bound)
    out.append(LawResult("inclusion-morphism", w is None, F.size, w))
    w = morphism_failure(tau, M, B, bound)
    out.append(LawResult("projection-morphism", w is None, M.size, w))
    collapse = all(tau[iota[x]] == B.unit for x in range(F.size))
    kernel = sorted(i for i in range(M.size) if tau[i] == B.unit) == sorted(iota)
    out.append(LawResult("projection-kernel", collapse and kernel, M.size))
    return out


def check_anti_involution_scalar(M: PartialGroup, max_dim: int = 3) -> list[LawResult]:
    return check_anti_involution(M, max_dim)


# ---------------------------------------------------------------------------
# enumeration


def enumerate_twisting_pairs(fibre: PartialGroup, base: PartialGroup,
                             bound: int = DEFAULT_BOUND, limit: int | None = None,
                             allowed: dict | None = None):
    """Yield every valid twisting pair over ``fibre`` and ``base``.

    ``allowed`` optionally restricts t(g) to a given list of automorphisms.

    Backtracks over t(g), pruning pairs whose composite is not inner, then over
    eta(g, h), pruning on the cocycle formula.
    """
    F, B = fibre, base
    auts = enumerate_automorphisms(F, bound=bound).automorphisms
    N = compute_normalizer(F, bound)
    by_conj: dict = {}
    for v in sorted(N.members):
        by_conj.setdefault(N.conj_action[v], []).append(v)
    e, one = B.unit, F.unit
    elems = [e] + [g for g in range(B.size) if g != e]
    pairs = [(g, h) for g in range(B.size) for h in range(B.size) if B.accepts((g, h))]
    prod = {(g, h): B._product((g, h)) for g, h in pairs}
    triples = simplices(B, 3)
    psi: dict = {e: identity_aut(F)}
    found = 0

    def psi_ok(g):
        for (a, b) in pairs:
            ab = prod[(a, b)]
            if g in (a, b, ab) and a in psi and b in psi and ab in psi:
                target = compose_aut(compose_aut(psi[a], psi[b]), invert_aut(psi[ab]))
                if target not in by_conj:
                    return False
        return True

    # eta slots in an order that closes cocycle triples early
    slots = [(g, h) for g, h in pairs if g != e and h != e]
    slot_index = {s: i for i, s in enumerate(slots)}
    closing: list[list] = [[] for _ in slots]
    for g, h, k in triples:
        need = [(h, k), (g, prod[(h, k)]), (g, h), (prod[(g, h)], k)]
        last = max((slot_index[s] for s in need if s in slot_index), default=-1)
        if last >= 0:
            closing[last].append((g, h, k))

    def eta_search(i, eta, table):
        nonlocal found
        if i == len(slots):
            found += 1
            yield TwistingPair(F, B, table, dict(eta))
            return
        g, h = slots[i]
        target = compose_aut(compose_aut(psi[g], psi[h]), invert_aut(psi[prod[(g, h)]]))
        for v in by_conj.get(target, ()):
            eta[(g, h)] = v
            ok = True
            for a, b, c in closing[i]:
                lhs = F._product((table[a][eta[(b, c)]], eta[(a, prod[(b, c)])]))
                rhs = F._product((eta[(a, b)], eta[(prod[(a, b)], c)]))
                if lhs != rhs:
                    ok = False
                    break
            if ok:
                yield from eta_search(i + 1, eta, table)
                if limit is not None and found >= limit:
                    return
        eta.pop((g, h), None)

    def psi_search(j):
        if j == len(elems):
            table = [psi[g] for g in range(B.size)]
            eta = {(g, h): one for g, h in pairs if g == e or h == e}
            yield from eta_search(0, eta, table)
            return
        g = elems[j]
        for a in (allowed.get(g, auts) if allowed else auts):
            psi[g] = a
            if psi_ok(g):
                yield from psi_search(j + 1)
                if limit is not None and found >= limit:
                    return
        del psi[g]

    yield from psi_search(1)


def count_twisting_pairs(fibre: PartialGroup, base: PartialGroup, bound: int = DEFAULT_BOUND) -> int:
    return sum(1 for _ in enumerate_twisting_pairs(fibre, base, bound))
