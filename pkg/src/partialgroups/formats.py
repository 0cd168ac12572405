"""Text formats for groups, partial groups, localities, twisting pairs, extensions and transporter systems.

Files are line oriented.  ``#`` starts a comment.  A line whose first token
is an integer continues the previous directive, so long tables may wrap.
All indices are 0-based.  A reference (``<ref>``) is either a built-in group
name (z2, z3, z4, klein, s3, d8, q8, a4, s4, gl23, ...) or a path, resolved
relative to the referring file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from . import corpus
from .core import ExplicitTable, GroupLike, PartialGroup
from .errors import ParseError, PartialGroupError
from .groups import FiniteGroup, bits, mask_of

POLICIES = ("all", "centric", "centric-radical", "custom")


@dataclass
class Token:
    text: str
    line: int
    column: int

    def int(self) -> int:
        try:
            return int(self.text)
        except ValueError:
            raise ParseError(f"expected an integer, got {self.text!r}", self.line, self.column) from None

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.column)


@dataclass
class Directive:
    keyword: Token
    args: list = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.keyword.text

    def need(self, n: int) -> list[Token]:
        if len(self.args) < n:
            last = self.args[-1] if self.args else self.keyword
            raise ParseError(f"'{self.name}' needs {n} arguments, got {len(self.args)}",
                             last.line, last.column + len(last.text))
        return self.args

    def ints(self, start: int = 0) -> list[int]:
        return [t.int() for t in self.args[start:]]


def tokenize(text: str) -> list[Directive]:
    out: list[Directive] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks, col = [], 0
        for part in line.split():
            col = line.index(part, col)
            toks.append(Token(part, ln, col + 1))
            col += len(part)
        if not toks:
            continue
        if toks[0].text.lstrip("-").isdigit():
            if not out:
                raise toks[0].error("a continuation line before any directive")
            out[-1].args.extend(toks)
        else:
            out.append(Directive(toks[0], toks[1:]))
    return out


def _expect(d: Directive, *names: str):
    if d.name not in names:
        raise d.keyword.error(f"expected {' or '.join(repr(n) for n in names)}, got {d.name!r}")


# ---------------------------------------------------------------------------
# groups and partial groups


def _parse_perm(tok: Token, degree: int) -> tuple[int, ...]:
    try:
        img = tuple(int(v) for v in tok.text.split(","))
    except ValueError:
        raise tok.error(f"bad permutation {tok.text!r}") from None
    if len(img) != degree or sorted(img) != list(range(degree)):
        raise tok.error(f"not a permutation of 0..{degree - 1}")
    return img


def _group_from(d: Directive, args: list[Token], base_dir: str) -> FiniteGroup:
    """Arguments after ``group``: permutation / table / named."""
    if not args:
        raise d.keyword.error("missing group kind")
    kind = args[0]
    if kind.text == "named":
        if len(args) < 2:
            raise kind.error("missing group name")
        try:
            return corpus.group(args[1].text)
        except PartialGroupError:
            raise args[1].error(f"unknown group name {args[1].text!r}") from None
    if kind.text == "permutation":
        if len(args) < 3:
            raise kind.error("need a degree and at least one generator")
        degree = args[1].int()
        gens = [_parse_perm(t, degree) for t in args[2:]]
        return FiniteGroup.from_permutations(gens, degree)
    if kind.text == "table":
        if len(args) < 2:
            raise kind.error("missing order")
        n = args[1].int()
        cells = args[2:]
        if len(cells) != n * n:
            last = cells[-1] if cells else args[1]
            raise last.error(f"a table of order {n} needs {n * n} entries, got {len(cells)}")
        vals = [c.int() for c in cells]
        for c, v in zip(cells, vals):
            if not 0 <= v < n:
                raise c.error(f"entry {v} out of range")
        table = [vals[i * n:(i + 1) * n] for i in range(n)]
        try:
            G = FiniteGroup(table)
        except ValueError as exc:
            raise kind.error(str(exc)) from None
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if G.rows[G.rows[a][b]][c] != G.rows[a][G.rows[b][c]]:
                        raise kind.error(f"table is not associative at ({a}, {b}, {c})")
        return G
    raise kind.error(f"unknown group kind {kind.text!r}")


def _partial_table(ds: list[Directive]) -> ExplicitTable:
    head = ds[0]
    args = head.need(3)
    if args[0].text != "table":
        raise args[0].error("expected 'partial table'")
    n, unit = args[1].int(), args[2].int()
    if not 0 <= unit < n:
        raise args[2].error("unit out of range")
    inverse = None
    words: dict = {(x,): x for x in range(n)}
    for d in ds[1:]:
        _expect(d, "inv", "word")
        if d.name == "inv":
            inverse = d.ints()
            if len(inverse) != n or any(not 0 <= v < n for v in inverse):
                raise d.keyword.error(f"'inv' needs {n} entries in range")
        else:
            eq = next((k for k, t in enumerate(d.args) if t.text == "="), None)
            if eq is None or eq != len(d.args) - 2:
                raise d.keyword.error("expected 'word <x1> ... <xk> = <value>'")
            w = tuple(t.int() for t in d.args[:eq])
            v = d.args[-1].int()
            for t, x in zip(d.args, w + (v,)):
                if not 0 <= x < n:
                    raise t.error(f"element {x} out of range")
            words[w] = v
    if inverse is None:
        raise head.keyword.error("missing 'inv' line")
    bound = max(len(w) for w in words)
    return ExplicitTable(n, unit, inverse, words, bound, name="table")


# ---------------------------------------------------------------------------
# references


@dataclass
class LocalityFile:
    group: FiniteGroup
    prime: int
    policy: str
    custom: list

    def build(self):
        from .locality import locality_from_group
        return locality_from_group(self.group, self.prime, self.policy,
                                   custom=self.custom or None)


@dataclass
class PairFile:
    fibre: object
    base: object
    t: dict
    eta: dict
    directives: dict


@dataclass
class ExtensionFile:
    kind: str
    args: tuple


def read(path: str):
    """Parse a file by its first directive."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", 0, 0) from None
    return parse(text, os.path.dirname(os.path.abspath(path)))


def parse(text: str, base_dir: str = "."):
    ds = tokenize(text)
    if not ds:
        raise ParseError("empty input", 1, 1)
    head = ds[0]
    if head.name == "group":
        if len(ds) > 1:
            raise ds[1].keyword.error("unexpected directive after the group")
        return _group_from(head, head.args, base_dir)
    if head.name == "partial":
        return _partial_table(ds)
    if head.name == "locality":
        return _locality(ds, base_dir)
    if head.name == "pair":
        return _pair(ds, base_dir)
    if head.name == "extension":
        return _extension(ds, base_dir)
    if head.name == "transporter":
        return _transporter(ds, base_dir)
    raise head.keyword.error(f"unknown file kind {head.name!r}")


def resolve(tok: Token, base_dir: str):
    name = tok.text
    if name.lower() in corpus.GROUPS:
        return corpus.group(name)
    path = name if os.path.isabs(name) else os.path.join(base_dir, name)
    if not os.path.exists(path):
        raise tok.error(f"unknown reference {name!r}")
    return read(path)


def as_group(obj, tok: Token) -> FiniteGroup:
    if not isinstance(obj, FiniteGroup):
        raise tok.error("expected a group")
    return obj


def as_partial_group(obj) -> PartialGroup:
    """Groups become GroupLike; localities contribute their partial group."""
    from .locality import Locality
    if isinstance(obj, FiniteGroup):
        return GroupLike(obj)
    if isinstance(obj, LocalityFile):
        return obj.build().pg
    if isinstance(obj, Locality):
        return obj.pg
    if isinstance(obj, PartialGroup):
        return obj
    raise TypeError(f"not a partial group: {type(obj).__name__}")


def load_partial_group(path_or_name: str) -> PartialGroup:
    tok = Token(path_or_name, 0, 0)
    return as_partial_group(resolve(tok, os.getcwd()))


def _locality(ds: list[Directive], base_dir: str) -> LocalityFile:
    head = ds[0]
    args = head.need(2)
    G = as_group(resolve(args[0], base_dir), args[0])
    p = args[1].int()
    policy = args[2].text if len(args) > 2 else "all"
    if policy not in POLICIES:
        raise args[2].error(f"unknown policy {policy!r}")
    custom = []
    for d in ds[1:]:
        _expect(d, "object")
        gens = d.ints()
        for t, g in zip(d.args, gens):
            if not 0 <= g < G.order:
                raise t.error(f"element {g} out of range")
        custom.append(G.closure(gens))
    if policy == "custom" and not custom:
        raise head.keyword.error("policy 'custom' needs 'object' lines")
    if custom and policy != "custom":
        raise ds[1].keyword.error("'object' lines need policy 'custom'")
    return LocalityFile(G, p, policy, custom)


def _pair(ds: list[Directive], base_dir: str) -> PairFile:
    head = ds[0]
    args = head.need(2)
    fibre = resolve(args[0], base_dir)
    base = resolve(args[1], base_dir)
    t, eta, where = {}, {}, {"head": head}
    for d in ds[1:]:
        _expect(d, "t", "eta")
        if d.name == "t":
            a = d.need(2)
            g = a[0].int()
            if a[1].text == "map":
                t[g] = ("map", tuple(d.ints(2)))
            else:
                t[g] = ("index", a[1].int())
            where[("t", g)] = d
        else:
            a = d.need(3)
            g, h, x = a[0].int(), a[1].int(), a[2].int()
            eta[(g, h)] = x
            where[("eta", g, h)] = d
    return PairFile(fibre, base, t, eta, where)


def build_pair(pf: PairFile, bound: int):
    """The TwistingPair described by a pair file."""
    from .autcx import enumerate_automorphisms
    from .twist import TwistingPair
    F, B = as_partial_group(pf.fibre), as_partial_group(pf.base)
    aut = None
    psi = []
    for g in range(B.size):
        if g not in pf.t:
            if g == B.unit:
                psi.append(tuple(range(F.size)))
                continue
            raise pf.directives["head"].keyword.error(f"missing 't {g}' line")
        kind, val = pf.t[g]
        d = pf.directives[("t", g)]
        if kind == "map":
            if sorted(val) != list(range(F.size)):
                raise d.args[1].error("'map' needs a permutation of the fibre")
            psi.append(val)
        else:
            aut = aut or enumerate_automorphisms(F, bound=bound)
            if not 0 <= val < aut.order:
                raise d.args[1].error(f"automorphism index {val} out of range ({aut.order})")
            psi.append(aut.automorphisms[val])
    eta = dict(pf.eta)
    for g in range(B.size):
        for h in range(B.size):
            if B.accepts((g, h)) and (g, h) not in eta:
                if g == B.unit or h == B.unit:
                    eta[(g, h)] = F.unit
                else:
                    raise pf.directives["head"].keyword.error(f"missing 'eta {g} {h}' line")
    for (g, h), x in eta.items():
        d = pf.directives.get(("eta", g, h))
        if d is not None and not (0 <= x < F.size and B.accepts((g, h))):
            raise d.keyword.error(f"eta {g} {h} is out of range or on a rejected pair")
    return TwistingPair(F, B, psi, eta, "file")


def _extension(ds: list[Directive], base_dir: str) -> ExtensionFile:
    head = ds[0]
    args = head.need(1)
    kind = args[0].text
    if kind == "group":
        a = head.need(5)
        K, G, Q = (as_group(resolve(t, base_dir), t) for t in a[1:4])
        p = a[4].int()
        fibre_policy = a[5].text if len(a) > 5 else "centric"
        base_policy = a[6].text if len(a) > 6 else "all"
        for t in a[5:7]:
            if t.text not in POLICIES[:3]:
                raise t.error(f"unknown policy {t.text!r}")
        return ExtensionFile("group", (K, G, Q, p, fibre_policy, base_policy))
    if kind == "localities":
        a = head.need(4)
        fibre, base = resolve(a[1], base_dir), resolve(a[2], base_dir)
        pair = resolve(a[3], base_dir)
        for obj, t in ((fibre, a[1]), (base, a[2])):
            if not isinstance(obj, LocalityFile):
                raise t.error("expected a locality file")
        if not isinstance(pair, PairFile):
            raise a[3].error("expected a pair file")
        return ExtensionFile("localities", (fibre, base, pair))
    raise args[0].error(f"unknown extension kind {kind!r}")


def build_extension_file(ef: ExtensionFile, bound: int):
    from .locext import group_extension_to_locality_extension, isotypical_extension
    if ef.kind == "group":
        K, G, Q, p, fp, bp = ef.args
        return group_extension_to_locality_extension(K, G, Q, p, fibre_policy=fp, base_policy=bp,
                                                     bound=bound)
    fibre, base, pf = ef.args
    Lf, Lb = fibre.build(), base.build()
    pf = PairFile(Lf, Lb, pf.t, pf.eta, pf.directives)
    return isotypical_extension(Lf, Lb, build_pair(pf, bound), bound=bound)


# ---------------------------------------------------------------------------
# transporter systems


def _transporter(ds: list[Directive], base_dir: str):
    from .locality import FusionSystem
    from .transporter import TransporterSystem
    head = ds[0]
    p = head.need(1)[0].int()
    S = None
    objects, morphisms, rho, eps, comp = [], [], [], {}, {}
    for d in ds[1:]:
        _expect(d, "sgroup", "object", "morphism", "eps", "compose")
        if d.name == "sgroup":
            S = _group_from(d, d.args, base_dir)
            continue
        if S is None:
            raise d.keyword.error("'sgroup' must come first")
        if d.name == "object":
            gens = d.ints()
            for t, g in zip(d.args, gens):
                if not 0 <= g < S.order:
                    raise t.error(f"element {g} out of range")
            objects.append(S.closure(gens) if gens else mask_of([S.identity]))
        elif d.name == "morphism":
            a = d.need(5)
            if a[3].text != "rho":
                raise a[3].error("expected 'rho'")
            src, tgt, label = a[0].int(), a[1].int(), a[2].int()
            for t, k in ((a[0], src), (a[1], tgt)):
                if not 0 <= k < len(objects):
                    raise t.error(f"object {k} is not declared")
            img = tuple(d.ints(4))
            P, Q = objects[src], objects[tgt]
            if len(img) != len(bits(P)):
                raise a[3].error(f"rho needs {len(bits(P))} images")
            if mask_of(img) & ~Q:
                raise a[3].error("rho does not land in the target")
            morphisms.append((P, Q, label))
            rho.append(img)
        elif d.name == "eps":
            a = d.need(2)
            eps[a[0].int()] = a[1].int()
        else:
            a = d.need(3)
            comp[(a[0].int(), a[1].int())] = a[2].int()
    if S is None:
        raise head.keyword.error("missing 'sgroup'")
    gens = {}
    for (P, _, _), img in zip(morphisms, rho):
        arr = [-1] * S.order
        for x, y in zip(bits(P), img):
            arr[x] = y
        gens[(P, tuple(arr))] = None
    F = FusionSystem.generate(S, list(gens), p, name="F(file)")
    return TransporterSystem(S, p, objects, morphisms, lambda a, b: comp.get((a, b)), eps.get,
                             rho, F, "file")


def _table_lines(G: FiniteGroup) -> list[str]:
    return [" ".join(str(v) for v in row) for row in G.rows]


def write_group(G: FiniteGroup) -> str:
    if G.perms is not None:
        gens, cur = [], mask_of([G.identity])
        for g in range(G.order):
            if not (cur >> g) & 1:
                gens.append(g)
                cur = G.closure(gens)
        degree = len(G.perms[0])
        return f"group permutation {degree} " + " ".join(",".join(map(str, G.perms[g])) for g in gens) + "\n"
    return "\n".join([f"group table {G.order}"] + _table_lines(G)) + "\n"


def write_partial_table(M: PartialGroup, bound: int) -> str:
    lines = [f"partial table {M.size} {M.unit}", "inv " + " ".join(map(str, M.inverse))]
    for k in range(2, bound + 1):
        for w in M.accepted_words(k):
            lines.append("word " + " ".join(map(str, w)) + f" = {M._product(w)}")
    return "\n".join(lines) + "\n"


def write_transporter(T) -> str:
    lines = [f"transporter {T.prime}", f"sgroup table {T.S.order}"] + _table_lines(T.S)
    oidx = {P: k for k, P in enumerate(T.objects)}
    for P in T.objects:
        lines.append("object " + " ".join(map(str, bits(P))))
    labels = {}
    for i, (P, Q, a) in enumerate(T.morphisms):
        labels.setdefault(a, len(labels))
        lines.append(f"morphism {oidx[P]} {oidx[Q]} {labels[a]} rho " + " ".join(map(str, T.rho[i])))
    for s in range(T.S.order):
        a = T.eps_label(s)
        if a in labels:
            lines.append(f"eps {s} {labels[a]}")
    seen = set()
    for (P, Q), ii in T.by_pair.items():
        for R in T.objects:
            for j in T.mor(Q, R):
                for i in ii:
                    a, b = T.morphisms[i][2], T.morphisms[j][2]
                    k = T.compose(i, j)
                    if (a, b) in seen or k is None:
                        continue
                    seen.add((a, b))
                    lines.append(f"compose {labels[a]} {labels[b]} {labels[T.morphisms[k][2]]}")
    return "\n".join(lines) + "\n"


def write_pair(fibre_ref: str, base_ref: str, pair) -> str:
    lines = [f"pair {fibre_ref} {base_ref}"]
    for g, a in enumerate(pair.psi):
        lines.append(f"t {g} map " + " ".join(map(str, a)))
    for (g, h), x in sorted(pair.eta.items()):
        lines.append(f"eta {g} {h} {x}")
    return "\n".join(lines) + "\n"
