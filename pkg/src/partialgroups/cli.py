"""Command line interface.

Every run prints a provenance header, then key/value records.  Exit status
is 0 on success, 1 when a check fails (witnesses are printed) and 2 on bad
input.
"""

from __future__ import annotations

import hashlib
import os
import re
import sys

import click

from . import __version__, formats
from .autcx import (BUDGET_ENV, compose_aut, compute_center, compute_normalizer,
                    enumerate_automorphisms, exact_sequence, find_isomorphism, identity_aut)
from .core import DEFAULT_BOUND, check_axioms
from .errors import BudgetExceeded, ParseError, PartialGroupError, PreconditionNotMet
from .groups import FiniteGroup, bits, mask_of


class Failed(Exception):
    """A check failed; the report has been printed."""


class Report:
    def __init__(self, command: str, inputs: list, flags: dict, fmt: str):
        self.fmt = fmt
        self.records: list[tuple[str, str]] = []
        head = [("tool", "partialgroups"), ("version", __version__), ("command", command)]
        for k, path in enumerate(inputs):
            head.append((f"input.{k}", path))
            head.append((f"input.{k}.sha256", _digest(path)))
        for k in sorted(flags):
            head.append((f"flag.{k}", str(flags[k])))
        self.header = head

    def add(self, key: str, value) -> None:
        key = re.sub(r"[^A-Za-z0-9_.\-]+", "_", key.strip())
        if isinstance(value, bool):
            value = "yes" if value else "no"
        self.records.append((key, str(value)))

    def emit(self) -> None:
        if self.fmt == "machine":
            for k, v in self.header + self.records:
                click.echo(f"{k}={v}")
        else:
            for k, v in self.header:
                click.echo(f"# {k}: {v}")
            for k, v in self.records:
                click.echo(f"{k}: {v}")


def _digest(path: str) -> str:
    if os.path.isfile(path):
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()
    from .corpus import GROUPS
    return "builtin" if path.lower() in GROUPS else "missing"


def run(command: str, inputs: list, flags: dict, body) -> None:
    """Run ``body(report)``, emit the report, and exit with the right status."""
    ctx = click.get_current_context()
    opts = ctx.find_root().obj
    if opts["budget"] is not None:
        os.environ[BUDGET_ENV] = str(opts["budget"])
    flags = dict(flags, bound=opts["bound"], budget=os.environ.get(BUDGET_ENV, "24"),
                 seed=opts["seed"])
    rep = Report(command, inputs, flags, opts["format"])
    status = 0
    try:
        body(rep, opts)
    except Failed:
        status = 1
    except (ParseError, PreconditionNotMet, FileNotFoundError) as exc:
        rep.add("error", exc)
        status = 2
    except BudgetExceeded as exc:
        rep.add("error", f"budget exceeded: {exc}")
        status = 2
    except PartialGroupError as exc:
        rep.add("error", f"{type(exc).__name__}: {exc}")
        if exc.witness is not None:
            rep.add("witness", exc.witness)
        status = 1
    rep.emit()
    sys.exit(status)


def _gens(G: FiniteGroup, mask: int) -> list[int]:
    out, cur = [], mask_of([G.identity])
    for g in bits(mask):
        if not (cur >> g) & 1:
            out.append(g)
            cur = G.closure(out)
    return out


def gens_label(G: FiniteGroup, mask: int) -> str:
    return "<" + ", ".join(G.labels[g] for g in _gens(G, mask)) + ">"


def _load(ref: str):
    return formats.resolve(formats.Token(ref, 0, 0), os.getcwd())


def _load_pg(ref: str):
    return formats.as_partial_group(_load(ref))


def _load_locality(ref: str, p: int | None, policy: str):
    obj = _load(ref)
    if isinstance(obj, formats.LocalityFile):
        return obj.build()
    if isinstance(obj, FiniteGroup):
        if p is None:
            raise PreconditionNotMet("a group reference needs --p")
        return formats.LocalityFile(obj, p, policy, []).build()
    raise PreconditionNotMet(f"{ref} is not a locality or a group")


# ---------------------------------------------------------------------------


@click.group()
@click.option("--bound", type=int, default=DEFAULT_BOUND, show_default=True,
              help="Word-length bound for exhaustive checks.")
@click.option("--budget", type=int, default=None,
              help=f"Carrier-size budget for automorphism search (default ${BUDGET_ENV} or 24).")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized checks.")
@click.option("--format", "fmt", type=click.Choice(["text", "machine"]), default="text",
              show_default=True)
@click.version_option(__version__)
@click.pass_context
def main(ctx, bound, budget, seed, fmt):
    """Finite partial groups, localities, extensions and transporter systems."""
    ctx.obj = {"bound": bound, "budget": budget, "seed": seed, "format": fmt}


@main.command("check-axioms")
@click.argument("ref")
def check_axioms_cmd(ref):
    """Check the partial-group axioms on words up to the bound."""
    def body(rep, o):
        M = _load_pg(ref)
        report = check_axioms(M, o["bound"])
        rep.add("size", M.size)
        for r in report.results:
            rep.add(f"law.{r.law}", f"{'pass' if r.passed else 'FAIL'} checked={r.checked}"
                    + ("" if r.witness is None else f" witness={r.witness}"))
        rep.add("result", "pass" if report.ok else "FAIL")
        if not report.ok:
            raise Failed
    run("check-axioms", [ref], {}, body)


def _closure_gens(elements, mul, identity):
    """Greedy generators of a finite group given by elements and a product."""
    elements = sorted(elements)
    cur, gens = {identity}, []
    for x in elements:
        if x in cur:
            continue
        gens.append(x)
        frontier = list(cur)
        while frontier:
            new = []
            for a in frontier:
                for g in gens:
                    b = mul(a, g)
                    if b not in cur:
                        cur.add(b)
                        new.append(b)
            frontier = new
    return gens


@main.command("invariants")
@click.argument("ref")
def invariants_cmd(ref):
    """Normalizer, center, and the automorphism exact sequence."""
    def body(rep, o):
        M = _load_pg(ref)
        N = compute_normalizer(M, o["bound"])
        Z = compute_center(M, N)
        aut = enumerate_automorphisms(M, bound=o["bound"])
        ex = exact_sequence(M, aut, o["bound"])
        mul = lambda a, b: M._product((a, b))  # noqa: E731
        ident = identity_aut(M)
        for k in ("N", "Z", "Aut", "Inn", "Out"):
            rep.add(f"order.{k}", ex.orders[k])
        for k, members in (("N", N.members), ("Z", Z.members)):
            rep.add(f"gens.{k}", "<" + ", ".join(M.labels[x] for x in _closure_gens(members, mul, M.unit)) + ">")
        for i, a in enumerate(_closure_gens(aut.automorphisms, compose_aut, ident)):
            rep.add(f"gens.Aut.{i}", ",".join(map(str, a)))
        reps = [cls[0] for cls in aut.outer_classes]
        for i, a in enumerate(reps[1:]):
            rep.add(f"out.{i + 1}", ",".join(map(str, a)))
        for k, v in ex.checks.items():
            rep.add(f"check.{k}", "pass" if v else "FAIL")
        if not ex.ok:
            raise Failed
    run("invariants", [ref], {}, body)


@main.command("extend")
@click.argument("pair_file")
def extend_cmd(pair_file):
    """Build the extension of a twisting pair and check it."""
    def body(rep, o):
        from .twist import build_extension, check_theorem_A, validate_twisting_pair
        pf = formats.read(pair_file)
        if not isinstance(pf, formats.PairFile):
            raise PreconditionNotMet(f"{pair_file} is not a pair file")
        pair = formats.build_pair(pf, o["bound"])
        cert = validate_twisting_pair(pair, o["bound"])
        rep.add("pair_valid", cert.valid)
        if not cert.valid:
            rep.add("reason", cert.reason)
            rep.add("witness", cert.witness)
            raise Failed
        ext = build_extension(pair, o["bound"], validate=False)
        rep.add("fibre_size", pair.fibre.size)
        rep.add("base_size", pair.base.size)
        rep.add("total_size", ext.total.size)
        report = check_theorem_A(ext, o["bound"])
        for r in report.failures():
            rep.add(f"law.{r.law}", f"FAIL witness={r.witness}")
        rep.add("laws_checked", len(report.results))
        rep.add("result", "pass" if report.ok else "FAIL")
        if not report.ok:
            raise Failed
    run("extend", [pair_file], {}, body)


def _action(fibre, base, name):
    from .cohomology import named_action
    return named_action(fibre, base, name)


@main.command("classify-extensions")
@click.argument("fibre")
@click.argument("base")
@click.option("--action", type=click.Choice(["trivial", "inversion"]), default="trivial",
              show_default=True)
def classify_cmd(fibre, base, action):
    """Count extensions up to strong equivalence and compare with H^2."""
    def body(rep, o):
        from .cohomology import classify_extensions
        F, B = _load_pg(fibre), _load_pg(base)
        r = classify_extensions(F, B, _action(F, B, action), bound=o["bound"])
        rep.add("summary", f"{r.class_count} classes; |H²| = {r.h2_order}")
        for line in r.lines():
            k, v = line.split("=", 1)
            rep.add(k, v)
        for n in r.notes:
            rep.add("note", n)
        if r.notes or not r.agrees:
            raise Failed
    run("classify-extensions", [fibre, base], {"action": action}, body)


@main.command("obstruction")
@click.argument("fibre")
@click.argument("base")
@click.option("--action", type=click.Choice(["trivial", "inversion"]), default="trivial",
              show_default=True)
def obstruction_cmd(fibre, base, action):
    """The obstruction 3-cochain of an outer action."""
    def body(rep, o):
        from .cohomology import obstruction_class
        F, B = _load_pg(fibre), _load_pg(base)
        r = obstruction_class(F, B, _action(F, B, action), bound=o["bound"])
        rep.add("cocycle", r.is_cocycle)
        rep.add("coboundary", r.is_coboundary)
        rep.add("extension_exists", r.is_coboundary)
        nz = r.nonzero()
        rep.add("nonzero_values", len(nz))
        for w, v in sorted(nz.items())[:8]:
            rep.add("kappa[" + "|".join(B.labels[x] for x in w) + "]", F.labels[v])
        if not r.is_cocycle:
            raise Failed
    run("obstruction", [fibre, base], {"action": action}, body)


# ---------------------------------------------------------------------------
# localities


@main.group("locality")
def locality_grp():
    """Localities of finite groups."""


@locality_grp.command("from-group")
@click.argument("group_ref")
@click.option("--p", "p", type=int, required=True)
@click.option("--policy", type=click.Choice(["all", "centric", "centric-radical"]), default="all",
              show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write a locality file.")
def locality_from_group_cmd(group_ref, p, policy, output):
    """Build the locality of a group at p and check it."""
    def body(rep, o):
        from .locality import check_locality
        L = _load_locality(group_ref, p, policy)
        _locality_records(rep, L)
        results = check_locality(L, min(o["bound"], 3))
        for r in results:
            rep.add(f"check.{r.law}", "pass" if r.passed else f"FAIL witness={r.witness}")
        if output:
            with open(output, "w") as fh:
                fh.write(f"locality {group_ref} {p} {policy}\n")
            rep.add("written", output)
        if not all(r.passed for r in results):
            raise Failed
    run("locality from-group", [group_ref], {"p": p, "policy": policy}, body)


def _locality_records(rep, L):
    rep.add("size", L.pg.size)
    rep.add("order.S", len(L.S))
    rep.add("objects", len(L.delta))
    for k, P in enumerate(L.delta):
        rep.add(f"object.{k}", gens_label(L.S_group, P))


@main.group("fusion")
def fusion_grp():
    """Fusion systems of localities."""


@fusion_grp.command("report")
@click.argument("ref")
@click.option("--p", "p", type=int, default=None, help="Prime, when REF is a group.")
@click.option("--policy", type=click.Choice(["all", "centric", "centric-radical"]), default="all")
def fusion_report_cmd(ref, p, policy):
    """Classify the subgroups of S up to fusion."""
    def body(rep, o):
        from .locality import fusion_system
        L = _load_locality(ref, p, policy)
        F = fusion_system(L)
        flags = F.classify()
        seen, k = set(), 0
        for P in F.subgroups:
            if P in seen:
                continue
            cls = F.conjugates(P)
            seen |= cls
            fl = flags[P]
            names = [n for n in ("centric", "radical", "fully_normalized", "fully_centralized",
                                 "weakly_closed", "strongly_closed", "normal") if getattr(fl, n)]
            rep.add(f"class.{k}", f"{gens_label(F.S, P)} order={bin(P).count('1')} "
                    f"size={len(cls)} |Out_F|={F.out_order(P)} " + ",".join(names))
            k += 1
        rep.add("classes", k)
    run("fusion report", [ref], {"p": p, "policy": policy}, body)


@main.command("saturation")
@click.argument("ref")
@click.option("--p", "p", type=int, default=None, help="Prime, when REF is a group.")
@click.option("--policy", type=click.Choice(["all", "centric", "centric-radical"]), default="all")
def saturation_cmd(ref, p, policy):
    """Check the saturation axioms for the fusion system of a locality."""
    def body(rep, o):
        from .locality import check_saturation, fusion_system
        L = _load_locality(ref, p, policy)
        s = check_saturation(fusion_system(L))
        rep.add("axiom_I", s.axiom_I)
        rep.add("axiom_II", s.axiom_II)
        rep.add("saturated", s.saturated)
        if not s.saturated:
            rep.add("witness", s.witness)
            rep.add("detail", s.detail)
            raise Failed
    run("saturation", [ref], {"p": p, "policy": policy}, body)


# ---------------------------------------------------------------------------
# extensions of localities


def _induced_records(rep, ind):
    ext = ind.ext
    rep.add("total_size", ext.total.size)
    rep.add("order.S", len(ind.S))
    rep.add("objects", len(ind.delta))
    rep.add("T_size", ind.T.pg.size)
    for r in ind.checks:
        rep.add(f"check.{r.law}", "pass" if r.passed else f"FAIL witness={r.witness}")


@main.command("extend-locality")
@click.argument("fibre")
@click.argument("base")
@click.argument("pair_file")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write an extension file.")
def extend_locality_cmd(fibre, base, pair_file, output):
    """Build an isotypical extension of localities and its induced locality."""
    def body(rep, o):
        from .locext import build_sylow_and_delta
        text = f"extension localities {fibre} {base} {pair_file}\n"
        ef = formats.parse(text, os.getcwd())
        ext = formats.build_extension_file(ef, o["bound"])
        ind = build_sylow_and_delta(ext, o["bound"])
        _induced_records(rep, ind)
        if output:
            with open(output, "w") as fh:
                fh.write(f"extension localities {os.path.abspath(fibre)} {os.path.abspath(base)} "
                         f"{os.path.abspath(pair_file)}\n")
            rep.add("written", output)
        if not all(r.passed for r in ind.checks):
            raise Failed
    run("extend-locality", [fibre, base, pair_file], {}, body)


@main.command("from-group-extension")
@click.argument("k")
@click.argument("g")
@click.argument("q")
@click.option("--p", "p", type=int, required=True)
@click.option("--fibre-policy", type=click.Choice(["all", "centric", "centric-radical"]),
              default="centric", show_default=True)
@click.option("--base-policy", type=click.Choice(["all", "centric", "centric-radical"]),
              default="all", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Write an extension file for 'goodness'.")
def from_group_extension_cmd(k, g, q, p, fibre_policy, base_policy, output):
    """The locality extension of a group extension K -> G -> Q."""
    def body(rep, o):
        from .locext import build_sylow_and_delta, check_group_map
        text = f"extension group {k} {g} {q} {p} {fibre_policy} {base_policy}\n"
        ext = formats.build_extension_file(formats.parse(text, os.getcwd()), o["bound"])
        ind = build_sylow_and_delta(ext, o["bound"])
        gm = check_group_map(ext)
        rep.add("check.group-map", "pass" if gm.passed else f"FAIL witness={gm.witness}")
        _induced_records(rep, ind)
        if output:
            refs = [r if os.path.isabs(r) or not os.path.exists(r) else os.path.abspath(r)
                    for r in (k, g, q)]
            with open(output, "w") as fh:
                fh.write(f"extension group {' '.join(refs)} {p} {fibre_policy} {base_policy}\n")
            rep.add("written", output)
        if not gm.passed or not all(r.passed for r in ind.checks):
            raise Failed
    run("from-group-extension", [k, g, q], {"p": p, "fibre_policy": fibre_policy,
                                            "base_policy": base_policy}, body)


@main.command("goodness")
@click.argument("extension_file")
@click.option("--t-equals-l", "t_eq_l", is_flag=True, help="Also compare T with L.")
def goodness_cmd(extension_file, t_eq_l):
    """Goodness, rigidity and admissibility of an extension file."""
    def body(rep, o):
        from .locext import build_sylow_and_delta, check_good, verify_examples_T_equals_L
        ef = formats.read(extension_file)
        if not isinstance(ef, formats.ExtensionFile):
            raise PreconditionNotMet(f"{extension_file} is not an extension file")
        ext = formats.build_extension_file(ef, o["bound"])
        ind = build_sylow_and_delta(ext, o["bound"])
        g = check_good(ind, o["bound"])
        for line in g.lines():
            key, val = line.split(": ", 1)
            rep.add(key, val)
        if t_eq_l:
            r = verify_examples_T_equals_L(ind, min(o["bound"], 3), strict=False)
            for line in r.lines():
                key, val = line.split(": ", 1) if ": " in line else (line, "")
                rep.add("T_equals_L." + key.replace("T = L", "equal"), val)
        if not g.good:
            raise Failed
    run("goodness", [extension_file], {"t_equals_l": t_eq_l}, body)


# ---------------------------------------------------------------------------
# transporter systems


@main.group("transporter")
def transporter_grp():
    """Transporter systems and their quotient localities."""


def _load_transporter(path):
    from .transporter import TransporterSystem
    T = formats.read(path)
    if not isinstance(T, TransporterSystem):
        raise PreconditionNotMet(f"{path} is not a transporter file")
    return T


@transporter_grp.command("check")
@click.argument("transporter_file")
@click.option("--samples", type=int, default=100, show_default=True,
              help="Random chains for the maximal-representative checks.")
def transporter_check_cmd(transporter_file, samples):
    """Check the transporter-system axioms and maximal representatives."""
    def body(rep, o):
        from .transporter import check_maximal_representatives, check_transporter_axioms
        T = _load_transporter(transporter_file)
        rep.add("objects", len(T.objects))
        rep.add("morphisms", len(T.morphisms))
        report = check_transporter_axioms(T)
        results = list(report.results)
        if report.ok and samples:
            results += check_maximal_representatives(T, samples, o["seed"])
        for r in results:
            rep.add(f"axiom.{r.law}", f"{'pass' if r.passed else 'FAIL'} checked={r.checked}"
                    + ("" if r.witness is None else f" witness={r.witness}"))
        ok = all(r.passed for r in results)
        rep.add("result", "pass" if ok else "FAIL")
        if not ok:
            raise Failed
    run("transporter check", [transporter_file], {"samples": samples}, body)


@transporter_grp.command("quotient")
@click.argument("transporter_file")
@click.option("--compare", default=None, help="A locality file or group to compare with (needs --p).")
@click.option("--p", "p", type=int, default=None)
@click.option("--policy", type=click.Choice(["all", "centric", "centric-radical"]), default="all")
def transporter_quotient_cmd(transporter_file, compare, p, policy):
    """Collapse inclusions to obtain a locality."""
    def body(rep, o):
        from .transporter import quotient_to_locality
        T = _load_transporter(transporter_file)
        res = quotient_to_locality(T, min(o["bound"], 3))
        _locality_records(rep, res.locality)
        for r in res.checks:
            rep.add(f"check.{r.law}", "pass" if r.passed else f"FAIL witness={r.witness}")
        ok = res.ok
        if compare:
            L = _load_locality(compare, p, policy)
            iso = find_isomorphism(res.locality.pg, L.pg, min(o["bound"], 3))
            rep.add("isomorphic", iso is not None)
            ok &= iso is not None
        if not ok:
            raise Failed
    run("transporter quotient", [transporter_file], {"compare": compare}, body)


@transporter_grp.command("from-group")
@click.argument("group_ref")
@click.option("--p", "p", type=int, required=True)
@click.option("--policy", type=click.Choice(["all", "centric", "centric-radical"]),
              default="centric", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def transporter_from_group_cmd(group_ref, p, policy, output):
    """Write the transporter category of a group as a transporter file."""
    def body(rep, o):
        from .transporter import from_group
        G = _load(group_ref)
        if not isinstance(G, FiniteGroup):
            raise PreconditionNotMet(f"{group_ref} is not a group")
        T = from_group(G, p, policy)
        with open(output, "w") as fh:
            fh.write(formats.write_transporter(T))
        rep.add("objects", len(T.objects))
        rep.add("morphisms", len(T.morphisms))
        rep.add("written", output)
    run("transporter from-group", [group_ref], {"p": p, "policy": policy}, body)


if __name__ == "__main__":
    main()
