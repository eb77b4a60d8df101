"""Command-line front end.

Exit codes: 0 success, 2 unreadable input, 3 a model violates an axiom,
4 two independent computations disagree.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field

from . import dlat, invariant, redprod, subfunctor, typespace
from .model import FinModel, check_theory
from .semcat import LatticeTooLarge, SemCat
from .syntax import DSLError, Theory, format_sequent, parse_model, parse_theory

EXIT_OK, EXIT_PARSE, EXIT_AXIOM, EXIT_ORACLE = 0, 2, 3, 4


class InputError(Exception):
    pass


class AxiomFailure(Exception):
    pass


@dataclass
class Report:
    command: list
    config: dict
    findings: list = field(default_factory=list)  # (kind, record)
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, kind: str, **record):
        self.findings.append((kind, record))

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "findings": [{"kind": k, **r} for k, r in self.findings],
            "verdicts": self.verdicts,
            "notes": self.notes,
        }

    def render(self, structured: bool) -> str:
        if structured:
            return json.dumps(self.as_dict(), indent=2, sort_keys=True, default=str) + "\n"
        out = ["# " + " ".join(self.command)]
        out.append("config " + " ".join(f"{k}={v}" for k, v in sorted(self.config.items())))
        for kind, rec in self.findings:
            body = " ".join(f"{k}={_flat(v)}" for k, v in rec.items())
            out.append(f"{kind}: {body}")
        for k, v in self.verdicts.items():
            out.append(f"verdict {k}: {_flat(v)}")
        for n in self.notes:
            out.append(f"note: {n}")
        return "\n".join(out) + "\n"


def _flat(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_flat(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ",".join(f"{k}:{_flat(x)}" for k, x in v.items()) + "}"
    return str(v)


# ---------------------------------------------------------------------------
# loading


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _load_theory(path: str) -> Theory:
    try:
        return parse_theory(_read(path))
    except DSLError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_models(paths, sig) -> list[FinModel]:
    """Each file holds one model, or several each opened by a ``model`` header."""
    out = []
    for path in paths:
        text = _read(path)
        starts = [m.start() for m in re.finditer(r"(?m)^\s*model\b", text)]
        chunks = [text] if len(starts) <= 1 else [
            "\n" * text.count("\n", 0, a) + text[a:b] for a, b in zip(starts, starts[1:] + [len(text)])]
        base = os.path.splitext(os.path.basename(path))[0]
        for k, chunk in enumerate(chunks):
            try:
                M = parse_model(chunk, sig, name=base if len(chunks) == 1 else f"{base}{k}")
            except DSLError as exc:
                raise InputError(f"{path}: {exc}") from exc
            out.append(M)
    return out


def _check_axioms(theory: Theory, models, report: Report):
    failures = []
    for M in models:
        for k, wit in check_theory(M, theory.axioms):
            names = tuple(M.element_name(s, e) for (_, s), e in zip(theory.axioms[k].context, wit))
            failures.append(f"{M.label()} fails axiom {k} ({format_sequent(theory.axioms[k])}) at {names}")
    if failures:
        report.notes.extend(failures)
        raise AxiomFailure("; ".join(failures))


def _load_lattice(path: str) -> dlat.FinDistLattice:
    try:
        return dlat.parse_lattice(_read(path))
    except dlat.LatticeError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InputError(f"expected integers, got {text!r}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args, report: Report):
    theory = _load_theory(args.theory)
    models = _load_models(args.models, theory.signature)
    if not models:
        raise InputError("no models given")
    _check_axioms(theory, models, report)
    report.add("axioms", count=len(theory.axioms), models=[M.label() for M in models], status="all hold")
    cat = SemCat(models, args.nmax, args.max_lattice)
    for note in cat.notes:
        report.notes.append(note)
    for x in cat.contexts:
        try:
            size = cat.lattice_size(x, args.max_lattice)
        except LatticeTooLarge:
            size = None
        report.add("context", sorts=list(x), points=cat.info(x).total, classes=len(cat.class_reps(x)),
                   lattice=size if size is not None else f">{args.max_lattice}",
                   atoms=len(cat.atom_subobjects(x)))
    for x in cat.contexts:
        if len(x) > 1:
            continue
        try:
            ts = typespace.type_space(cat, x)
        except Exception as exc:  # size guard only
            report.add("types", sorts=list(x), status=f"skipped: {exc}")
            continue
        hasse = [[i, j] for i in range(len(ts.types)) for j in range(len(ts.types))
                 if i != j and ts.space.specialization[i][j]] if ts.types else []
        report.add("types", sorts=list(x), count=len(ts.types), specialization=hasse)
        for row in typespace.omitted_type_table(cat, x):
            gen, wits = row
            report.add("realization", sorts=list(x), type=gen,
                       members=[w if w is None else list(w) for w in wits])
    for i, M in enumerate(models):
        try:
            lm = invariant.lm_compute(cat, i)
        except LatticeTooLarge as exc:
            report.add("lm", model=M.label(), status=f"too large: {exc}")
            lm = None
        pc = invariant.is_positively_closed_direct(cat, i)
        two = lm.is_two() if lm is not None else False
        if pc.closed != two:
            raise invariant.OracleDisagreement(
                f"{M.label()}: direct scan says {pc.closed} but LM has two elements: {two}")
        if lm is not None:
            report.add("lm", model=M.label(), classes=len(lm), complete=lm.complete,
                       bound=lm.node_bound, closure_merges=lm.closure_merges)
            for line in invariant.lm_dump(lm)[1:]:
                report.add("lm-class", model=M.label(), text=line.strip())
        cex = None
        if pc.counterexample is not None:
            u, x, a = pc.counterexample
            cex = {"set": cat.witness_text(u), "sorts": list(x),
                   "tuple": [M.element_name(s, e) for s, e in zip(x, a)]}
        report.add("positively-closed", model=M.label(), verdict=pc.closed, counterexample=cex)
        report.verdicts[f"positively-closed[{M.label()}]"] = f"{pc.closed} (relative to n_max={args.nmax})"
    sc = typespace.semantic_completeness_analysis(cat)
    report.add("semantic-completeness", weakly_boolean=sc.weakly_boolean, two_valued=sc.two_valued,
               pairwise_equivalent=sc.pairwise_equivalent)
    report.notes.append(sc.note)
    report.notes.append(f"every verdict is relative to contexts of length <= {args.nmax}")


def cmd_posetal_import(args, report: Report):
    K = _load_lattice(args.lattice)
    member = _int_list(args.prime)
    try:
        res = invariant.posetal_import(K, member, args.max_lattice)
    except dlat.NotPrimeError as exc:
        raise InputError(str(exc)) from exc
    Q = res.quotient.lattice
    report.add("import", elements=K.n, prime=sorted(res.prime), models=len(res.cat.family))
    report.add("lm", classes=len(res.lm), quotient=Q.n, iso=res.iso)
    report.verdicts["lm-isomorphic-to-quotient"] = res.ok
    if not res.ok:
        raise invariant.OracleDisagreement("LM differs from the quotient by the prime filter")


def _parse_family(specs, M: FinModel) -> subfunctor.SortSubsetFamily:
    subsets = {s: frozenset(range(M.size(s))) for s in M.sig.sorts}
    for spec in specs or []:
        if "=" not in spec:
            raise InputError(f"expected SORT=e1,e2,..., got {spec!r}")
        sort, rest = spec.split("=", 1)
        if sort not in subsets:
            raise InputError(f"unknown sort {sort!r}")
        names = [t for t in rest.replace(",", " ").split()]
        idx = []
        for nm in names:
            if nm not in M.carriers[sort]:
                raise InputError(f"{nm!r} is not an element of {sort}")
            idx.append(M.carriers[sort].index(nm))
        subsets[sort] = frozenset(idx)
    return subfunctor.SortSubsetFamily(subsets)


def cmd_tv(args, report: Report):
    theory = _load_theory(args.theory)
    models = _load_models([args.model], theory.signature)
    _check_axioms(theory, models, report)
    M = models[0]
    fam = _parse_family(args.subset, M)
    cat = SemCat([M], args.nmax, args.max_lattice)
    r = subfunctor.tv_check(cat, 0, fam)
    viol = None
    if r.violation is not None:
        phi, x, k, t = r.violation
        viol = {"set": cat.witness_text(phi), "sorts": list(x), "cut": k, "tuple": list(t)}
    report.add("family", subsets={s: sorted(v) for s, v in fam.subsets.items()})
    report.add("tarski-vaught", verdict=r.holds, violation=viol)
    ext = subfunctor.tv_extend(cat, 0, fam, check=False)
    rep = subfunctor.verify_subfunctor(cat, 0, ext)
    report.add("extension", verified=rep.ok, failure=None if rep.ok else str(rep.failure[0]))
    if rep.ok != r.holds:
        raise invariant.OracleDisagreement("test verdict and extension verification disagree")
    pcs = subfunctor.poscl_subfunctor_check(cat, 0, fam)
    report.add("positively-closed-extension", verdict=pcs.holds)
    report.verdicts["tarski-vaught"] = f"{r.holds} (relative to n_max={args.nmax})"


def cmd_redprod(args, report: Report):
    theory = _load_theory(args.theory)
    models = _load_models(args.models, theory.signature)
    _check_axioms(theory, models, report)
    n = len(models)
    gens = [_int_list(g) for g in (args.filter or [])] or [list(range(n))]
    try:
        F = redprod.IndexFilter.generated(n, gens)
    except redprod.FilterError as exc:
        raise InputError(str(exc)) from exc
    report.notes.append("finite index set: every filter is principal, so the reduced product "
                        "collapses to the product over the core; the colimit is built anyway")
    rp = redprod.reduced_product(models, F)
    report.add("filter", members=len(F.members), core=sorted(F.core), ultra=F.ultra)
    report.add("reduced-product", sizes={s: rp.model.size(s) for s in rp.model.sig.sorts},
               core_product_iso=True)
    from .syntax import Rel, Var
    for r, ar in theory.signature.relations.items():
        ctx = [(f"x{k}", s) for k, s in enumerate(ar)]
        atom = Rel(r, tuple(Var(v, s) for v, s in ctx))
        if not redprod.los_formula_check(rp, atom, ctx):
            raise invariant.OracleDisagreement(f"relation {r}: colimit and index-wise evaluation differ")
    report.add("los-atoms", checked=len(theory.signature.relations), agree=True)
    if F.ultra:
        d = redprod.diagonal_map(models[0], n, F, min(args.nmax, 2))
        report.add("diagonal", model=models[0].label(), injective=d.injective, elementary=d.elementary)


def cmd_dlat(args, report: Report):
    L = _load_lattice(args.lattice)
    if args.action == "spec":
        if L.n < 2:
            report.add("spec", points=0)
            return
        S = dlat.spec(L)
        report.add("spec", points=len(S.points),
                   generators=[p.generator for p in S.points],
                   specialization=[[i, j] for i in range(len(S.points)) for j in range(len(S.points))
                                   if i != j and S.specialization[i][j]])
    elif args.action == "krull":
        a = dlat.krull_dim_chains(L)
        if a is None:
            report.add("krull", dim="undefined")
            return
        b = dlat.krull_dim_algebraic(L).dim
        if a != b:
            raise invariant.OracleDisagreement(f"chain dimension {a} but algebraic dimension {b}")
        report.add("krull", dim=a)
    else:
        if args.prime is None:
            raise InputError("quotient needs --prime")
        try:
            Q = dlat.quotient_by_prime(L, _int_list(args.prime))
        except dlat.NotPrimeError as exc:
            raise InputError(str(exc)) from exc
        report.add("quotient", size=Q.lattice.n, classes=list(Q.qmap),
                   covers=[list(c) for c in sorted(Q.lattice.covers())])


# ---------------------------------------------------------------------------
# entry point


def _default_nmax() -> int:
    raw = os.environ.get("POSMODEL_NMAX")
    if raw is None:
        return 3
    try:
        return int(raw)
    except ValueError:
        return 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="posmodel", description="Finite positive model theory workbench.")
    p.add_argument("--nmax", type=int, default=None, help="longest context (default 3, or $POSMODEL_NMAX)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-lattice", type=int, default=4096)
    p.add_argument("--structured", action="store_true", help="JSON report")
    sub = p.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="saturate a family and report every invariant")
    a.add_argument("theory")
    a.add_argument("models", nargs="+")

    pi = sub.add_parser("posetal-import", help="load a lattice as sentences and compare LM with K/p")
    pi.add_argument("lattice")
    pi.add_argument("--prime", required=True, help="members of the prime filter, e.g. '2,3'")

    t = sub.add_parser("tv", help="Tarski-Vaught test for per-sort subsets")
    t.add_argument("theory")
    t.add_argument("model")
    t.add_argument("--subset", action="append", help="SORT=e1,e2 (unlisted sorts keep every element)")

    r = sub.add_parser("redprod", help="reduced product over a filter on the model list")
    r.add_argument("theory")
    r.add_argument("models", nargs="+")
    r.add_argument("--filter", action="append", help="generator subset of indices, e.g. '0,2'")

    d = sub.add_parser("dlat", help="lattice utilities")
    d.add_argument("action", choices=["spec", "krull", "quotient"])
    d.add_argument("lattice")
    d.add_argument("--prime", default=None)
    return p


COMMANDS = {
    "analyze": cmd_analyze,
    "posetal-import": cmd_posetal_import,
    "tv": cmd_tv,
    "redprod": cmd_redprod,
    "dlat": cmd_dlat,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    if args.nmax is None:
        args.nmax = _default_nmax()
    report = Report(["posmodel"] + argv, {"n_max": args.nmax, "seed": args.seed,
                                          "max_lattice": args.max_lattice})
    code = EXIT_OK
    try:
        COMMANDS[args.cmd](args, report)
    except InputError as exc:
        report.notes.append(f"input error: {exc}")
        code = EXIT_PARSE
    except AxiomFailure:
        code = EXIT_AXIOM
    except (invariant.OracleDisagreement, redprod.LosDisagreement, AssertionError) as exc:
        report.notes.append(f"oracle disagreement: {exc}")
        code = EXIT_ORACLE
    report.verdicts["exit"] = code
    out.write(report.render(args.structured))
    return code


if __name__ == "__main__":
    sys.exit(main())
