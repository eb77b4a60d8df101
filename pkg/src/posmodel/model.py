"""Finite multi-sorted models: evaluation, sequent checking, products,
homomorphism enumeration and elementarity."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .syntax import (And, App, Bot, Eq, Exists, Or, Rel, Sequent, Signature, Top, Var)


@dataclass(eq=False)
class FinModel:
    sig: Signature
    carriers: dict  # sort -> tuple of element names
    rels: dict  # name -> frozenset of index tuples
    funcs: dict  # name -> {index tuple: index}
    name: str | None = None

    def __post_init__(self):
        for s in self.sig.sorts:
            if s not in self.carriers:
                raise ValueError(f"missing carrier for sort {s}")
        for r, ar in self.sig.relations.items():
            for t in self.rels.get(r, ()):
                if len(t) != len(ar) or any(not 0 <= e < self.size(s) for e, s in zip(t, ar)):
                    raise ValueError(f"tuple {t} of {r} outside carriers")
            self.rels.setdefault(r, frozenset())
        for f, (dom, cod) in self.sig.functions.items():
            table = self.funcs.get(f)
            if table is None:
                raise ValueError(f"missing table for {f}")
            keys = set(product(*[range(self.size(s)) for s in dom]))
            if set(table) != keys:
                raise ValueError(f"table of {f} is not total")
            if any(not 0 <= v < self.size(cod) for v in table.values()):
                raise ValueError(f"table of {f} leaves the carrier of {cod}")

    def size(self, sort: str) -> int:
        return len(self.carriers[sort])

    def tuples(self, sorts) -> list[tuple]:
        return list(product(*[range(self.size(s)) for s in sorts]))

    def label(self) -> str:
        return self.name or "model"

    def element_name(self, sort: str, i: int) -> str:
        return self.carriers[sort][i]

    def signature_key(self):
        sig = self.sig
        return (tuple(sig.sorts), tuple(sig.relations.items()), tuple(sig.functions.items()))


def make_model(sig: Signature, sizes: dict, rels: dict | None = None, funcs: dict | None = None,
               name: str | None = None) -> FinModel:
    """Model with elements named ``0..k-1`` per sort."""
    carriers = {s: tuple(str(i) for i in range(sizes[s])) for s in sig.sorts}
    rels = {r: frozenset(map(tuple, (rels or {}).get(r, ()))) for r in sig.relations}
    return FinModel(sig, carriers, rels, dict(funcs or {}), name)


# ---------------------------------------------------------------------------
# evaluation


def eval_term(M: FinModel, t, env: dict) -> int:
    if isinstance(t, Var):
        return env[t.name]
    return M.funcs[t.fn][tuple(eval_term(M, a, env) for a in t.args)]


def eval_formula(M: FinModel, f, ctx) -> frozenset:
    """Tuples of the context's carrier product satisfying ``f``.

    ``ctx`` is a sequence of ``(variable, sort)`` pairs.  Subformulas are
    evaluated as relations over their own free variables and joined, so
    bound variables never inflate the working set.
    """
    ctx = tuple(ctx)
    sorts = dict(ctx)
    names, rows = _ev(M, f, sorts)
    return frozenset(_extend(M, names, rows, ctx))


def _extend(M, names, rows, ctx):
    pos = {v: k for k, v in enumerate(names)}
    free = [(v, s) for v, s in ctx if v not in pos]
    out = set()
    for row in rows:
        for extra in product(*[range(M.size(s)) for _, s in free]):
            env = dict(zip([v for v, _ in free], extra))
            out.add(tuple(row[pos[v]] if v in pos else env[v] for v, _ in ctx))
    return out


def _atom_vars(f):
    seen: dict = {}

    def walk(t):
        if isinstance(t, Var):
            seen.setdefault(t.name, t.sort)
        else:
            for a in t.args:
                walk(a)

    if isinstance(f, Eq):
        walk(f.left)
        walk(f.right)
    else:
        for a in f.args:
            walk(a)
    return list(seen.items())


def _align(M, names, rows, target, sorts):
    """Cylindrify a relation on ``names`` to the variable list ``target``."""
    if list(names) == list(target):
        return set(rows)
    pos = {v: k for k, v in enumerate(names)}
    extra = [v for v in target if v not in pos]
    out = set()
    for row in rows:
        for ext in product(*[range(M.size(sorts[v])) for v in extra]):
            env = dict(zip(extra, ext))
            out.add(tuple(row[pos[v]] if v in pos else env[v] for v in target))
    return out


def _ev(M, f, sorts):
    if isinstance(f, Top):
        return (), {()}
    if isinstance(f, Bot):
        return (), set()
    if isinstance(f, (Eq, Rel)):
        vs = _atom_vars(f)
        names = tuple(v for v, _ in vs)
        rows = set()
        for tup in product(*[range(M.size(s)) for _, s in vs]):
            env = dict(zip(names, tup))
            if isinstance(f, Eq):
                if eval_term(M, f.left, env) == eval_term(M, f.right, env):
                    rows.add(tup)
            elif tuple(eval_term(M, a, env) for a in f.args) in M.rels[f.name]:
                rows.add(tup)
        return names, rows
    if isinstance(f, (And, Or)):
        n1, r1 = _ev(M, f.left, sorts)
        n2, r2 = _ev(M, f.right, sorts)
        names = tuple(dict.fromkeys(n1 + n2))
        if isinstance(f, Or):
            return names, _align(M, n1, r1, names, sorts) | _align(M, n2, r2, names, sorts)
        p2 = {v: k for k, v in enumerate(n2)}
        shared = [v for v in n1 if v in p2]
        only2 = [k for k, v in enumerate(n2) if v not in set(n1)]
        index: dict = {}
        for row in r2:
            index.setdefault(tuple(row[p2[v]] for v in shared), []).append(row)
        p1 = {v: k for k, v in enumerate(n1)}
        out = set()
        for row in r1:
            for other in index.get(tuple(row[p1[v]] for v in shared), ()):
                out.add(row + tuple(other[k] for k in only2))
        return names, out
    if isinstance(f, Exists):
        inner = dict(sorts)
        inner[f.var] = f.sort
        names, rows = _ev(M, f.body, inner)
        if f.var not in names:
            return (names, rows) if M.size(f.sort) else (names, set())
        k = names.index(f.var)
        return names[:k] + names[k + 1:], {row[:k] + row[k + 1:] for row in rows}
    raise TypeError(f"not a positive-existential formula: {f!r}")


@dataclass(frozen=True)
class SequentCheck:
    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds


def check_sequent(M: FinModel, s: Sequent) -> SequentCheck:
    bad = eval_formula(M, s.lhs, s.context) - eval_formula(M, s.rhs, s.context)
    if not bad:
        return SequentCheck(True)
    return SequentCheck(False, min(bad))


def check_theory(M: FinModel, axioms) -> list[tuple[int, tuple]]:
    """Failing axioms as ``(axiom index, witness tuple)``."""
    out = []
    for k, ax in enumerate(axioms):
        r = check_sequent(M, ax)
        if not r.holds:
            out.append((k, r.witness))
    return out


# ---------------------------------------------------------------------------
# products


def model_product(M: FinModel, N: FinModel, name: str | None = None) -> FinModel:
    """Pointwise product.  The pair ``(i, j)`` gets index ``i * |N_s| + j``."""
    if M.signature_key() != N.signature_key():
        raise ValueError("models have different signatures")
    sig = M.sig
    carriers = {s: tuple(f"p{i}_{j}" for i, j in product(range(M.size(s)), range(N.size(s))))
                for s in sig.sorts}

    def enc(sort, i, j):
        return i * N.size(sort) + j

    rels = {}
    for r, ar in sig.relations.items():
        rels[r] = frozenset(tuple(enc(s, a, b) for s, a, b in zip(ar, ta, tb))
                            for ta in M.rels[r] for tb in N.rels[r])
    funcs = {}
    for f, (dom, cod) in sig.functions.items():
        table = {}
        for ka in M.funcs[f]:
            for kb in N.funcs[f]:
                key = tuple(enc(s, a, b) for s, a, b in zip(dom, ka, kb))
                table[key] = enc(cod, M.funcs[f][ka], N.funcs[f][kb])
        funcs[f] = table
    label = name or f"{M.label()}*{N.label()}"
    return FinModel(sig, carriers, rels, funcs, label)


def product_projections(M: FinModel, N: FinModel, P: FinModel):
    """The two projection homomorphisms out of ``P = model_product(M, N)``."""
    p1 = {s: tuple(k // N.size(s) for k in range(P.size(s))) for s in M.sig.sorts}
    p2 = {s: tuple(k % N.size(s) for k in range(P.size(s))) for s in M.sig.sorts}
    return Homomorphism(P, M, p1), Homomorphism(P, N, p2)


def terminal_model(sig: Signature) -> FinModel:
    """One element per sort, every relation full."""
    return make_model(sig, {s: 1 for s in sig.sorts},
                      {r: [(0,) * len(ar)] for r, ar in sig.relations.items()},
                      {f: {(0,) * len(dom): 0} for f, (dom, _) in sig.functions.items()}, name="one")


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class Homomorphism:
    source: FinModel
    target: FinModel
    maps: dict  # sort -> tuple

    def __call__(self, sort: str, i: int) -> int:
        return self.maps[sort][i]

    def on_tuple(self, sorts, tup) -> tuple:
        return tuple(self.maps[s][e] for s, e in zip(sorts, tup))

    def key(self):
        return tuple(self.maps[s] for s in self.source.sig.sorts)

    def __eq__(self, other):
        return isinstance(other, Homomorphism) and self.source is other.source and \
            self.target is other.target and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_injective(self) -> bool:
        return all(len(set(m)) == len(m) for m in self.maps.values())


def is_homomorphism(M: FinModel, N: FinModel, maps: dict) -> bool:
    sig = M.sig
    for r, ar in sig.relations.items():
        for t in M.rels[r]:
            if tuple(maps[s][e] for s, e in zip(ar, t)) not in N.rels[r]:
                return False
    for f, (dom, cod) in sig.functions.items():
        for key, v in M.funcs[f].items():
            if N.funcs[f][tuple(maps[s][e] for s, e in zip(dom, key))] != maps[cod][v]:
                return False
    return True


@dataclass
class HomList:
    homs: list
    truncated: bool = False

    def __iter__(self):
        return iter(self.homs)

    def __len__(self):
        return len(self.homs)


def enumerate_homomorphisms(M: FinModel, N: FinModel, cap: int | None = 10000,
                            require=None) -> HomList:
    """All homomorphisms ``M -> N`` by backtracking (sorts in declaration
    order, elements ascending).  ``require`` optionally pins some values:
    ``{(sort, i): j}``."""
    if M.signature_key() != N.signature_key():
        raise ValueError("models have different signatures")
    sig = M.sig
    order = [(s, i) for s in sig.sorts for i in range(M.size(s))]
    slot = {v: k for k, v in enumerate(order)}
    checks: list[list] = [[] for _ in order]
    for r, ar in sig.relations.items():
        for t in M.rels[r]:
            last = max((slot[(s, e)] for s, e in zip(ar, t)), default=-1)
            if last >= 0:
                checks[last].append(("rel", r, ar, t))
    for f, (dom, cod) in sig.functions.items():
        for key, v in M.funcs[f].items():
            last = max([slot[(s, e)] for s, e in zip(dom, key)] + [slot[(cod, v)]])
            checks[last].append(("fun", f, dom, key, cod, v))
    maps = {s: [-1] * M.size(s) for s in sig.sorts}
    out: list = []
    truncated = False
    require = require or {}

    def ok(k):
        for c in checks[k]:
            if c[0] == "rel":
                _, r, ar, t = c
                if tuple(maps[s][e] for s, e in zip(ar, t)) not in N.rels[r]:
                    return False
            else:
                _, f, dom, key, cod, v = c
                if N.funcs[f][tuple(maps[s][e] for s, e in zip(dom, key))] != maps[cod][v]:
                    return False
        return True

    def rec(k):
        nonlocal truncated
        if truncated:
            return
        if k == len(order):
            if cap is not None and len(out) >= cap:
                truncated = True
                return
            out.append(Homomorphism(M, N, {s: tuple(m) for s, m in maps.items()}))
            return
        s, i = order[k]
        choices = [require[(s, i)]] if (s, i) in require else range(N.size(s))
        for j in choices:
            maps[s][i] = j
            if ok(k):
                rec(k + 1)
            if truncated:
                break
        maps[s][i] = -1

    rec(0)
    return HomList(out, truncated)


@dataclass(frozen=True)
class ElementarityResult:
    elementary: bool
    context: tuple | None = None
    defset: object = None
    injective: bool | None = None

    def __bool__(self):
        return self.elementary


def is_elementary_hom(h: Homomorphism, C, src: int | None = None, dst: int | None = None) -> ElementarityResult:
    """Check that ``h`` reflects every stored definable set of ``C``.

    ``src``/``dst`` are the family indices of the source and target; found by
    identity when omitted.  Every principal definable set is checked, which
    covers the whole lattice since preimages preserve unions.
    """
    if src is None:
        src = C.index_of(h.source)
    if dst is None:
        dst = C.index_of(h.target)
    for x in C.contexts:
        pmap = C.tuple_map(x, src, dst, h)
        for d in C.principal_sets(x):
            a = C.component(d, src)
            pre = 0
            for k, img in enumerate(pmap):
                if d.mask >> img & 1:
                    pre |= 1 << k
            if pre != a:
                return ElementarityResult(False, x, d)
    inj = h.is_injective()
    if C.n_max >= 2 and not inj:
        raise AssertionError("elementary homomorphism with a non-injective component")
    return ElementarityResult(True, injective=inj)
