"""Filters on finite index sets and reduced products built as colimits.

On a finite index set every filter is principal, so a reduced product is
always the plain product over the filter's core.  The colimit is still
built the long way (eventual-equality classes of partial tuples) and
compared with that shortcut; the comparison is the point of the exercise.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .model import FinModel, Homomorphism, eval_formula, is_elementary_hom, is_homomorphism
from .semcat import SemCat


class FilterError(ValueError):
    pass


class LosDisagreement(AssertionError):
    pass


def _subsets(n):
    for k in range(n + 1):
        for c in combinations(range(n), k):
            yield frozenset(c)


@dataclass(frozen=True)
class IndexFilter:
    n: int
    members: frozenset  # of frozensets of indices

    @classmethod
    def generated(cls, n: int, generators) -> "IndexFilter":
        """Least filter containing ``generators``: everything above their intersection."""
        full = frozenset(range(n))
        core = full
        for g in generators:
            g = frozenset(g)
            if not g <= full:
                raise FilterError(f"generator {sorted(g)} leaves the index set")
            core &= g
        if not core:
            raise FilterError("generators meet in the empty set: not a proper filter")
        return cls(n, frozenset(J for J in _subsets(n) if core <= J))

    @classmethod
    def principal(cls, n: int, core) -> "IndexFilter":
        return cls.generated(n, [core])

    def __post_init__(self):
        full = frozenset(range(self.n))
        if self.n < 1:
            raise FilterError("index set is empty")
        if full not in self.members:
            raise FilterError("filter must contain the index set")
        if frozenset() in self.members:
            raise FilterError("filter contains the empty set")
        for J in self.members:
            if not J <= full:
                raise FilterError(f"member {sorted(J)} leaves the index set")
            for K in _subsets(self.n):
                if J <= K and K not in self.members:
                    raise FilterError(f"not upward closed at {sorted(J)}")
        for J, K in combinations(self.members, 2):
            if J & K not in self.members:
                raise FilterError(f"not closed under intersection at {sorted(J)}, {sorted(K)}")

    def __contains__(self, J) -> bool:
        return frozenset(J) in self.members

    @property
    def core(self) -> frozenset:
        c = frozenset(range(self.n))
        for J in self.members:
            c &= J
        if c not in self.members:
            raise FilterError("filter on a finite set without a least member")
        return c

    @property
    def ultra(self) -> bool:
        return all(J in self.members or (frozenset(range(self.n)) - J) in self.members
                   for J in _subsets(self.n))


@dataclass
class ReducedProduct:
    models: list
    filter: IndexFilter
    classes: dict  # sort -> list of canonical (J, tuple)
    class_of: dict  # (sort, J, tuple) -> class index
    model: FinModel  # the colimit as a finite model
    shortcut: FinModel  # product over the core
    iso: dict  # sort -> tuple: colimit class -> shortcut element

    def element(self, sort, J, tup) -> int:
        return self.class_of[(sort, frozenset(J), tuple(tup))]


def _restrict(J, tup, K):
    """Restriction of a tuple indexed by sorted ``J`` to ``K``."""
    pos = {i: k for k, i in enumerate(sorted(J))}
    return tuple(tup[pos[i]] for i in sorted(K))


def _product_model(models, idx, sig, name):
    idx = sorted(idx)
    carriers = {s: tuple("(" + ",".join(models[i].element_name(s, e) for i, e in zip(idx, t)) + ")"
                         for t in product(*[range(models[i].size(s)) for i in idx]))
                for s in sig.sorts}
    index = {s: {t: k for k, t in enumerate(product(*[range(models[i].size(s)) for i in idx]))}
             for s in sig.sorts}
    rels = {}
    for r, ar in sig.relations.items():
        out = set()
        for tup in product(*[index[s] for s in ar]):
            if all(tuple(c[k] for c in tup) in models[i].rels[r] for k, i in enumerate(idx)):
                out.add(tuple(index[s][c] for s, c in zip(ar, tup)))
        rels[r] = frozenset(out)
    funcs = {}
    for f, (dom, cod) in sig.functions.items():
        table = {}
        for tup in product(*[index[s] for s in dom]):
            val = tuple(models[i].funcs[f][tuple(c[k] for c in tup)] for k, i in enumerate(idx))
            table[tuple(index[s][c] for s, c in zip(dom, tup))] = index[cod][val]
        funcs[f] = table
    return FinModel(sig, carriers, rels, funcs, name), index


def reduced_product(models: list, F: IndexFilter, name: str | None = None) -> ReducedProduct:
    if len(models) != F.n:
        raise FilterError(f"{len(models)} models for an index set of size {F.n}")
    sig = models[0].sig
    if any(M.signature_key() != models[0].signature_key() for M in models):
        raise ValueError("models have different signatures")
    members = sorted(F.members, key=lambda J: (len(J), sorted(J)))
    classes, class_of = {}, {}
    for s in sig.sorts:
        elems = [(J, t) for J in members for t in product(*[range(models[i].size(s)) for i in sorted(J)])]
        parent = list(range(len(elems)))

        def find(k):
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        seen = {}
        for k, (J, t) in enumerate(elems):
            for K in members:
                if K <= J:
                    key = (K, _restrict(J, t, K))
                    if key in seen:
                        a, b = find(k), find(seen[key])
                        if a != b:
                            parent[max(a, b)] = min(a, b)
                    else:
                        seen[key] = k
        groups = {}
        for k in range(len(elems)):
            groups.setdefault(find(k), []).append(elems[k])
        reps = []
        for g in groups.values():
            reps.append(min(g, key=lambda e: (len(e[0]), sorted(e[0]), e[1])))
        reps.sort(key=lambda e: (sorted(e[0]), e[1]))
        rep_index = {r: c for c, r in enumerate(reps)}
        for g in groups.values():
            c = rep_index[min(g, key=lambda e: (len(e[0]), sorted(e[0]), e[1]))]
            for J, t in g:
                class_of[(s, J, t)] = c
        classes[s] = reps

    def common(reps_):
        J = frozenset(range(F.n))
        for K, _ in reps_:
            J &= K
        return J

    members_of = {}
    for (s, J, t), c in class_of.items():
        members_of.setdefault((s, c), []).append((J, t))
    rels = {}
    for r, ar in sig.relations.items():
        out = set()
        for combo in product(*[range(len(classes[s])) for s in ar]):
            reps_ = [classes[s][k] for s, k in zip(ar, combo)]
            v = _holds_eventually(models, F, r, reps_)
            # swapping one representative at a time reaches every choice
            for pos, (s, k) in enumerate(zip(ar, combo)):
                for alt in members_of[(s, k)]:
                    if _holds_eventually(models, F, r, reps_[:pos] + [alt] + reps_[pos + 1:]) != v:
                        raise FilterError(f"relation {r} not well defined on classes {combo}")
            if v:
                out.add(combo)
        rels[r] = frozenset(out)
    funcs = {}
    for f, (dom, cod) in sig.functions.items():
        table = {}
        for combo in product(*[range(len(classes[s])) for s in dom]):
            reps_ = [classes[s][k] for s, k in zip(dom, combo)]
            J = common(reps_)
            if J not in F:
                raise FilterError("representatives do not share a filter member")
            val = tuple(models[i].funcs[f][tuple(_restrict(K, t, {i})[0] for K, t in reps_)] for i in sorted(J))
            table[combo] = class_of[(cod, J, val)]
        funcs[f] = table
    carriers = {s: tuple(f"[{''.join(map(str, sorted(J)))}:{','.join(map(str, t))}]" for J, t in classes[s])
                for s in sig.sorts}
    colim = FinModel(sig, carriers, rels, funcs, name or "reduced")
    core = F.core
    short, index = _product_model(models, core, sig, "core-product")
    iso = {s: tuple(index[s][_restrict(J, t, core)] for J, t in classes[s]) for s in sig.sorts}
    for s in sig.sorts:
        if sorted(iso[s]) != list(range(short.size(s))):
            raise FilterError(f"restriction to the core is not a bijection on sort {s}")
    inv = {s: tuple(sorted(range(len(iso[s])), key=lambda k: iso[s][k])) for s in sig.sorts}
    if not (is_homomorphism(colim, short, iso) and is_homomorphism(short, colim, inv)):
        raise FilterError("restriction to the core is not an isomorphism of structures")
    return ReducedProduct(models, F, classes, class_of, colim, short, iso)


def _holds_eventually(models, F, r, reps_) -> bool:
    J = frozenset(range(F.n))
    for K, _ in reps_:
        J &= K
    if J not in F:
        return False
    good = frozenset(i for i in J
                     if tuple(_restrict(K, t, {i})[0] for K, t in reps_) in models[i].rels[r])
    return good in F


def los_formula_check(rp: ReducedProduct, f, ctx) -> bool:
    """Evaluation in the colimit agrees with the set of tuples whose per-index
    components satisfy ``f`` on a filter member."""
    ctx = tuple(ctx)
    sorts = tuple(s for _, s in ctx)
    direct = eval_formula(rp.model, f, ctx)
    per = [eval_formula(M, f, ctx) for M in rp.models]
    expected = set()
    for combo in rp.model.tuples(sorts):
        reps_ = [rp.classes[s][k] for s, k in zip(sorts, combo)]
        J = frozenset(range(rp.filter.n))
        for K, _ in reps_:
            J &= K
        good = frozenset(i for i in J if tuple(_restrict(K, t, {i})[0] for K, t in reps_) in per[i])
        if good in rp.filter:
            expected.add(combo)
    return direct == frozenset(expected)


def los_containment(models: list, F: IndexFilter, x, A: list, B: list) -> bool:
    """``prod A_i / F <= prod B_i / F`` computed in the reduced product,
    against ``{i : A_i <= B_i} in F``.  ``A[i]``, ``B[i]`` are sets of tuples
    of ``models[i]`` over the context ``x``."""
    if not F.ultra:
        raise FilterError("containment criterion needs an ultrafilter")
    x = tuple(x)
    rp = reduced_product(models, F)

    def inside(S, combo):
        reps_ = [rp.classes[s][k] for s, k in zip(x, combo)]
        J = frozenset(range(F.n))
        for K, _ in reps_:
            J &= K
        good = frozenset(i for i in J if tuple(_restrict(K, t, {i})[0] for K, t in reps_) in S[i])
        return good in F

    lhs = all(inside(B, c) for c in rp.model.tuples(x) if inside(A, c))
    rhs = frozenset(i for i in range(F.n) if set(A[i]) <= set(B[i])) in F
    if lhs != rhs:
        raise LosDisagreement(f"reduced product says {lhs}, index sets say {rhs}")
    return lhs


@dataclass
class DiagonalResult:
    hom: Homomorphism
    injective: bool
    elementary: bool
    power: ReducedProduct


def diagonal_map(M: FinModel, n: int, F: IndexFilter, n_max: int = 2) -> DiagonalResult:
    """``M -> M^I / F`` sending ``a`` to the class of the constant tuple."""
    if not F.ultra:
        raise FilterError("diagonal elementarity is stated for ultrafilters")
    rp = reduced_product([M] * n, F)
    full = frozenset(range(n))
    maps = {s: tuple(rp.element(s, full, (a,) * n) for a in range(M.size(s))) for s in M.sig.sorts}
    if not is_homomorphism(M, rp.model, maps):
        raise AssertionError("diagonal is not a homomorphism")
    h = Homomorphism(M, rp.model, maps)
    cat = SemCat([M, rp.model], n_max)
    el = is_elementary_hom(h, cat, 0, 1)
    if not el.elementary:
        raise AssertionError(f"diagonal not elementary at {el.context}")
    return DiagonalResult(h, h.is_injective(), el.elementary, rp)
