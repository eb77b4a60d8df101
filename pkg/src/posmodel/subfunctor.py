"""Sort-indexed subsets of a model: the Tarski-Vaught test and its extension."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .dlat import _bits
from .invariant import is_positively_closed_direct
from .semcat import CoordMap, DefSet, SemCat


@dataclass(frozen=True)
class SortSubsetFamily:
    subsets: dict  # sort -> frozenset of element indices

    @classmethod
    def full(cls, M):
        return cls({s: frozenset(range(M.size(s))) for s in M.sig.sorts})

    @classmethod
    def empty(cls, M):
        return cls({s: frozenset() for s in M.sig.sorts})

    def tuples(self, x) -> list[tuple]:
        return list(product(*[sorted(self.subsets[s]) for s in x]))

    def contains(self, x, tup) -> bool:
        return all(e in self.subsets[s] for s, e in zip(x, tup))

    def validate(self, M):
        for s, sub in self.subsets.items():
            if s not in M.sig.sorts:
                raise ValueError(f"unknown sort {s}")
            bad = [e for e in sub if not 0 <= e < M.size(s)]
            if bad:
                raise ValueError(f"elements {bad} outside the carrier of {s}")


def _ev(cat: SemCat, i: int, d: DefSet) -> frozenset:
    return cat.component_set(d, i)


def _splits(x, include_sentences: bool):
    """``(prefix, suffix)`` cuts with a nonempty prefix."""
    for k in range(1, len(x) + 1):
        if k == len(x) and not include_sentences:
            continue
        yield k


@dataclass(frozen=True)
class TVResult:
    holds: bool
    violation: tuple | None = None  # (phi, context, prefix length, tuple)

    def __bool__(self):
        return self.holds


def tv_check(cat: SemCat, i: int, fam: SortSubsetFamily, include_sentences: bool = True) -> TVResult:
    """For each stored ``phi`` at ``x = s * s'`` with ``s`` nonempty, the
    ``N``-tuples of ``s'`` with a witness in ``M`` must have one in ``N``.

    Cutting off all of ``x`` (``s'`` empty) asks that a sentence true
    through ``M`` stays true through ``N``; ``include_sentences=False``
    skips those cuts.  Principal sets suffice: both sides commute with unions.
    """
    M = cat.family[i]
    fam.validate(M)
    for x in cat.contexts:
        if not x:
            continue
        for phi in cat.principal_sets(x):
            ev = _ev(cat, i, phi)
            for k in _splits(x, include_sentences):
                rest = x[k:]
                p = {t[k:] for t in ev if fam.contains(rest, t[k:])}
                q = {t[k:] for t in ev if fam.contains(x, t)}
                if p != q:
                    bad = min(p - q)
                    return TVResult(False, (phi, x, k, bad))
    return TVResult(True)


@dataclass
class SubfunctorExtension:
    cat: SemCat
    member: int
    fam: SortSubsetFamily
    tables: dict = field(default_factory=dict)  # DefSet -> frozenset of tuples
    notes: list = field(default_factory=list)

    def obj(self, x) -> frozenset:
        return frozenset(self.fam.tuples(tuple(x)))

    def sub(self, d: DefSet) -> frozenset:
        t = self.tables.get(d)
        if t is None:
            t = self.obj(d.context) & _ev(self.cat, self.member, d)
        return t

    # the extension viewed as a model handle
    def size(self, sort):
        return self.cat.family[self.member].size(sort)

    def tuples(self, x):
        return self.fam.tuples(x)

    def psi(self, x, tup):
        return self.cat.up[tuple(x)][self.cat.point(x, self.member, tup)]

    def element_name(self, sort, e):
        return self.cat.family[self.member].element_name(sort, e)


def tv_extend(cat: SemCat, i: int, fam: SortSubsetFamily, table_limit: int = 256,
              check: bool = True) -> SubfunctorExtension:
    """``N(u) = N(x) & M(u)`` with ``N(x)`` the product of the chosen subsets."""
    if check:
        r = tv_check(cat, i, fam)
        if not r.holds:
            raise ValueError(f"family fails the Tarski-Vaught test at {r.violation[1]}")
    ext = SubfunctorExtension(cat, i, fam)
    for x in cat.contexts:
        n = cat.lattice_size(x, table_limit)
        sets = cat.elements(x) if n is not None else cat.principal_sets(x) + [cat.top(x), cat.bot(x)]
        if n is None:
            ext.notes.append(f"context {x}: tables kept for principal sets only")
        objx = ext.obj(x)
        for d in sets:
            ext.tables[d] = objx & _ev(cat, i, d)
    return ext


@dataclass(frozen=True)
class SubfunctorReport:
    ok: bool
    failure: tuple | None = None  # (check, detail)

    def __bool__(self):
        return self.ok


def verify_subfunctor(cat: SemCat, i: int, ext: SubfunctorExtension) -> SubfunctorReport:
    """Lattice laws, images along every coordinate subset, and the pullback
    square ``N(u) = N(x) & M(u)``, all read from the stored tables."""
    by_ctx: dict = {}
    for d in ext.tables:
        by_ctx.setdefault(d.context, []).append(d)
    for x, sets in by_ctx.items():
        objx = ext.obj(x)
        if ext.sub(cat.top(x)) != objx:
            return SubfunctorReport(False, ("lattice", f"N(top) differs from N(x) at {x}"))
        if ext.sub(cat.bot(x)):
            return SubfunctorReport(False, ("lattice", f"N(bottom) nonempty at {x}"))
        for a in sets:
            for b in sets:
                if ext.sub(a & b) != ext.sub(a) & ext.sub(b):
                    return SubfunctorReport(False, ("lattice", (a, b, "meet")))
                if ext.sub(a | b) != ext.sub(a) | ext.sub(b):
                    return SubfunctorReport(False, ("lattice", (a, b, "join")))
    for x, sets in by_ctx.items():
        n = len(x)
        for keep_bits in range(1 << n):
            keep = tuple(k for k in range(n) if keep_bits >> k & 1)
            if len(keep) == n:
                continue
            for d in sets:
                img = cat.image_along_projection(d, keep)
                proj = frozenset(tuple(t[k] for k in keep) for t in ext.sub(d))
                if ext.sub(img) != proj:
                    return SubfunctorReport(False, ("coherence", (d, keep)))
    for x, sets in by_ctx.items():
        objx = ext.obj(x)
        for d in sets:
            if ext.sub(d) != objx & _ev(cat, i, d):
                return SubfunctorReport(False, ("elementarity", d))
    return SubfunctorReport(True)


def corrupt(ext: SubfunctorExtension) -> SubfunctorExtension:
    """Copy with one tuple removed from the top set of the first context
    where ``N`` is nonempty (a negative control)."""
    bad = SubfunctorExtension(ext.cat, ext.member, ext.fam, dict(ext.tables), list(ext.notes))
    for x in ext.cat.contexts:
        top = ext.cat.top(x)
        objx = ext.obj(x)
        if x and objx:
            bad.tables[top] = objx - {min(objx)}
            return bad
    raise ValueError("nothing to corrupt: N is empty at every nonempty context")


@dataclass(frozen=True)
class PosclSubResult:
    holds: bool
    violation: tuple | None = None
    extension: SubfunctorExtension | None = None

    def __bool__(self):
        return self.holds


def poscl_subfunctor_check(cat: SemCat, i: int, fam: SortSubsetFamily) -> PosclSubResult:
    """Every ``N``-tuple of ``s'`` either has an ``N``-witness in ``phi`` or
    lies in a definable set disjoint from the projection of ``phi``.

    On success the extension is built and must verify and be positively
    closed; a failure there raises, since the condition promises both.
    """
    M = cat.family[i]
    fam.validate(M)
    for x in cat.contexts:
        for phi in cat.principal_sets(x):
            ev = _ev(cat, i, phi)
            for k in range(0, len(x) + 1):
                rest = x[k:]
                img = cat.image_along_projection(phi, tuple(range(k, len(x))))
                up = cat.up[rest]
                witnessed = {t[k:] for t in ev if fam.contains(x, t)}
                for t in fam.tuples(rest):
                    if t in witnessed:
                        continue
                    if up[cat.point(rest, i, t)] & img.mask == 0:
                        continue  # psi(t) is definable and misses the image
                    return PosclSubResult(False, (phi, x, k, t))
    ext = tv_extend(cat, i, fam, check=False)
    rep = verify_subfunctor(cat, i, ext)
    if not rep.ok:
        raise AssertionError(f"condition holds but the extension fails: {rep.failure}")
    pc = is_positively_closed_direct(cat, ext)
    if not pc.closed:
        raise AssertionError(f"condition holds but the extension is not positively closed: {pc.counterexample}")
    return PosclSubResult(True, None, ext)
