"""Type spaces: prime filters of definable-set lattices, density, realization."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .dlat import FinDistLattice, PrimeFilter, SpecSpace, _bits, spec
from .invariant import OracleDisagreement
from .semcat import CoordMap, DefSet, SemCat


class TrivialCategoryError(ValueError):
    """Every context has a single definable set, so there are no types."""


@dataclass(frozen=True)
class TypePoint:
    context: tuple
    filter: PrimeFilter
    generator: int  # least member, as a mask

    def __contains__(self, d: DefSet) -> bool:
        return d.context == self.context and self.generator & ~d.mask == 0


@dataclass
class TypeSpace:
    context: tuple
    lattice: FinDistLattice
    space: SpecSpace
    types: list

    def __len__(self):
        return len(self.types)

    def type_of_mask(self, gen: int) -> TypePoint:
        for t in self.types:
            if t.generator == gen:
                return t
        raise KeyError(gen)


def type_space(cat: SemCat, x) -> TypeSpace:
    x = tuple(x)
    L = cat.sub_lattice(x)
    if L.n < 2:
        return TypeSpace(x, L, None, [])
    S = spec(L)
    types = []
    for P in S.points:
        g = cat.info(x).full
        for k in P.member:
            g &= L.labels[k].mask
        types.append(TypePoint(x, P, g))
    return TypeSpace(x, L, S, types)


def _guard(cat: SemCat):
    if all(cat.info(x).total == 0 for x in cat.contexts):
        raise TrivialCategoryError("the category is trivial: no context has two definable sets")


@dataclass(frozen=True)
class DensityResult:
    dense: bool
    witness: DefSet | None
    maximal: bool | None = None


def somewhere_dense(cat: SemCat, x, p: TypePoint) -> DensityResult:
    """Look for ``phi != bottom`` with ``psi in p`` iff ``phi`` meets ``psi``."""
    _guard(cat)
    x = tuple(x)
    sets = cat.elements(x)
    for phi in sets:
        if phi.mask == 0:
            continue
        if all((psi in p) == bool(phi.mask & psi.mask) for psi in sets):
            maximal = _is_maximal_filter(cat, x, p, sets)
            if not maximal:
                raise OracleDisagreement(f"somewhere dense type at {x} is not a maximal filter")
            return DensityResult(True, phi, True)
    return DensityResult(False, None)


def _is_maximal_filter(cat, x, p: TypePoint, sets) -> bool:
    # a proper filter strictly above p would contain some psi outside p while
    # avoiding bottom: psi & generator is then a nonempty definable set
    for psi in sets:
        if psi not in p and psi.mask & p.generator:
            return False
    return True


@dataclass(frozen=True)
class Realization:
    status: str  # "realized-by-element" or "omitted"
    witness: tuple | None
    scanned: int


def realized_by(cat: SemCat, i: int, x, p: TypePoint) -> Realization:
    """A tuple of member ``i`` whose type is ``p``, or the full scan count."""
    x = tuple(x)
    up = cat.up[x]
    tuples = cat.member_tuples(x, i)
    for tup in tuples:
        if up[cat.point(x, i, tup)] == p.generator:
            return Realization("realized-by-element", tup, len(tuples))
    return Realization("omitted", None, len(tuples))


def disjoint_split(a: frozenset):
    """Two disjoint nonempty subsets of ``a`` when ``|a| >= 2``, else ``None``."""
    items = sorted(a)
    if len(items) < 2:
        return None
    return frozenset(items[:1]), frozenset(items[1:])


def omitted_type_table(cat: SemCat, x) -> list[tuple]:
    """Per type at ``x``: its generator and, per member, a realizing tuple or ``None``."""
    ts = type_space(cat, x)
    rows = []
    for t in ts.types:
        rows.append((t.generator, tuple(realized_by(cat, i, x, t).witness for i in range(len(cat.family)))))
    return rows


@dataclass
class ArrowReport:
    open_map: bool
    injective: bool
    surjective: bool
    mono: bool
    effective_epi: bool
    counterexamples: dict


def spec_arrow_checks(cat: SemCat, f: CoordMap) -> ArrowReport:
    """``Spec`` of pulling back along ``f``: sends a type over ``dom`` to its
    trace on ``cod``.  Openness always; injectivity when ``f`` is mono and
    surjectivity when it is an effective epi are expected."""
    x, y = f.dom, f.cod
    Lx, Ly = type_space(cat, x), type_space(cat, y)
    if not Lx.types or not Ly.types:
        return ArrowReport(True, True, True, False, False, {"note": "a context has no types"})
    # image of the type generated by <up p> at x: least set at y whose pullback contains it
    def image(t: TypePoint) -> int:
        g = cat.info(y).full
        for d in Ly.lattice.labels:
            if t.generator & ~cat.pullback_mask(f, d.mask) == 0:
                g &= d.mask
        return g

    img = [Ly.types.index(Ly.type_of_mask(image(t))) for t in Lx.types]
    cex = {}
    open_map = True
    for k, d in enumerate(Lx.lattice.labels):
        pts = {img[j] for j in Lx.space.basic_opens[k]}
        if not Ly.space.is_open(pts):
            open_map = False
            cex.setdefault("open", d)
    injective = len(set(img)) == len(img)
    if not injective:
        cex["injective"] = next((a, b) for a, b in combinations(range(len(img)), 2) if img[a] == img[b])
    surjective = set(img) == set(range(len(Ly.types)))
    if not surjective:
        cex["surjective"] = sorted(set(range(len(Ly.types))) - set(img))
    mono = f.is_surjective_on_coords()
    epi = cat.image_mask(f, cat.info(x).full) == cat.info(y).full
    return ArrowReport(open_map, injective, surjective, mono, epi, cex)


@dataclass
class CompletenessReport:
    weakly_boolean: bool
    two_valued: bool
    pairwise_equivalent: bool
    inequivalent_pair: tuple | None
    wb_counterexample: tuple | None
    note: str = ("only the direction weakly Boolean and two-valued => pairwise "
                 "equivalent is checked; the converse is not decided here")


def _hull_in_member(cat: SemCat, x, mask: int, i: int) -> int:
    """Least definable set containing member ``i``'s part of ``mask``."""
    up = cat.up[x]
    out = 0
    for r in _bits(mask & cat.member_mask(x, i)):
        out |= up[r]
    return out


def elementarily_equivalent(cat: SemCat, i: int, j: int):
    """``None`` when members ``i`` and ``j`` order all definable sets alike,
    else a distinguishing ``(x, a, b)``.

    ``M(a) <= M(b)`` iff ``b`` contains the hull of ``M(a)``, so two members
    agree on every inclusion iff their hulls of each principal ``a`` match.
    """
    for x in cat.contexts:
        for a in cat.principal_sets(x):
            hi = _hull_in_member(cat, x, a.mask, i)
            hj = _hull_in_member(cat, x, a.mask, j)
            if hi != hj:
                return (x, a, DefSet(cat, x, hi))
    return None


def semantic_completeness_analysis(cat: SemCat) -> CompletenessReport:
    wb, cex = cat.is_weakly_boolean()
    tv = cat.is_two_valued()
    bad = None
    k = len(cat.family)
    for i in range(k):
        for j in range(i + 1, k):
            w = elementarily_equivalent(cat, i, j)
            if w is not None:
                bad = (i, j) + w
                break
        if bad:
            break
    if wb and tv and bad is not None:
        raise OracleDisagreement(f"weakly Boolean and two-valued but members {bad[:2]} differ")
    return CompletenessReport(wb, tv, bad is None, bad, cex)
