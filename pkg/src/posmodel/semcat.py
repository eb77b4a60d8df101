"""Saturated lattices of definable sets over a family of finite models.

For a context ``x`` (a tuple of sorts) the points are the tuples of every
family member, laid out in one bit space: member ``i`` occupies bits
``offset[i] .. offset[i] + size[i] - 1``, tuples indexed row-major.  A
definable set is a bitmask over that space.

Every sublattice of a finite powerset containing the empty and the full set
is the lattice of up-sets of a preorder on the points, so ``Sub(x)`` is kept
in that form: ``up[x][p]`` is the least definable set containing point
``p``.  Saturation shrinks these masks until closing under existential
projection and pullback along coordinate maps adds nothing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .dlat import FinDistLattice, SizeLimitExceeded, _bits, down_sets
from .model import FinModel, enumerate_homomorphisms
from .syntax import And, App, Bot, Eq, Exists, Or, Rel, Top, Var, format_formula


class SaturationError(RuntimeError):
    pass


class LatticeTooLarge(SaturationError):
    """An explicit element listing was requested beyond ``max_lattice``."""

    def __init__(self, message, context=None, classes=None):
        super().__init__(message)
        self.context = context
        self.classes = classes


def _popcount(m: int) -> int:
    return bin(m).count("1")


@dataclass(frozen=True)
class CoordMap:
    """The map ``dom -> cod`` sending a tuple ``b`` to ``(b[sigma[0]], ...)``."""

    dom: tuple
    cod: tuple
    sigma: tuple

    def __post_init__(self):
        if len(self.sigma) != len(self.cod):
            raise ValueError("sigma must have one entry per codomain coordinate")
        for m, k in enumerate(self.sigma):
            if not 0 <= k < len(self.dom) or self.dom[k] != self.cod[m]:
                raise ValueError(f"coordinate {m} of {self.cod} cannot come from {k} of {self.dom}")

    def apply(self, tup):
        return tuple(tup[k] for k in self.sigma)

    def is_projection(self) -> bool:
        return len(set(self.sigma)) == len(self.sigma)

    def is_surjective_on_coords(self) -> bool:
        return set(self.sigma) == set(range(len(self.dom)))


@dataclass(frozen=True, eq=False)
class DefSet:
    """A definable set: one mask over the context's point space."""

    cat: "SemCat" = field(repr=False)
    context: tuple
    mask: int
    prov: tuple | None = field(default=None, repr=False)

    def __eq__(self, other):
        return isinstance(other, DefSet) and self.context == other.context and self.mask == other.mask

    def __hash__(self):
        return hash((self.context, self.mask))

    def component(self, i: int) -> int:
        return self.cat.component(self, i)

    def comps(self) -> tuple:
        return tuple(self.cat.component(self, i) for i in range(len(self.cat.family)))

    def witness(self):
        return self.cat.witness(self)

    def __and__(self, other):
        return self.cat.meet(self, other)

    def __or__(self, other):
        return self.cat.join(self, other)

    def __le__(self, other):
        return self.context == other.context and self.mask & ~other.mask == 0


@dataclass
class _Ctx:
    sorts: tuple
    sizes: tuple  # per member
    offsets: tuple
    total: int
    strides: tuple  # per member, per coordinate

    @property
    def full(self) -> int:
        return (1 << self.total) - 1


class SemCat:
    """Definable-set lattices of a model family for all contexts up to ``n_max``."""

    def __init__(self, family, n_max: int = 3, max_lattice: int = 4096):
        family = list(family)
        if not family:
            raise ValueError("empty family")
        key = family[0].signature_key()
        if any(M.signature_key() != key for M in family):
            raise ValueError("family members have different signatures")
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        self.family = family
        self.sig = family[0].sig
        self.n_max = n_max
        self.max_lattice = max_lattice
        sorts = list(self.sig.sorts)
        self.contexts = [()]
        layer = [()]
        for _ in range(n_max):
            layer = [x + (s,) for x in layer for s in sorts]
            self.contexts.extend(layer)
        self._ctx = {x: self._layout(x) for x in self.contexts}
        self._maps_cache: dict = {}
        self.up: dict = {}
        self._history: dict = {}
        self._gens: list = []
        self._seen: dict = {}
        self.notes: list[str] = []
        self.rounds = 0
        self._saturate()

    # -- layout --------------------------------------------------------
    def _layout(self, x) -> _Ctx:
        sizes, strides, offsets = [], [], []
        off = 0
        for M in self.family:
            dims = [M.size(s) for s in x]
            n = 1
            for d in dims:
                n *= d
            st = []
            acc = 1
            for d in reversed(dims):
                st.append(acc)
                acc *= d
            strides.append(tuple(reversed(st)))
            sizes.append(n)
            offsets.append(off)
            off += n
        return _Ctx(tuple(x), tuple(sizes), tuple(offsets), off, tuple(strides))

    def index_of(self, M: FinModel) -> int:
        for i, N in enumerate(self.family):
            if N is M:
                return i
        raise KeyError("model not in the family")

    def info(self, x) -> _Ctx:
        try:
            return self._ctx[tuple(x)]
        except KeyError:
            raise KeyError(f"context {tuple(x)} is not stored (n_max = {self.n_max})") from None

    def point(self, x, i: int, tup) -> int:
        c = self.info(x)
        return c.offsets[i] + sum(e * s for e, s in zip(tup, c.strides[i]))

    def decode(self, x, p: int) -> tuple[int, tuple]:
        c = self.info(x)
        for i in range(len(self.family) - 1, -1, -1):
            if p >= c.offsets[i] and c.sizes[i]:
                k = p - c.offsets[i]
                tup = []
                for st in c.strides[i]:
                    tup.append(k // st)
                    k %= st
                return i, tuple(tup)
        raise IndexError(p)

    def member_points(self, x, i: int) -> range:
        c = self.info(x)
        return range(c.offsets[i], c.offsets[i] + c.sizes[i])

    def member_mask(self, x, i: int) -> int:
        c = self.info(x)
        return ((1 << c.sizes[i]) - 1) << c.offsets[i]

    def member_tuples(self, x, i: int) -> list[tuple]:
        return self.family[i].tuples(x)

    def component(self, d: DefSet, i: int) -> int:
        c = self.info(d.context)
        return (d.mask >> c.offsets[i]) & ((1 << c.sizes[i]) - 1)

    def component_set(self, d: DefSet, i: int) -> frozenset:
        c = self.info(d.context)
        return frozenset(self.decode(d.context, p)[1] for p in _bits(d.mask)
                         if c.offsets[i] <= p < c.offsets[i] + c.sizes[i])

    def map_array(self, f: CoordMap) -> list[int]:
        """For each point of ``f.dom`` the global index of its image in ``f.cod``."""
        key = (f.dom, f.cod, f.sigma)
        arr = self._maps_cache.get(key)
        if arr is None:
            arr = []
            for i, M in enumerate(self.family):
                for tup in M.tuples(f.dom):
                    arr.append(self.point(f.cod, i, f.apply(tup)))
            self._maps_cache[key] = arr
        return arr

    def tuple_map(self, x, src: int, dst: int, h) -> list[int]:
        """Global indices in member ``dst`` of the images of member ``src``'s points under ``h``."""
        return [self.point(x, dst, h.on_tuple(x, tup)) for tup in self.family[src].tuples(x)]

    def pullback_mask(self, f: CoordMap, mask: int) -> int:
        arr = self.map_array(f)
        out = 0
        for q, img in enumerate(arr):
            if mask >> img & 1:
                out |= 1 << q
        return out

    def image_mask(self, f: CoordMap, mask: int) -> int:
        arr = self.map_array(f)
        out = 0
        for q in _bits(mask):
            out |= 1 << arr[q]
        return out

    # -- generator maps ------------------------------------------------
    def _maps_into(self, x) -> list[CoordMap]:
        """Coordinate maps with codomain ``x`` used as closure generators:
        adjacent swaps, identification of two equal-sort coordinates and the
        projection dropping an appended last coordinate."""
        out = []
        n = len(x)
        for k in range(n - 1):
            y = x[:k] + (x[k + 1], x[k]) + x[k + 2:]
            sigma = tuple(k + 1 if m == k else k if m == k + 1 else m for m in range(n))
            out.append(CoordMap(y, x, sigma))
        for i in range(n):
            for j in range(i + 1, n):
                if x[i] == x[j]:
                    y = x[:j] + x[j + 1:]
                    sigma = tuple(m if m < j else i if m == j else m - 1 for m in range(n))
                    out.append(CoordMap(y, x, sigma))
        if n < self.n_max:
            for s in self.sig.sorts:
                out.append(CoordMap(x + (s,), x, tuple(range(n))))
        return out

    # -- saturation ----------------------------------------------------
    def _add_gen(self, x, mask: int, prov: tuple, dirty: dict):
        seen = self._seen[x]
        if mask in seen:
            return
        seen.add(mask)
        gid = len(self._gens)
        self._gens.append((x, mask, prov))
        up = self.up[x]
        hist = self._history[x]
        for p in _bits(mask):
            new = up[p] & mask
            if new != up[p]:
                up[p] = new
                hist[p].append(gid)
                dirty.setdefault(x, set()).add(p)

    def _atoms(self):
        sig = self.sig
        out = []
        if self.n_max >= 2:
            for s in sig.sorts:
                out.append(((s, s), ("eq",), lambda M, t: t[0] == t[1]))
        for r, ar in sig.relations.items():
            if len(ar) <= self.n_max:
                out.append((tuple(ar), ("rel", r), lambda M, t, r=r: t in M.rels[r]))
            else:
                self.notes.append(f"relation {r} has arity {len(ar)} > n_max; its atom is not seeded")
        for f, (dom, cod) in sig.functions.items():
            if len(dom) + 1 <= self.n_max:
                out.append((tuple(dom) + (cod,), ("graph", f),
                            lambda M, t, f=f: M.funcs[f][t[:-1]] == t[-1]))
            else:
                self.notes.append(f"graph of {f} needs {len(dom) + 1} coordinates > n_max; not seeded")
        return out

    def _saturate(self):
        for x in self.contexts:
            c = self._ctx[x]
            self.up[x] = [c.full] * c.total
            self._history[x] = [[] for _ in range(c.total)]
            self._seen[x] = {c.full}
        dirty: dict = {}
        for x, prov, pred in self._atoms():
            mask = 0
            for i, M in enumerate(self.family):
                for tup in M.tuples(x):
                    if pred(M, tup):
                        mask |= 1 << self.point(x, i, tup)
            self._add_gen(x, mask, prov, dirty)
        # first pass treats every point as dirty
        pending = {x: set(range(self._ctx[x].total)) for x in self.contexts}
        for x, ps in dirty.items():
            pending[x] |= ps
        while pending:
            self.rounds += 1
            x = min(pending, key=lambda y: (len(y), y))
            ps = pending.pop(x)
            new_dirty: dict = {}
            up = self.up[x]
            done = set()
            for p in sorted(ps):
                u = up[p]
                if u in done:
                    continue
                done.add(u)
                snap = (x, p, len(self._history[x][p]))
                for f in self._maps_into(x):
                    self._add_gen(f.dom, self.pullback_mask(f, u), ("pull", f, snap), new_dirty)
                if x:
                    f = CoordMap(x, x[:-1], tuple(range(len(x) - 1)))
                    self._add_gen(x[:-1], self.image_mask(f, u), ("ex", snap), new_dirty)
            for y, qs in new_dirty.items():
                pending.setdefault(y, set()).update(qs)

    # -- basic lattice access -----------------------------------------
    def top(self, x) -> DefSet:
        return DefSet(self, tuple(x), self.info(x).full)

    def bot(self, x) -> DefSet:
        return DefSet(self, tuple(x), 0)

    def is_definable(self, x, mask: int) -> bool:
        up = self.up[tuple(x)]
        return all(up[p] & ~mask == 0 for p in _bits(mask))

    def defset(self, x, mask: int, prov=None) -> DefSet:
        if not self.is_definable(x, mask):
            raise ValueError(f"mask {mask:#x} is not definable at {tuple(x)}")
        return DefSet(self, tuple(x), mask, prov)

    def principal(self, x, p: int) -> DefSet:
        x = tuple(x)
        return DefSet(self, x, self.up[x][p], ("snap", (x, p, len(self._history[x][p]))))

    def class_reps(self, x) -> list[int]:
        """Least point of each equivalence class of the preorder."""
        seen = {}
        for p, u in enumerate(self.up[tuple(x)]):
            seen.setdefault(u, p)
        return sorted(seen.values())

    def principal_sets(self, x) -> list[DefSet]:
        return [self.principal(x, p) for p in self.class_reps(x)]

    def leq_points(self, x, p: int, q: int) -> bool:
        """``p <= q``: every definable set containing ``p`` contains ``q``."""
        return bool(self.up[tuple(x)][p] >> q & 1)

    def meet(self, a: DefSet, b: DefSet) -> DefSet:
        if a.context != b.context:
            raise ValueError("contexts differ")
        return DefSet(self, a.context, a.mask & b.mask)

    def join(self, a: DefSet, b: DefSet) -> DefSet:
        if a.context != b.context:
            raise ValueError("contexts differ")
        return DefSet(self, a.context, a.mask | b.mask)

    def minimal_points(self, x, mask: int) -> list[int]:
        """Class representatives generating the up-set ``mask``."""
        up = self.up[tuple(x)]
        reps = [p for p in self.class_reps(x) if mask >> p & 1]
        out = []
        for p in reps:
            if not any(q != p and up[q] != up[p] and up[q] >> p & 1 for q in reps):
                out.append(p)
        return out

    # -- enumerating the lattice ---------------------------------------
    def upsets_within(self, x, bound: int, limit: int | None = None) -> list[int]:
        """All definable sets contained in the definable set ``bound``."""
        x = tuple(x)
        up = self.up[x]
        reps = [p for p in self.class_reps(x) if bound >> p & 1]
        pos = {p: k for k, p in enumerate(reps)}
        cls_mask = [0] * len(reps)
        for q in _bits(bound):
            cls_mask[pos[self._rep_of(x, q)]] |= 1 << q
        # up-sets of the class poset are down-sets of its opposite
        above = []
        for p in reps:
            m = 0
            for q in reps:
                if q != p and up[p] >> q & 1:
                    m |= 1 << pos[q]
            above.append(m)
        lim = self.max_lattice if limit is None else limit
        try:
            sets = down_sets(len(reps), above, limit=lim)
        except SizeLimitExceeded as exc:
            raise LatticeTooLarge(f"more than {lim} definable sets at context {x}", x, len(reps)) from exc
        out = []
        for s in sets:
            m = 0
            for k in _bits(s):
                m |= cls_mask[k]
            out.append(m)
        return out

    def _rep_of(self, x, q: int) -> int:
        cache = self._rep_cache if hasattr(self, "_rep_cache") else None
        if cache is None:
            self._rep_cache = cache = {}
        table = cache.get(x)
        if table is None:
            first = {}
            table = []
            for p, u in enumerate(self.up[x]):
                table.append(first.setdefault(u, p))
            cache[x] = table
        return table[q]

    def lattice_size(self, x, limit: int | None = None) -> int | None:
        """Number of definable sets at ``x``, or ``None`` beyond the limit."""
        try:
            return len(self.upsets_within(x, self.info(x).full, limit))
        except LatticeTooLarge:
            return None

    def elements(self, x) -> list[DefSet]:
        x = tuple(x)
        return [DefSet(self, x, m) for m in self.upsets_within(x, self.info(x).full)]

    # -- witnesses -----------------------------------------------------
    def _gen_formula(self, gid: int, vars_: list, fresh: list):
        x, _, prov = self._gens[gid]
        kind = prov[0]
        if kind == "eq":
            return Eq(vars_[0], vars_[1])
        if kind == "rel":
            return Rel(prov[1], tuple(vars_))
        if kind == "graph":
            f = prov[1]
            dom, cod = self.sig.functions[f]
            return Eq(App(f, tuple(vars_[:-1]), cod), vars_[-1])
        if kind == "pull":
            f, snap = prov[1], prov[2]
            return self._snap_formula(snap, [vars_[k] for k in f.sigma], fresh)
        if kind == "ex":
            snap = prov[1]
            s = snap[0][-1]
            fresh[0] += 1
            y = Var(f"y{fresh[0]}", s)
            return Exists(y.name, s, self._snap_formula(snap, list(vars_) + [y], fresh))
        raise ValueError(kind)

    def _snap_formula(self, snap, vars_, fresh):
        x, p, k = snap
        gids = self._history[x][p][:k]
        if not gids:
            return Top()
        out = None
        for g in gids:
            f = self._gen_formula(g, vars_, fresh)
            out = f if out is None else And(out, f)
        return out

    def _snap_size(self, snap, memo) -> int:
        if snap in memo:
            return memo[snap]
        x, p, k = snap
        total = 0
        for g in self._history[x][p][:k]:
            prov = self._gens[g][2]
            if prov[0] in ("pull", "ex"):
                total += 1 + self._snap_size(prov[-1], memo)
            else:
                total += 1
        memo[snap] = max(total, 1)
        return memo[snap]

    def context_vars(self, x) -> list[Var]:
        return [Var(f"x{k}", s) for k, s in enumerate(x)]

    def witness(self, d: DefSet, vars_=None):
        """A positive-existential formula over ``x0, x1, ...`` defining ``d``."""
        x = d.context
        vars_ = self.context_vars(x) if vars_ is None else vars_
        fresh = [0]
        return self._witness(d, vars_, fresh)

    def _witness(self, d, vars_, fresh):
        x = d.context
        prov = d.prov
        if prov is not None and prov[0] == "snap":
            return self._snap_formula(prov[1], vars_, fresh)
        if prov is not None and prov[0] == "image":
            src, keep = prov[1], prov[2]
            full = [None] * len(src.context)
            for m, k in enumerate(keep):
                full[k] = vars_[m]
            bound = []
            for k, s in enumerate(src.context):
                if full[k] is None:
                    fresh[0] += 1
                    full[k] = Var(f"y{fresh[0]}", s)
                    bound.append(full[k])
            body = self._witness(src, full, fresh)
            for v in reversed(bound):
                body = Exists(v.name, v.sort, body)
            return body
        if prov is not None and prov[0] == "pullback":
            src, f = prov[1], prov[2]
            return self._witness(src, [vars_[k] for k in f.sigma], fresh)
        if d.mask == 0:
            return Bot()
        if d.mask == self.info(x).full:
            return Top()
        parts = []
        for p in self.minimal_points(x, d.mask):
            parts.append(self._snap_formula((x, p, len(self._history[x][p])), vars_, fresh))
        out = None
        for f in parts:
            out = f if out is None else Or(out, f)
        return out

    def witness_size(self, d: DefSet) -> int:
        memo: dict = {}
        x = d.context
        if d.prov is not None and d.prov[0] == "snap":
            return self._snap_size(d.prov[1], memo)
        if d.mask in (0, self.info(x).full):
            return 1
        return sum(self._snap_size((x, p, len(self._history[x][p])), memo)
                   for p in self.minimal_points(x, d.mask))

    def witness_text(self, d: DefSet, limit: int = 400) -> str:
        n = self.witness_size(d)
        if n > limit:
            return f"<witness with {n} nodes omitted>"
        return format_formula(self.witness(d))

    # -- structural operations -----------------------------------------
    def image_along_projection(self, d: DefSet, keep) -> DefSet:
        """Image of ``d`` under the projection onto the coordinates ``keep``."""
        keep = tuple(keep)
        x = d.context
        if len(set(keep)) != len(keep) or any(not 0 <= k < len(x) for k in keep):
            raise ValueError(f"bad coordinate selection {keep} for context {x}")
        target = tuple(x[k] for k in keep)
        if len(target) > self.n_max:
            raise ValueError("target context exceeds n_max")
        f = CoordMap(x, target, keep)
        mask = self.image_mask(f, d.mask)
        if not self.is_definable(target, mask):
            raise SaturationError(f"image at {target} is not in the saturated lattice")
        return DefSet(self, target, mask, ("image", d, keep))

    def pullback(self, d: DefSet, f: CoordMap) -> DefSet:
        if f.cod != d.context:
            raise ValueError("codomain mismatch")
        mask = self.pullback_mask(f, d.mask)
        if not self.is_definable(f.dom, mask):
            raise SaturationError(f"pullback to {f.dom} is not in the saturated lattice")
        return DefSet(self, f.dom, mask, ("pullback", d, f))

    def all_coord_maps(self, dom=None, cod=None):
        doms = [tuple(dom)] if dom is not None else self.contexts
        cods = [tuple(cod)] if cod is not None else self.contexts
        for y in doms:
            for x in cods:
                choices = [[k for k in range(len(y)) if y[k] == s] for s in x]
                for sigma in product(*choices):
                    yield CoordMap(y, x, tuple(sigma))

    def check_closed(self) -> list[tuple]:
        """Re-run every closure operator on principal sets; list anything new."""
        problems = []
        for x in self.contexts:
            reps = self.class_reps(x)
            if x:
                f = CoordMap(x, x[:-1], tuple(range(len(x) - 1)))
                for p in reps:
                    m = self.image_mask(f, self.up[x][p])
                    if not self.is_definable(x[:-1], m):
                        problems.append(("exists", x, p))
            for f in self.all_coord_maps(cod=x):
                for p in reps:
                    m = self.pullback_mask(f, self.up[x][p])
                    if not self.is_definable(f.dom, m):
                        problems.append(("pullback", f, p))
        return problems

    # -- lattice-level predicates --------------------------------------
    def sub_lattice(self, x) -> FinDistLattice:
        """``Sub(x)`` as an explicit lattice; labels are the ``DefSet``s."""
        x = tuple(x)
        masks = self.upsets_within(x, self.info(x).full)
        masks.sort(key=lambda m: (_popcount(m), m))
        return FinDistLattice.from_subset_masks(masks, labels=[DefSet(self, x, m) for m in masks])

    def atom_subobjects(self, x) -> list[DefSet]:
        x = tuple(x)
        up = self.up[x]
        out = []
        for p in self.class_reps(x):
            u = up[p]
            # maximal class: nothing above p outside its own class
            if all(up[q] == u for q in _bits(u)):
                out.append(self.principal(x, p))
        return out

    def is_two_valued(self) -> bool:
        return all(u == self.info(()).full for u in self.up[()])

    def is_weakly_boolean(self):
        """``(True, None)`` or ``(False, (x, a, b))``.

        Checked pointwise: the lattice at ``x`` is weakly Boolean iff every
        point ``p`` lies below some ``q`` whose up-set stays inside the
        down-set of ``p``.
        """
        for x in self.contexts:
            up = self.up[x]
            full = self.info(x).full
            for p in self.class_reps(x):
                down = 0
                for r in range(len(up)):
                    if up[r] >> p & 1:
                        down |= 1 << r
                if not any(up[q] & ~down == 0 for q in _bits(up[p])):
                    a = self.principal(x, p)
                    b = DefSet(self, x, full & ~down)
                    return False, (x, a, b)
        return True, None

    def evaluation_functor(self, i: int) -> "EvalFunctor":
        if not 0 <= i < len(self.family):
            raise IndexError(f"member {i} out of range")
        return EvalFunctor(self, i)

    # -- completeness --------------------------------------------------
    def completeness_certificate(self, cap: int = 20000):
        """Compare each preorder with the one induced by homomorphisms.

        A point ``(i, a)`` lies below ``(j, b)`` for every formula iff some
        homomorphism ``M_i -> M_j`` maps ``a`` to ``b``.  When the two
        preorders coincide at every context, the bounded lattices are the full
        lattices of definable sets.  Returns ``(certified, mismatches, truncated)``.
        """
        homs = {}
        truncated = False
        for i, M in enumerate(self.family):
            for j, N in enumerate(self.family):
                hl = enumerate_homomorphisms(M, N, cap)
                homs[(i, j)] = hl.homs
                truncated |= hl.truncated
        mismatches = []
        for x in self.contexts:
            reach = [0] * self.info(x).total
            for (i, j), hs in homs.items():
                for h in hs:
                    for tup in self.family[i].tuples(x):
                        reach[self.point(x, i, tup)] |= 1 << self.point(x, j, h.on_tuple(x, tup))
            for p, u in enumerate(self.up[x]):
                if reach[p] != u:
                    mismatches.append((x, p))
        return (not mismatches and not truncated), mismatches, truncated

    def dump(self, limit: int = 400) -> list[str]:
        lines = []
        for x in self.contexts:
            size = self.lattice_size(x)
            shown = str(size) if size is not None else f">{self.max_lattice}"
            atoms = self.atom_subobjects(x)
            lines.append(f"context ({', '.join(x)}): points={self.info(x).total} "
                         f"classes={len(self.class_reps(x))} size={shown} atoms={len(atoms)}")
            for a in atoms:
                lines.append(f"  atom {self.witness_text(a, limit)}")
        return lines


class EvalFunctor:
    """The evaluation ``x -> M_i(x)``, ``d -> component i of d``."""

    def __init__(self, cat: SemCat, i: int):
        self.cat = cat
        self.i = i
        self.model = cat.family[i]

    def obj(self, x) -> frozenset:
        return frozenset(self.model.tuples(x))

    def sub(self, d: DefSet) -> frozenset:
        return self.cat.component_set(d, self.i)

    def mask(self, d: DefSet) -> int:
        return self.cat.component(d, self.i)

    def check_coherence(self, pairs_limit: int | None = 2000) -> list[str]:
        """Check preservation of bounds, meets, joins, images and pullbacks on stored sets."""
        C, i = self.cat, self.i
        errs = []
        for x in C.contexts:
            full = (1 << C.info(x).sizes[i]) - 1
            if self.mask(C.top(x)) != full:
                errs.append(f"top at {x}")
            if self.mask(C.bot(x)) != 0:
                errs.append(f"bottom at {x}")
            ps = C.principal_sets(x)
            count = 0
            for a in ps:
                for b in ps:
                    count += 1
                    if pairs_limit is not None and count > pairs_limit:
                        break
                    if self.sub(a & b) != self.sub(a) & self.sub(b):
                        errs.append(f"meet at {x}")
                    if self.sub(a | b) != self.sub(a) | self.sub(b):
                        errs.append(f"join at {x}")
            for d in ps:
                for k in range(len(x)):
                    keep = tuple(m for m in range(len(x)) if m != k)
                    img = C.image_along_projection(d, keep)
                    if self.sub(img) != frozenset(tuple(t[m] for m in keep) for t in self.sub(d)):
                        errs.append(f"image at {x} dropping {k}")
                for f in C._maps_into(x):
                    pb = C.pullback(d, f)
                    want = frozenset(t for t in self.model.tuples(f.dom) if f.apply(t) in self.sub(d))
                    if self.sub(pb) != want:
                        errs.append(f"pullback along {f.sigma} into {f.dom}")
        return errs


def saturate(family, n_max: int = 3, max_lattice: int = 4096) -> SemCat:
    return SemCat(family, n_max, max_lattice)
