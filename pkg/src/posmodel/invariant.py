"""The lattice invariant LM of a model, types of tuples, positive closedness.

A model is seen through a *handle*: a way to attach to every tuple ``a`` of
sort context ``x`` the least definable set ``psi(x, a)`` it belongs to.  An
element of LM is the class of a pointed definable set ``u`` at ``a``; since
``u`` at ``a`` is equivalent to ``u & psi(a)`` at ``a``, and a tuple with
repeated elements is a coordinate image of its set of distinct elements, it
suffices to work at *nodes*: sets ``c`` of distinct ``(sort, element)``
pairs, with the lattice of definable sets below ``psi(c)``.  Adding an
element to a node pulls a set back along the projection and cuts it down to
the new ``psi``; LM is the quotient of the disjoint union of the node
lattices by these transitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .dlat import (FinDistLattice, LatticeError, _bits, is_lattice_homomorphism, prime_filters,
                   spec)
from .model import FinModel, Homomorphism, enumerate_homomorphisms
from .semcat import CoordMap, DefSet, LatticeTooLarge, SemCat


class InvariantError(RuntimeError):
    pass


class OracleDisagreement(InvariantError):
    """Two independent computations of the same fact disagree."""


# ---------------------------------------------------------------------------
# handles


class MemberHandle:
    """Family member ``i`` viewed through its evaluation functor."""

    def __init__(self, cat: SemCat, i: int):
        self.cat = cat
        self.i = i
        self.model = cat.family[i]
        self.label = f"M{i}" if self.model.name is None else self.model.name

    def size(self, sort: str) -> int:
        return self.model.size(sort)

    def psi(self, x, tup) -> int:
        return self.cat.up[tuple(x)][self.cat.point(x, self.i, tup)]

    def tuples(self, x):
        return self.model.tuples(x)

    def element_name(self, sort, e) -> str:
        return self.model.element_name(sort, e)


class ProductHandle:
    """Pointwise product of two members: a pair tuple lies in ``u`` iff both
    halves do.  Element ``(a, b)`` is encoded ``a * |N_s| + b``."""

    def __init__(self, cat: SemCat, i: int, j: int):
        self.cat = cat
        self.i = i
        self.j = j
        M, N = cat.family[i], cat.family[j]
        self.M, self.N = M, N
        self.label = f"M{i}xM{j}"

    def size(self, sort):
        return self.M.size(sort) * self.N.size(sort)

    def split(self, x, tup):
        a = tuple(e // self.N.size(s) for s, e in zip(x, tup))
        b = tuple(e % self.N.size(s) for s, e in zip(x, tup))
        return a, b

    def psi(self, x, tup) -> int:
        a, b = self.split(x, tup)
        up = self.cat.up[tuple(x)]
        return up[self.cat.point(x, self.i, a)] | up[self.cat.point(x, self.j, b)]

    def tuples(self, x):
        return list(product(*[range(self.size(s)) for s in x]))

    def element_name(self, sort, e):
        return f"({self.M.element_name(sort, e // self.N.size(sort))},{self.N.element_name(sort, e % self.N.size(sort))})"


def interpret(cat: SemCat, N: FinModel) -> dict:
    """Evaluate the saturation's witness formulas in an outside model.

    The witnesses form a DAG (generators built from snapshots of earlier
    principal sets); it is replayed on ``N`` with sharing.  Returns
    ``{(x, point): mask over N's tuples of x}`` for every class representative.
    """
    gens = cat._gens
    gval: dict = {}
    memo: dict = {}

    def index(x, tup):
        k = 0
        for s, e in zip(x, tup):
            k = k * N.size(s) + e
        return k

    def full(x):
        n = 1
        for s in x:
            n *= N.size(s)
        return (1 << n) - 1

    def snap_val(snap):
        if snap in memo:
            return memo[snap]
        x, p, k = snap
        v = full(x)
        for g in cat._history[x][p][:k]:
            v &= gen_val(g)
        memo[snap] = v
        return v

    def gen_val(g):
        if g in gval:
            return gval[g]
        x, _, prov = gens[g]
        kind = prov[0]
        v = 0
        if kind == "eq":
            for t in N.tuples(x):
                if t[0] == t[1]:
                    v |= 1 << index(x, t)
        elif kind == "rel":
            for t in N.rels[prov[1]]:
                v |= 1 << index(x, t)
        elif kind == "graph":
            for key, val in N.funcs[prov[1]].items():
                v |= 1 << index(x, key + (val,))
        elif kind == "pull":
            f, snap = prov[1], prov[2]
            src = snap_val(snap)
            for t in N.tuples(f.dom):
                if src >> index(f.cod, f.apply(t)) & 1:
                    v |= 1 << index(f.dom, t)
        elif kind == "ex":
            snap = prov[1]
            src = snap_val(snap)
            y = snap[0]
            for t in N.tuples(y):
                if src >> index(y, t) & 1:
                    v |= 1 << index(x, t[:-1])
        gval[g] = v
        return v

    out = {}
    for x in cat.contexts:
        for p in cat.class_reps(x):
            out[(x, p)] = snap_val((x, p, len(cat._history[x][p])))
    return out


class ExternalHandle:
    """An outside model read through the witnesses of a saturation."""

    def __init__(self, cat: SemCat, N: FinModel, values: dict | None = None):
        self.cat = cat
        self.model = N
        self.values = values if values is not None else interpret(cat, N)
        self.label = N.name or "N"
        self._rep_masks = {x: [(p, cat.up[x][p]) for p in cat.class_reps(x)] for x in cat.contexts}

    def size(self, sort):
        return self.model.size(sort)

    def tuples(self, x):
        return self.model.tuples(x)

    def _index(self, x, tup):
        k = 0
        for s, e in zip(x, tup):
            k = k * self.model.size(s) + e
        return k

    def psi(self, x, tup) -> int:
        x = tuple(x)
        k = self._index(x, tup)
        m = self.cat.info(x).full
        for p, u in self._rep_masks[x]:
            if self.values[(x, p)] >> k & 1:
                m &= u
        return m

    def element_name(self, sort, e):
        return self.model.element_name(sort, e)

    def coherence_failures(self, limit: int = 1) -> list[str]:
        """Where ``N`` fails to respect the structure of the saturation."""
        cat, vals = self.cat, self.values
        out = []
        for x in cat.contexts:
            reps = self._rep_masks[x]
            nfull = (1 << len(self.model.tuples(x))) - 1
            cover = 0
            for p, _ in reps:
                cover |= vals[(x, p)]
            if cover != nfull:
                out.append(f"top not preserved at {x}")
            for p, u in reps:
                for q, v in reps:
                    if u & ~v == 0 and vals[(x, p)] & ~vals[(x, q)]:
                        out.append(f"order not preserved at {x}")
                    both = 0
                    for r, w in reps:
                        if w & ~(u & v) == 0:
                            both |= vals[(x, r)]
                    if both != vals[(x, p)] & vals[(x, q)]:
                        out.append(f"meet not preserved at {x}")
                    if len(out) >= limit:
                        return out
            if x:
                f = CoordMap(x, x[:-1], tuple(range(len(x) - 1)))
                for p, u in reps:
                    img = cat.image_mask(f, u)
                    want = 0
                    for t in self.model.tuples(x):
                        if vals[(x, p)] >> self._index(x, t) & 1:
                            want |= 1 << self._index(x[:-1], t[:-1])
                    got = self._value_of(x[:-1], img)
                    if got != want:
                        out.append(f"image not preserved at {x}")
                        if len(out) >= limit:
                            return out
            for f in cat._maps_into(x):
                for p, u in reps:
                    pb = cat.pullback_mask(f, u)
                    want = 0
                    for t in self.model.tuples(f.dom):
                        if vals[(x, p)] >> self._index(x, f.apply(t)) & 1:
                            want |= 1 << self._index(f.dom, t)
                    if self._value_of(f.dom, pb) != want:
                        out.append(f"pullback not preserved into {f.dom}")
                        if len(out) >= limit:
                            return out
        return out

    def _value_of(self, x, mask) -> int:
        v = 0
        for p, u in self._rep_masks[x]:
            if mask >> p & 1:
                v |= self.values[(x, p)]
        return v


def handle_for(cat: SemCat, m) -> object:
    if isinstance(m, int):
        return MemberHandle(cat, m)
    if isinstance(m, FinModel):
        try:
            return MemberHandle(cat, cat.index_of(m))
        except KeyError:
            return ExternalHandle(cat, m)
    return m


# ---------------------------------------------------------------------------
# nodes


def _node_elements(cat: SemCat, m) -> list[tuple[str, int]]:
    return [(s, e) for s in cat.sig.sorts for e in range(m.size(s))]


def normalize(cat: SemCat, x, tup):
    """Node of a tuple (its distinct elements in canonical order) and the
    coordinate map from the node's context to ``x``."""
    order = {s: k for k, s in enumerate(cat.sig.sorts)}
    pairs = sorted(set(zip(x, tup)), key=lambda se: (order[se[0]], se[1]))
    pos = {se: k for k, se in enumerate(pairs)}
    z = tuple(s for s, _ in pairs)
    sigma = tuple(pos[(s, e)] for s, e in zip(x, tup))
    return tuple(pairs), CoordMap(z, tuple(x), sigma)


# ---------------------------------------------------------------------------
# positive closedness and types


@dataclass(frozen=True)
class PCResult:
    closed: bool
    counterexample: tuple | None = None  # (u, x, a)
    n_max: int = 0

    def __bool__(self):
        return self.closed


def is_positively_closed_direct(cat: SemCat, m) -> PCResult:
    """Every definable set either contains ``psi(a)`` or misses it.

    That is: whenever ``a`` is outside ``u`` some definable ``v`` containing
    ``a`` is disjoint from ``u`` (take ``v = psi(a)``).  Principal ``u``
    suffice because every definable set is a union of principal ones.
    """
    m = handle_for(cat, m)
    for x in cat.contexts:
        reps = [(p, cat.up[x][p]) for p in cat.class_reps(x)]
        for tup in m.tuples(x):
            psi = m.psi(x, tup)
            for p, u in reps:
                if psi & u and psi & ~u:
                    return PCResult(False, (cat.principal(x, p), x, tup), cat.n_max)
    return PCResult(True, None, cat.n_max)


@dataclass(frozen=True)
class TypeFilter:
    """The filter of definable sets at ``context`` containing ``generator``."""

    context: tuple
    generator: int

    def __contains__(self, d: DefSet) -> bool:
        return d.context == self.context and self.generator & ~d.mask == 0

    def members(self, cat: SemCat) -> list[DefSet]:
        return [d for d in cat.elements(self.context) if d in self]

    def as_prime_filter(self, cat: SemCat, L: FinDistLattice | None = None):
        L = L or cat.sub_lattice(self.context)
        return frozenset(k for k, d in enumerate(L.labels) if d in self)


def tp(cat: SemCat, m, x, a) -> TypeFilter:
    """Definable sets at ``x`` containing the tuple ``a``."""
    m = handle_for(cat, m)
    return TypeFilter(tuple(x), m.psi(x, a))


# ---------------------------------------------------------------------------
# LM


@dataclass
class LMLattice:
    cat: SemCat
    handle: object
    nodes: list  # node -> tuple of (sort, element)
    node_index: dict
    node_sets: list  # node -> list of masks
    psi: list  # node -> mask
    class_of: dict  # (node, mask) -> class id
    reps: list  # class id -> {node: mask}
    lattice: FinDistLattice | None
    top: int
    bot: int
    complete: bool
    unresolved: list = field(default_factory=list)
    audit: dict = field(default_factory=dict)
    collisions: list = field(default_factory=list)
    non_injective: list = field(default_factory=list)
    closure_merges: int = 0
    node_bound: int = 0

    def __len__(self):
        return len(self.reps)

    def is_two(self) -> bool:
        """Exactly two classes.  Decided node by node: every node lattice maps
        injectively into LM, so LM is 2 iff every node lattice is."""
        return all(len(sets) == 2 for sets in self.node_sets)

    def context(self, node: int) -> tuple:
        return tuple(s for s, _ in self.nodes[node])

    def point(self, node: int) -> tuple:
        return tuple(e for _, e in self.nodes[node])

    def class_at(self, x, a, mask: int) -> int:
        """Class of the pointed set ``mask`` at the tuple ``a`` of context ``x``."""
        pairs, f = normalize(self.cat, x, a)
        n = self.node_index[pairs]
        d = self.cat.pullback_mask(f, mask) & self.psi[n]
        return self.class_of[(n, d)]

    def canonical(self, cls: int) -> tuple[int, int]:
        node = min(self.reps[cls], key=lambda n: (len(self.nodes[n]), self.nodes[n]))
        return node, self.reps[cls][node]

    def leq(self, a: int, b: int) -> bool:
        return self.lattice.leq(a, b)


def lm_compute(cat: SemCat, m, pair_bound: int | None = None, audit: bool = False,
               audit_limit: int = 20000, build: bool = True) -> LMLattice:
    m = handle_for(cat, m)
    nb = cat.n_max if pair_bound is None else pair_bound
    if nb > cat.n_max:
        raise ValueError(f"pair bound {nb} exceeds n_max {cat.n_max}")
    order = {s: k for k, s in enumerate(cat.sig.sorts)}
    elems = _node_elements(cat, m)
    nodes = []
    for k in range(nb + 1):
        for combo in combinations(range(len(elems)), k):
            nodes.append(tuple(elems[i] for i in combo))
    node_index = {c: i for i, c in enumerate(nodes)}
    psi, node_sets = [], []
    for c in nodes:
        z = tuple(s for s, _ in c)
        ps = m.psi(z, tuple(e for _, e in c))
        psi.append(ps)
        node_sets.append(cat.upsets_within(z, ps))

    keys = {}
    for n, sets in enumerate(node_sets):
        for d in sets:
            keys[(n, d)] = len(keys)
    dsu = _DSU(len(keys))
    non_injective = []
    for n, c in enumerate(nodes):
        if len(c) >= nb:
            continue
        z = tuple(s for s, _ in c)
        for e in elems:
            if e in c:
                continue
            c2 = tuple(sorted(c + (e,), key=lambda se: (order[se[0]], se[1])))
            n2 = node_index[c2]
            j = c2.index(e)
            arr = cat.map_array(CoordMap(tuple(s for s, _ in c2), z,
                                         tuple(k for k in range(len(c2)) if k != j)))
            bits2 = _bits(psi[n2])
            seen = {}
            for d in node_sets[n]:
                t = 0
                for q in bits2:
                    if d >> arr[q] & 1:
                        t |= 1 << q
                if t in seen:
                    non_injective.append((n, n2, seen[t], d))
                seen[t] = d
                dsu.union(keys[(n, d)], keys[(n2, t)])

    lm = LMLattice(cat, m, nodes, node_index, node_sets, psi, {}, [], None, 0, 0, True,
                   node_bound=nb)
    lm.non_injective = non_injective
    lm.closure_merges = 0
    _settle(lm, keys, dsu)
    if build:
        _close_operations(lm, keys, dsu)
        _build_order(lm)
    if audit:
        lm.audit = lm_audit(lm, limit=audit_limit)
    return lm


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, k):
        p = self.parent
        root = k
        while p[root] != root:
            root = p[root]
        while p[k] != root:
            p[k], k = root, p[k]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _settle(lm: LMLattice, keys: dict, dsu: _DSU):
    """Number the classes and record one representative per node."""
    roots: dict = {}
    lm.class_of, lm.reps, lm.collisions = {}, [], []
    for (n, d), k in keys.items():
        r = dsu.find(k)
        cid = roots.get(r)
        if cid is None:
            cid = roots[r] = len(lm.reps)
            lm.reps.append({})
        lm.class_of[(n, d)] = cid
        prev = lm.reps[cid].setdefault(n, d)
        if prev != d:
            lm.collisions.append((cid, n, prev, d))
    root = lm.node_index[()]
    lm.top = lm.class_of[(root, lm.psi[root])]
    lm.bot = lm.class_of[(root, 0)]


def _close_operations(lm: LMLattice, keys: dict, dsu: _DSU):
    """Merge classes forced equal by the operations.

    The node sets inside the bound are not directed: two classes may meet at
    several common nodes whose results are identified only at a larger node.
    Since every transition is an injective lattice map into LM, all those
    results name the same element of LM, so merging them is sound.
    """
    while True:
        changed = False
        k = len(lm.reps)
        for a in range(k):
            for b in range(a + 1, k):
                spots = _common(lm, a, b)
                if len(spots) < 2:
                    continue
                n0, da0, db0 = spots[0]
                m0, j0 = keys[(n0, da0 & db0)], keys[(n0, da0 | db0)]
                for n, da, db in spots[1:]:
                    changed |= dsu.union(m0, keys[(n, da & db)])
                    changed |= dsu.union(j0, keys[(n, da | db)])
        if not changed:
            return
        before = len(lm.reps)
        _settle(lm, keys, dsu)
        lm.closure_merges += before - len(lm.reps)


def _lift(lm: LMLattice, node: int, mask: int, target: int) -> int:
    c, c2 = lm.nodes[node], lm.nodes[target]
    if not set(c) <= set(c2):
        raise ValueError("target node does not extend the source node")
    z, z2 = lm.context(node), lm.context(target)
    f = CoordMap(z2, z, tuple(c2.index(e) for e in c))
    return lm.cat.pullback_mask(f, mask) & lm.psi[target]


def _common(lm: LMLattice, a: int, b: int):
    """Nodes carrying both classes, directly or after lifting to a union node."""
    ra, rb = lm.reps[a], lm.reps[b]
    shared = [n for n in ra if n in rb]
    if shared:
        return [(n, ra[n], rb[n]) for n in shared]
    order = {s: k for k, s in enumerate(lm.cat.sig.sorts)}
    best = None
    for na in ra:
        for nb in rb:
            u = tuple(sorted(set(lm.nodes[na]) | set(lm.nodes[nb]),
                             key=lambda se: (order[se[0]], se[1])))
            if u in lm.node_index and (best is None or len(u) < len(best[0])):
                best = (u, na, nb)
    if best is None:
        return []
    u, na, nb = best
    n = lm.node_index[u]
    return [(n, _lift(lm, na, ra[na], n), _lift(lm, nb, rb[nb], n))]


def _build_order(lm: LMLattice):
    k = len(lm.reps)
    leq = [[a == b for b in range(k)] for a in range(k)]
    meet = [[a if a == b else None for b in range(k)] for a in range(k)]
    join = [[a if a == b else None for b in range(k)] for a in range(k)]
    lm.unresolved = []
    for a in range(k):
        for b in range(a + 1, k):
            spots = _common(lm, a, b)
            if not spots:
                lm.unresolved.append((a, b))
                continue
            n, da, db = spots[0]
            mt, jn = lm.class_of[(n, da & db)], lm.class_of[(n, da | db)]
            leq[a][b], leq[b][a] = mt == a, mt == b
            meet[a][b] = meet[b][a] = mt
            join[a][b] = join[b][a] = jn
    if lm.unresolved:
        lm.complete = False
        return
    try:
        L = FinDistLattice.from_leq(leq)
    except LatticeError as exc:
        raise OracleDisagreement(f"classes do not form a distributive lattice: {exc}") from exc
    for a in range(k):
        for b in range(k):
            if L.meet[a][b] != meet[a][b] or L.join[a][b] != join[a][b]:
                raise OracleDisagreement("representative operations disagree with the class order")
    lm.lattice = L


def lm_audit(lm: LMLattice, limit: int = 20000) -> dict:
    """Compare the computed classes with the direct witness relation.

    Two pointed sets ``u`` at ``a`` and ``v`` at ``b`` are directly related
    when some ``phi`` at ``x * y`` containing ``(a, b)`` has
    ``phi & (u x T) = phi & (T x v)``; the least such ``phi`` is
    ``psi(a, b)``, so one test decides it.  Only node pairs whose combined
    length fits the bound are examined.
    """
    cat = lm.cat
    stats = {"pairs": 0, "direct": 0, "same_class": 0, "closure_only": 0, "unsound": 0, "truncated": False}
    for n1, c1 in enumerate(lm.nodes):
        for n2, c2 in enumerate(lm.nodes):
            if len(c1) + len(c2) > lm.node_bound:
                continue
            x, y = lm.context(n1), lm.context(n2)
            xy = x + y
            a, b = lm.point(n1), lm.point(n2)
            phi = lm.handle.psi(xy, a + b)
            f1 = cat.map_array(CoordMap(xy, x, tuple(range(len(x)))))
            f2 = cat.map_array(CoordMap(xy, y, tuple(range(len(x), len(xy)))))
            for u in lm.node_sets[n1]:
                for v in lm.node_sets[n2]:
                    stats["pairs"] += 1
                    if stats["pairs"] > limit:
                        stats["truncated"] = True
                        return stats
                    ok = all((u >> f1[q] & 1) == (v >> f2[q] & 1) for q in _bits(phi))
                    same = lm.class_of[(n1, u)] == lm.class_of[(n2, v)]
                    stats["direct"] += ok
                    stats["same_class"] += same
                    if same and not ok:
                        stats["closure_only"] += 1
                    if ok and not same:
                        stats["unsound"] += 1
    return stats


def lm_dump(lm: LMLattice) -> list[str]:
    cat = lm.cat
    lines = [f"classes={len(lm)} complete={lm.complete} node_bound={lm.node_bound}"]
    for cls in range(len(lm)):
        n, d = lm.canonical(cls)
        x = lm.context(n)
        a = ",".join(lm.handle.element_name(s, e) for s, e in lm.nodes[n])
        w = cat.witness_text(cat.defset(x, d))
        lines.append(f"  [{cls}] {w} at ({a})")
    if lm.lattice is not None:
        edges = lm.lattice.covers()
        lines.append("  hasse " + " ".join(f"{i}<{j}" for i, j in sorted(edges)))
    return lines


# ---------------------------------------------------------------------------
# natural transformations into the type-space functor


@dataclass
class NatTransformation:
    lm: LMLattice
    prime: frozenset  # classes of LM in the prime filter
    node_points: list  # node -> class representative point of the node context

    def component(self, x, a) -> int:
        """Point of ``x`` whose type is the image of ``a``."""
        lm = self.lm
        pairs, f = normalize(lm.cat, x, a)
        n = lm.node_index[pairs]
        return lm.cat.map_array(f)[self.node_points[n]]

    def type_at(self, x, a) -> TypeFilter:
        x = tuple(x)
        return TypeFilter(x, self.lm.cat.up[x][self.component(x, a)])

    def key(self):
        cat, lm = self.lm.cat, self.lm
        return tuple(cat.up[lm.context(n)][q] for n, q in enumerate(self.node_points))


def nat_transformations_to_typespace(cat: SemCat, m, lm: LMLattice) -> list[NatTransformation]:
    if lm.lattice is None:
        raise InvariantError("LM is incomplete at this bound")
    S = spec(lm.lattice)
    out = []
    for P in S.points:
        pts = []
        for n in range(len(lm.nodes)):
            members = [d for d in lm.node_sets[n] if lm.class_of[(n, d)] in P.member]
            g = lm.psi[n]
            for d in members:
                g &= d
            if g not in members:
                raise InvariantError(f"preimage of a prime filter at node {n} is not a filter")
            z = lm.context(n)
            up = cat.up[z]
            q = next((p for p in _bits(g) if up[p] == g), None)
            if q is None:
                raise InvariantError(f"preimage of a prime filter at node {n} is not prime")
            pts.append(q)
        out.append(NatTransformation(lm, P.member, pts))
    return out


def verify_nat_transformation(cat: SemCat, m, tau: NatTransformation) -> list[str]:
    """Naturality along generating coordinate maps plus ``tp <= tau`` pointwise."""
    m = handle_for(cat, m)
    errs = []
    for x in cat.contexts:
        for tup in m.tuples(x):
            q = tau.component(x, tup)
            if not m.psi(x, tup) >> q & 1:
                errs.append(f"tp not below tau at {x} {tup}")
        for f in cat._maps_into(x) + [CoordMap(x, x[:-1], tuple(range(len(x) - 1)))] * bool(x):
            arr = cat.map_array(f)
            up = cat.up[f.cod]
            for tup in m.tuples(f.dom):
                lhs = tau.component(f.cod, f.apply(tup))
                rhs = arr[tau.component(f.dom, tup)]
                if up[lhs] != up[rhs]:
                    errs.append(f"not natural along {f.sigma} at {tup}")
    return errs


def tp_transformation_index(lm: LMLattice, taus) -> int | None:
    """Index of the transformation coming from the prime filter ``{top}``."""
    for k, t in enumerate(taus):
        if t.prime == frozenset({lm.top}):
            return k
    return None


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class LHom:
    mapping: tuple
    well_defined: bool
    homomorphism: bool
    violation: tuple | None = None


def l_of_hom(cat: SemCat, h: Homomorphism, lmM: LMLattice, lmN: LMLattice) -> LHom:
    """The map ``[u at a] -> [u at h(a)]`` from LM to LN."""
    mapping: dict = {}
    for n, c in enumerate(lmM.nodes):
        z = lmM.context(n)
        b = tuple(h(s, e) for s, e in c)
        for d in lmM.node_sets[n]:
            img = lmN.class_at(z, b, d)
            cls = lmM.class_of[(n, d)]
            prev = mapping.setdefault(cls, img)
            if prev != img:
                return LHom(tuple(), False, False, (cls, prev, img))
    mp = tuple(mapping[c] for c in range(len(lmM)))
    ok = (lmM.lattice is not None and lmN.lattice is not None
          and is_lattice_homomorphism(lmM.lattice, lmN.lattice, mp))
    return LHom(mp, True, ok)


@dataclass(frozen=True)
class ElementarityAgreement:
    elementary: bool
    witness_elementary: tuple | None
    witness_tp: tuple | None


def check_hom_elementarity_vs_tp(cat: SemCat, h: Homomorphism) -> ElementarityAgreement:
    from .model import is_elementary_hom

    src, dst = cat.index_of(h.source), cat.index_of(h.target)
    e = is_elementary_hom(h, cat, src, dst)
    tp_witness = None
    for x in cat.contexts:
        for tup in h.source.tuples(x):
            a = tp(cat, src, x, tup)
            b = tp(cat, dst, x, h.on_tuple(x, tup))
            if a != TypeFilter(b.context, b.generator) or a.generator != b.generator:
                tp_witness = (x, tup)
                break
        if tp_witness:
            break
    if e.elementary != (tp_witness is None):
        raise OracleDisagreement(f"elementarity {e.elementary} but type comparison {tp_witness}")
    ew = (e.context, e.defset) if not e.elementary else None
    return ElementarityAgreement(e.elementary, ew, tp_witness)


# ---------------------------------------------------------------------------
# products


@dataclass
class ProductCheck:
    iso: bool
    mapping: tuple | None  # pair-generator class -> index into LM x LN
    flagged: bool = False
    reason: str = ""
    pair_classes: int = 0
    target_size: int = 0
    unresolved_pairs: int = 0


def product_lattice(A: FinDistLattice, B: FinDistLattice) -> FinDistLattice:
    n = A.n * B.n
    leq = [[A.leq(i // B.n, j // B.n) and B.leq(i % B.n, j % B.n) for j in range(n)] for i in range(n)]
    return FinDistLattice.from_leq(leq)


def lm_product_check(cat: SemCat, m: int, n: int, mn=None, lm_m=None, lm_n=None, lm_mn=None) -> ProductCheck:
    """Canonical comparison ``L(M x N) -> LM x LN``.

    ``M x N`` is the pointwise product functor (``ProductHandle``), the
    product of lex functors.  Its elements come in two kinds: pointed sets
    at pair tuples, and split pointed sets ``(u, v)`` at ``a`` in ``x`` and
    ``b`` in ``y`` living on the coproduct ``x + y``.  The split ones carry
    the lattice ``L_c x L_d`` at each pair of nodes with componentwise
    transitions, so they form ``LM x LN`` on the nose; a pair generator
    ``u`` at ``(a, b)`` is identified (codiagonal ``x + x -> x``) with the
    split ``(u, u)``.  The comparison is an isomorphism iff this
    identification is well defined on classes and respects the lattice
    operations of the pair generators.
    """
    hm, hn = MemberHandle(cat, m), MemberHandle(cat, n)
    hmn = handle_for(cat, mn) if mn is not None else ProductHandle(cat, m, n)
    N = cat.family[n]
    lm_m = lm_m or lm_compute(cat, hm)
    lm_n = lm_n or lm_compute(cat, hn)
    for lm in (lm_m, lm_n):
        if lm.lattice is None:
            return ProductCheck(False, None, True, "a factor LM is incomplete at this bound")
    lm_mn = lm_mn or lm_compute(cat, hmn)
    mapping: dict = {}
    for k, c in enumerate(lm_mn.nodes):
        z = lm_mn.context(k)
        a = tuple(e // N.size(s) for s, e in c)
        b = tuple(e % N.size(s) for s, e in c)
        for d in lm_mn.node_sets[k]:
            img = (lm_m.class_at(z, a, d), lm_n.class_at(z, b, d))
            cls = lm_mn.class_of[(k, d)]
            if mapping.setdefault(cls, img) != img:
                return ProductCheck(False, None, False, f"comparison not well defined at class {cls}")
    size_n = lm_n.lattice.n
    mp = tuple(mapping[c][0] * size_n + mapping[c][1] for c in range(len(lm_mn)))
    target = lm_m.lattice.n * size_n
    P = product_lattice(lm_m.lattice, lm_n.lattice)
    unresolved = 0
    for x in range(len(lm_mn)):
        for y in range(x + 1, len(lm_mn)):
            spots = _common(lm_mn, x, y)
            if not spots:
                unresolved += 1
                continue
            node, dx, dy = spots[0]
            if mp[lm_mn.class_of[(node, dx & dy)]] != P.meet[mp[x]][mp[y]] or \
               mp[lm_mn.class_of[(node, dx | dy)]] != P.join[mp[x]][mp[y]]:
                return ProductCheck(False, mp, False, f"operations on classes {x}, {y} not preserved",
                                    len(lm_mn), target, unresolved)
    if mp[lm_mn.top] != P.top or mp[lm_mn.bot] != P.bot:
        return ProductCheck(False, mp, False, "bounds not preserved", len(lm_mn), target, unresolved)
    return ProductCheck(True, mp, False, "", len(lm_mn), target, unresolved)


def coherent_product_comparison(cat: SemCat, m: int, n: int, mn: int) -> tuple[int, int]:
    """Sizes of ``L`` of the structure product (a coherent model) and of ``LM x LN``.

    Diagnostic only: the structure product evaluates disjunctions as unions
    of products, so it is not the product of the two functors and its ``L``
    generally differs (a model times the one-point model is the model again).
    """
    lm_p = lm_compute(cat, mn)
    return len(lm_p), len(lm_compute(cat, m)) * len(lm_compute(cat, n))


# ---------------------------------------------------------------------------
# bounded search for a positively closed continuation


def candidate_models(sig, size_bound: int):
    """All structures with every carrier of size ``1..size_bound``, smallest first."""
    sorts = list(sig.sorts)
    for total in range(len(sorts), len(sorts) * size_bound + 1):
        for sizes in product(range(1, size_bound + 1), repeat=len(sorts)):
            if sum(sizes) != total:
                continue
            sz = dict(zip(sorts, sizes))
            rel_spaces = []
            for r, ar in sig.relations.items():
                tuples = list(product(*[range(sz[s]) for s in ar]))
                rel_spaces.append((r, tuples))
            fun_spaces = []
            for f, (dom, cod) in sig.functions.items():
                keys = list(product(*[range(sz[s]) for s in dom]))
                fun_spaces.append((f, keys, sz[cod]))
            rel_choices = [range(1 << len(t)) for _, t in rel_spaces]
            fun_choices = [product(range(k), repeat=len(keys)) for _, keys, k in fun_spaces]
            fun_lists = [list(c) for c in fun_choices]
            for rbits in product(*rel_choices):
                rels = {r: frozenset(t for i, t in enumerate(tuples) if bits >> i & 1)
                        for (r, tuples), bits in zip(rel_spaces, rbits)}
                for fvals in product(*fun_lists):
                    funcs = {f: dict(zip(keys, vals)) for (f, keys, _), vals in zip(fun_spaces, fvals)}
                    carriers = {s: tuple(str(i) for i in range(sz[s])) for s in sorts}
                    yield FinModel(sig, carriers, dict(rels), funcs, name=f"cand{'x'.join(map(str, sizes))}")


@dataclass
class SearchResult:
    found: bool
    model: FinModel | None
    steps: int
    path: list
    open_triples: list


def search_positively_closed(cat: SemCat, start: int = 0, size_bound: int = 2, step_bound: int = 3,
                             candidate_cap: int = 5000, hom_cap: int = 2000) -> SearchResult:
    """Follow homomorphisms towards a positively closed model of ``cat``.

    At each step the first failing triple ``(u, x, a)`` is taken and
    candidate models (models of ``cat``, smallest first) are scanned for a
    homomorphism ``h`` that settles it: ``h(a)`` lands in ``u`` or in a
    definable set disjoint from ``u``.  Never concludes that no positively
    closed model exists.
    """
    current = cat.family[start]
    handle = MemberHandle(cat, start)
    path = [current.label()]
    for step in range(step_bound + 1):
        r = is_positively_closed_direct(cat, handle)
        if r.closed:
            return SearchResult(True, current, step, path, [])
        if step == step_bound:
            return SearchResult(False, None, step, path, [r.counterexample])
        u, x, a = r.counterexample
        moved = False
        for k, N in enumerate(candidate_models(cat.sig, size_bound)):
            if k >= candidate_cap:
                break
            cand = ExternalHandle(cat, N)
            if cand.coherence_failures():
                continue
            for h in enumerate_homomorphisms(current, N, hom_cap):
                b = h.on_tuple(x, a)
                ps = cand.psi(x, b)
                if ps & ~u.mask == 0 or ps & u.mask == 0:
                    current, handle = N, cand
                    path.append(N.label())
                    moved = True
                    break
            if moved:
                break
        if not moved:
            return SearchResult(False, None, step, path, [r.counterexample])
    return SearchResult(False, None, step_bound, path, [])


# ---------------------------------------------------------------------------
# posetal import


class ImportCapError(InvariantError):
    """The sentence lattice of the encoding is not the lattice being imported."""


@dataclass
class PosetalImport:
    lattice: FinDistLattice
    prime: frozenset
    cat: SemCat
    member: int
    sentence_map: tuple  # element of K -> class representative mask at the empty context
    lm: LMLattice
    quotient: object
    iso: list | None

    @property
    def ok(self) -> bool:
        return self.iso is not None


def posetal_import(K: FinDistLattice, p, max_lattice: int = 4096) -> PosetalImport:
    """Load ``K`` as a category of sentences and compare ``L`` of ``p`` with ``K/p``.

    One sort per element of ``K``; one model per prime filter ``q`` in which
    sort ``k`` has a single element iff ``k`` is in ``q``.  The sentence
    "sort k is inhabited" then holds exactly in the models of the prime
    filters containing ``k``, so the sentences form a copy of ``K``.
    """
    from .dlat import PrimeFilter, lattice_isomorphism, prime_filter_violation, quotient_by_prime
    from .syntax import Signature

    member = frozenset(p.member if isinstance(p, PrimeFilter) else p)
    bad = prime_filter_violation(K, member)
    if bad is not None:
        from .dlat import NotPrimeError
        raise NotPrimeError(f"not a prime filter: {bad}", bad)
    sorts = [f"k{i}" for i in range(K.n)]
    sig = Signature(sorts, {}, {})
    primes = prime_filters(K)
    family = []
    for q in primes:
        carriers = {f"k{i}": ("*",) if i in q.member else () for i in range(K.n)}
        family.append(FinModel(sig, carriers, {}, {}, name="q" + "_".join(map(str, sorted(q.member)))))
    idx = next((k for k, q in enumerate(primes) if q.member == member), None)
    cat = SemCat(family, 1, max_lattice)
    # the point of the empty context in member q is bit q
    sentence = []
    for i in range(K.n):
        mask = 0
        for k, q in enumerate(primes):
            if i in q.member:
                mask |= 1 << cat.point((), k, ())
        if not cat.is_definable((), mask):
            raise ImportCapError(f"element {i} has no defining sentence")
        sentence.append(mask)
    if len(set(sentence)) != K.n or cat.lattice_size(()) != K.n:
        raise ImportCapError("sentence lattice differs from the imported lattice")
    for a in range(K.n):
        for b in range(K.n):
            if sentence[K.meet[a][b]] != sentence[a] & sentence[b] or \
               sentence[K.join[a][b]] != sentence[a] | sentence[b]:
                raise ImportCapError("sentence operations differ from the imported lattice")
    lm = lm_compute(cat, idx)
    Q = quotient_by_prime(K, member)
    iso = lattice_isomorphism(lm.lattice, Q.lattice) if lm.lattice is not None else None
    return PosetalImport(K, member, cat, idx, tuple(sentence), lm, Q, iso)
