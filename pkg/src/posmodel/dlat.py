"""Finite distributive lattices: validation, prime-filter spectra, Birkhoff
duality, Krull dimension and quotients by prime filters.

Elements are the integers ``0..n-1``.  Orders are stored as bitmasks:
``down[a]`` has bit ``b`` set iff ``b <= a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence


class LatticeError(ValueError):
    """Raised when candidate data does not describe a bounded distributive lattice."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class TrivialLatticeError(LatticeError):
    pass


class NotPrimeError(LatticeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Inconclusive(RuntimeError):
    pass


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass
class ValidationReport:
    malformed: list[str] = field(default_factory=list)
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.malformed and not self.violations

    def kinds(self) -> set[str]:
        return {v[0] for v in self.violations}


def check_distributive(n, leq, meet=None, join=None, limit: int | None = None) -> ValidationReport:
    """Validate candidate lattice data.

    ``leq`` is an ``n x n`` boolean matrix.  Optional ``meet``/``join`` tables are
    compared against the operations derived from ``leq``.  Malformed input
    (wrong shapes, out-of-range entries) is reported in ``malformed`` and stops
    the axiom checks; axiom failures go to ``violations`` as tuples whose first
    entry names the axiom.
    """
    rep = ValidationReport()
    if not isinstance(n, int) or n < 0:
        rep.malformed.append(f"size must be a non-negative integer, got {n!r}")
        return rep
    if len(leq) != n or any(len(row) != n for row in leq):
        rep.malformed.append("leq is not an n x n table")
        return rep
    for name, tab in (("meet", meet), ("join", join)):
        if tab is None:
            continue
        if len(tab) != n or any(len(row) != n for row in tab):
            rep.malformed.append(f"{name} table is not total on 0..{n - 1}")
            continue
        for a, row in enumerate(tab):
            for b, v in enumerate(row):
                if not isinstance(v, int) or not 0 <= v < n:
                    rep.malformed.append(f"{name}[{a}][{b}] = {v!r} out of range")
    if rep.malformed:
        return rep
    if n == 0:
        rep.violations.append(("empty",))
        return rep

    def full():
        return limit is not None and len(rep.violations) >= limit

    down = [sum(1 << b for b in range(n) if leq[b][a]) for a in range(n)]
    up = [sum(1 << b for b in range(n) if leq[a][b]) for a in range(n)]
    for a in range(n):
        if not leq[a][a]:
            rep.violations.append(("reflexivity", a))
    for a in range(n):
        for b in range(a + 1, n):
            if leq[a][b] and leq[b][a]:
                rep.violations.append(("antisymmetry", a, b))
    for a in range(n):
        for b in _bits(up[a]):
            if up[b] & ~up[a]:
                c = _bits(up[b] & ~up[a])[0]
                rep.violations.append(("transitivity", a, b, c))
    if rep.violations:
        return rep

    by_down = {m: a for a, m in enumerate(down)}
    by_up = {m: a for a, m in enumerate(up)}
    dmeet = [[-1] * n for _ in range(n)]
    djoin = [[-1] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            lo = down[a] & down[b]
            hi = up[a] & up[b]
            g = by_down.get(lo, -1)
            if g < 0 or not lo:
                rep.violations.append(("meet-missing", a, b))
            else:
                dmeet[a][b] = g
            l_ = by_up.get(hi, -1)
            if l_ < 0 or not hi:
                rep.violations.append(("join-missing", a, b))
            else:
                djoin[a][b] = l_
            if full():
                return rep
    if rep.violations:
        return rep
    for name, tab, derived in (("meet", meet, dmeet), ("join", join, djoin)):
        if tab is None:
            continue
        for a in range(n):
            for b in range(n):
                if tab[a][b] != derived[a][b]:
                    rep.violations.append((f"{name}-table-mismatch", a, b, tab[a][b], derived[a][b]))
    bots = [a for a in range(n) if up[a] == (1 << n) - 1]
    tops = [a for a in range(n) if down[a] == (1 << n) - 1]
    if not bots:
        rep.violations.append(("no-bottom",))
    if not tops:
        rep.violations.append(("no-top",))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                lhs = dmeet[a][djoin[b][c]]
                rhs = djoin[dmeet[a][b]][dmeet[a][c]]
                if lhs != rhs:
                    rep.violations.append(("distributivity", a, b, c))
                    if full():
                        return rep
    return rep


@dataclass(frozen=True, eq=False)
class FinDistLattice:
    """A bounded distributive lattice on ``0..n-1`` with explicit tables."""

    n: int
    down: tuple[int, ...]
    up: tuple[int, ...]
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    bot: int
    top: int
    labels: tuple | None = None

    # -- construction -------------------------------------------------
    @classmethod
    def from_leq(cls, leq, meet=None, join=None, labels=None) -> "FinDistLattice":
        n = len(leq)
        rep = check_distributive(n, leq, meet, join, limit=8)
        if not rep.ok:
            raise LatticeError(f"invalid lattice: {rep.malformed or rep.violations[:4]}", rep)
        down = tuple(sum(1 << b for b in range(n) if leq[b][a]) for a in range(n))
        return cls._from_down(down, labels)

    @classmethod
    def from_relation(cls, n: int, pairs: Iterable[tuple[int, int]], labels=None) -> "FinDistLattice":
        """Build from generating pairs ``(i, j)`` meaning ``i <= j``; reflexive-transitive closure taken."""
        up = [1 << a for a in range(n)]
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise LatticeError(f"pair ({i}, {j}) out of range 0..{n - 1}")
            up[i] |= 1 << j
        changed = True
        while changed:
            changed = False
            for a in range(n):
                acc = up[a]
                for b in _bits(up[a]):
                    acc |= up[b]
                if acc != up[a]:
                    up[a] = acc
                    changed = True
        leq = [[bool(up[a] >> b & 1) for b in range(n)] for a in range(n)]
        return cls.from_leq(leq, labels=labels)

    @classmethod
    def _from_down(cls, down: Sequence[int], labels=None) -> "FinDistLattice":
        n = len(down)
        up = [0] * n
        for a in range(n):
            for b in _bits(down[a]):
                up[b] |= 1 << a
        by_down = {m: a for a, m in enumerate(down)}
        by_up = {m: a for a, m in enumerate(up)}
        meet = tuple(tuple(by_down[down[a] & down[b]] for b in range(n)) for a in range(n))
        join = tuple(tuple(by_up[up[a] & up[b]] for b in range(n)) for a in range(n))
        full = (1 << n) - 1
        bot = next(a for a in range(n) if up[a] == full)
        top = next(a for a in range(n) if down[a] == full)
        return cls(n, tuple(down), tuple(up), meet, join, bot, top,
                   tuple(labels) if labels is not None else None)

    @classmethod
    def from_sets(cls, sets: Sequence, labels=None) -> "FinDistLattice":
        """Lattice of a family of sets (frozensets or int bitmasks) closed under
        intersection and union, ordered by inclusion."""
        masks = list(sets)
        if masks and not isinstance(masks[0], int):
            universe = sorted(set().union(*masks), key=repr)
            pos = {e: i for i, e in enumerate(universe)}
            masks = [sum(1 << pos[e] for e in s) for s in masks]
        return cls.from_subset_masks(masks, labels)

    @classmethod
    def from_subset_masks(cls, masks: Sequence, labels=None) -> "FinDistLattice":
        """Masks may be ints or tuples of ints (compared componentwise)."""
        n = len(masks)
        index = {m: i for i, m in enumerate(masks)}
        if len(index) != n:
            raise LatticeError("duplicate sets")
        if masks and isinstance(masks[0], tuple):
            def sub(a, b):
                return all(x & ~y == 0 for x, y in zip(a, b))

            def cap(a, b):
                return tuple(x & y for x, y in zip(a, b))

            def cup(a, b):
                return tuple(x | y for x, y in zip(a, b))
        else:
            def sub(a, b):
                return a & ~b == 0

            def cap(a, b):
                return a & b

            def cup(a, b):
                return a | b
        down = tuple(sum(1 << b for b in range(n) if sub(masks[b], masks[a])) for a in range(n))
        up = [0] * n
        for a in range(n):
            for b in _bits(down[a]):
                up[b] |= 1 << a
        try:
            meet = tuple(tuple(index[cap(masks[a], masks[b])] for b in range(n)) for a in range(n))
            join = tuple(tuple(index[cup(masks[a], masks[b])] for b in range(n)) for a in range(n))
        except KeyError as exc:
            raise LatticeError("family not closed under intersection/union") from exc
        full = (1 << n) - 1
        bots = [a for a in range(n) if up[a] == full]
        tops = [a for a in range(n) if down[a] == full]
        if not bots or not tops:
            raise LatticeError("family has no least or greatest set")
        return cls(n, down, tuple(up), meet, join, bots[0], tops[0],
                   tuple(labels) if labels is not None else None)

    # -- queries ------------------------------------------------------
    def leq(self, a: int, b: int) -> bool:
        return bool(self.down[b] >> a & 1)

    def leq_matrix(self) -> list[list[bool]]:
        return [[self.leq(a, b) for b in range(self.n)] for a in range(self.n)]

    def below(self, a: int) -> list[int]:
        return _bits(self.down[a])

    def above(self, a: int) -> list[int]:
        return _bits(self.up[a])

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs ``(i, j)``: ``i < j`` with nothing strictly between."""
        out = []
        for j in range(self.n):
            strict = self.down[j] & ~(1 << j)
            for i in _bits(strict):
                between = strict & self.up[i] & ~(1 << i)
                if not between:
                    out.append((i, j))
        return out

    def join_irreducibles(self) -> list[int]:
        """Elements covering exactly one element (``bot`` excluded)."""
        counts = [0] * self.n
        for i, j in self.covers():
            counts[j] += 1
        return [j for j in range(self.n) if counts[j] == 1]

    def atoms(self) -> list[int]:
        return [j for i, j in self.covers() if i == self.bot]

    def implication(self, x: int, s: int) -> int:
        """Largest ``a`` with ``a & x <= s``."""
        acc = self.bot
        for a in range(self.n):
            if self.leq(self.meet[a][x], s):
                acc = self.join[acc][a]
        return acc

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"FinDistLattice(n={self.n}, covers={self.covers()})"


# ---------------------------------------------------------------------------
# prime filters and spectra


@dataclass(frozen=True)
class PrimeFilter:
    member: frozenset
    generator: int | None = field(default=None, compare=False)

    def __contains__(self, a) -> bool:
        return a in self.member

    def __len__(self) -> int:
        return len(self.member)

    def __le__(self, other: "PrimeFilter") -> bool:
        return self.member <= other.member

    def __lt__(self, other: "PrimeFilter") -> bool:
        return self.member < other.member


def prime_filter_violation(L: FinDistLattice, member: Iterable[int]):
    """Return ``None`` if ``member`` is a prime filter of ``L``, otherwise a
    tuple naming the first violated axiom and its witnesses."""
    p = frozenset(member)
    if L.top not in p:
        return ("top-missing",)
    if L.bot in p:
        return ("not-proper",)
    for a in p:
        for b in L.above(a):
            if b not in p:
                return ("not-upward-closed", a, b)
    for a in p:
        for b in p:
            if L.meet[a][b] not in p:
                return ("not-meet-closed", a, b)
    for a in range(L.n):
        for b in range(a, L.n):
            if L.join[a][b] in p and a not in p and b not in p:
                return ("not-prime", a, b)
    return None


def is_prime_filter(L: FinDistLattice, member: Iterable[int]) -> bool:
    return prime_filter_violation(L, member) is None


def prime_filters(L: FinDistLattice) -> list[PrimeFilter]:
    """Prime filters as principal filters on join-irreducibles, ordered by generator."""
    if L.n < 2:
        raise TrivialLatticeError("trivial lattice has no prime filters")
    return [PrimeFilter(frozenset(L.above(j)), j) for j in L.join_irreducibles()]


@dataclass(frozen=True, eq=False)
class SpecSpace:
    lattice: FinDistLattice
    points: tuple[PrimeFilter, ...]
    specialization: tuple[tuple[bool, ...], ...]  # [q][p]: q <= p
    basic_opens: tuple[frozenset, ...]  # element -> point indices

    def closure(self, p: int) -> frozenset:
        """Closure of a point computed from basic opens only."""
        out = set(range(len(self.points)))
        for opn in self.basic_opens:
            if p not in opn:
                out -= opn
        return frozenset(out)

    def open_sets(self) -> set[frozenset]:
        return set(self.basic_opens)

    def is_open(self, pts: Iterable[int]) -> bool:
        return frozenset(pts) in set(self.basic_opens)

    def index_of(self, member: Iterable[int]) -> int:
        m = frozenset(member)
        for i, p in enumerate(self.points):
            if p.member == m:
                return i
        raise KeyError(m)

    def hasse(self) -> list[tuple[int, int]]:
        k = len(self.points)
        out = []
        for q in range(k):
            for p in range(k):
                if q != p and self.specialization[q][p]:
                    if not any(r not in (q, p) and self.specialization[q][r] and self.specialization[r][p]
                               for r in range(k)):
                        out.append((q, p))
        return out


def spec(L: FinDistLattice) -> SpecSpace:
    pts = tuple(prime_filters(L))
    spz = tuple(tuple(q.member <= p.member for p in pts) for q in pts)
    opens = tuple(frozenset(i for i, p in enumerate(pts) if a in p.member) for a in range(L.n))
    return SpecSpace(L, pts, spz, opens)


# ---------------------------------------------------------------------------
# Birkhoff duality and isomorphism


class SizeLimitExceeded(LatticeError):
    pass


def down_sets(n: int, below: Sequence[int], limit: int | None = None) -> list[int]:
    """All down-sets (as bitmasks) of a poset on ``0..n-1``; ``below[i]`` is the
    bitmask of elements strictly below ``i``.  More than ``limit`` results
    raises ``SizeLimitExceeded``."""
    # order elements so that everything below comes first
    order = sorted(range(n), key=lambda i: bin(below[i]).count("1"))
    out = []

    def rec(k, acc):
        if k == len(order):
            out.append(acc)
            if limit is not None and len(out) > limit:
                raise SizeLimitExceeded(f"more than {limit} down-sets")
            return
        i = order[k]
        rec(k + 1, acc)
        if below[i] & ~acc == 0:
            rec(k + 1, acc | 1 << i)

    # inclusion of i requires its down-set; since we decide in rank order, an
    # excluded element forces exclusion of everything above it automatically
    rec(0, 0)
    return sorted(out, key=lambda m: (bin(m).count("1"), m))


@dataclass(frozen=True, eq=False)
class BirkhoffResult:
    lattice: FinDistLattice
    join_irreducibles: tuple[int, ...]
    witness: tuple[int, ...]  # element of L -> element of the rebuilt lattice


def birkhoff_roundtrip(L: FinDistLattice) -> BirkhoffResult:
    J = L.join_irreducibles()
    pos = {j: k for k, j in enumerate(J)}
    below = [sum(1 << pos[i] for i in J if i != j and L.leq(i, j)) for j in J]
    dsets = down_sets(len(J), below)
    rebuilt = FinDistLattice.from_subset_masks(dsets)
    index = {m: k for k, m in enumerate(dsets)}
    witness = []
    for x in range(L.n):
        m = sum(1 << pos[j] for j in J if L.leq(j, x))
        if m not in index:
            raise LatticeError(f"Birkhoff map sends {x} outside the down-set lattice")
        witness.append(index[m])
    if len(set(witness)) != L.n or rebuilt.n != L.n:
        raise LatticeError("Birkhoff map is not bijective")
    for a in range(L.n):
        for b in range(L.n):
            if L.leq(a, b) != rebuilt.leq(witness[a], witness[b]):
                raise LatticeError(f"Birkhoff map does not preserve order at ({a}, {b})")
    return BirkhoffResult(rebuilt, tuple(J), tuple(witness))


def _poset_iso(n, below1, below2):
    """Backtracking isomorphism between posets given by strict-below bitmasks."""
    if len(below2) != n:
        return None
    inv1 = [(bin(below1[i]).count("1"), sum(1 for j in range(n) if below1[j] >> i & 1)) for i in range(n)]
    inv2 = [(bin(below2[i]).count("1"), sum(1 for j in range(n) if below2[j] >> i & 1)) for i in range(n)]
    if sorted(inv1) != sorted(inv2):
        return None
    order = sorted(range(n), key=lambda i: inv1[i])
    img = [-1] * n
    used = [False] * n

    def rec(k):
        if k == n:
            return True
        i = order[k]
        for c in range(n):
            if used[c] or inv2[c] != inv1[i]:
                continue
            ok = True
            for kk in range(k):
                j = order[kk]
                if (below1[i] >> j & 1) != (below2[c] >> img[j] & 1) or \
                        (below1[j] >> i & 1) != (below2[img[j]] >> c & 1):
                    ok = False
                    break
            if ok:
                img[i] = c
                used[c] = True
                if rec(k + 1):
                    return True
                used[c] = False
        img[i] = -1
        return False

    return list(img) if rec(0) else None


def lattice_isomorphism(L1: FinDistLattice, L2: FinDistLattice) -> list[int] | None:
    """Isomorphism ``L1 -> L2`` as a list, or ``None``.

    Reduced to the posets of join-irreducibles; the lattice map is rebuilt from
    the poset map and verified.
    """
    if L1.n != L2.n:
        return None
    J1, J2 = L1.join_irreducibles(), L2.join_irreducibles()
    if len(J1) != len(J2):
        return None
    p1 = {j: k for k, j in enumerate(J1)}
    p2 = {j: k for k, j in enumerate(J2)}
    b1 = [sum(1 << p1[i] for i in J1 if i != j and L1.leq(i, j)) for j in J1]
    b2 = [sum(1 << p2[i] for i in J2 if i != j and L2.leq(i, j)) for j in J2]
    pm = _poset_iso(len(J1), b1, b2)
    if pm is None:
        return None
    jmap = {J1[k]: J2[pm[k]] for k in range(len(J1))}
    phi = []
    for x in range(L1.n):
        acc = L2.bot
        for j in J1:
            if L1.leq(j, x):
                acc = L2.join[acc][jmap[j]]
        phi.append(acc)
    if not is_lattice_isomorphism(L1, L2, phi):
        return None
    return phi


def is_lattice_homomorphism(L1: FinDistLattice, L2: FinDistLattice, phi: Sequence[int]) -> bool:
    if phi[L1.bot] != L2.bot or phi[L1.top] != L2.top:
        return False
    for a in range(L1.n):
        for b in range(L1.n):
            if phi[L1.meet[a][b]] != L2.meet[phi[a]][phi[b]]:
                return False
            if phi[L1.join[a][b]] != L2.join[phi[a]][phi[b]]:
                return False
    return True


def is_lattice_isomorphism(L1, L2, phi) -> bool:
    return L1.n == L2.n and len(set(phi)) == L1.n and is_lattice_homomorphism(L1, L2, phi)


# ---------------------------------------------------------------------------
# Krull dimension


def krull_dim_chains(L: FinDistLattice) -> int | None:
    """Length of the longest strict chain of prime filters; ``None`` if trivial."""
    if L.n < 2:
        return None
    pts = sorted(prime_filters(L), key=len)
    best = [0] * len(pts)
    for k, p in enumerate(pts):
        for i in range(k):
            if pts[i].member < p.member:
                best[k] = max(best[k], best[i] + 1)
    return max(best)


@dataclass(frozen=True)
class KrullStep:
    n: int
    holds: bool
    counterexample: tuple[int, ...] | None = None


@dataclass(frozen=True)
class KrullResult:
    dim: int
    steps: tuple[KrullStep, ...]


def krull_witness(L: FinDistLattice, xs: Sequence[int]) -> tuple[int, ...] | None:
    """Greedy maximal witnesses ``a_1..a_k`` for the element tuple ``xs``:
    ``a_1 & x_1 = 0``, ``a_{i+1} & x_{i+1} <= a_i | x_i``, ``a_k | x_k = 1``.
    Returns ``None`` when no witnesses exist."""
    s = L.bot
    out = []
    for x in xs:
        a = L.implication(x, s)
        out.append(a)
        s = L.join[a][x]
    return tuple(out) if s == L.top else None


def krull_condition_holds(L: FinDistLattice, xs: Sequence[int], a: Sequence[int]) -> bool:
    k = len(xs)
    if L.meet[a[0]][xs[0]] != L.bot:
        return False
    for i in range(1, k):
        if not L.leq(L.meet[a[i]][xs[i]], L.join[a[i - 1]][xs[i - 1]]):
            return False
    return L.join[a[-1]][xs[-1]] == L.top


def krull_witness_search(L: FinDistLattice, xs: Sequence[int], cutoff: int | None = None):
    """Lexicographic exhaustive search for witnesses; ``Inconclusive`` past ``cutoff`` candidates."""
    tried = 0
    for a in product(range(L.n), repeat=len(xs)):
        tried += 1
        if cutoff is not None and tried > cutoff:
            raise Inconclusive(f"witness search exceeded {cutoff} candidates")
        if krull_condition_holds(L, xs, a):
            return a
    return None


def krull_dim_algebraic(L: FinDistLattice, max_n: int | None = None) -> KrullResult:
    """Least ``n`` such that every ``(n+1)``-tuple admits witnesses.

    The quantifier over tuples is handled by propagating the reachable values
    of ``a_i | x_i`` under the greedy witness rule, so each ``n`` costs
    ``O(n * |L|^2)`` implication lookups.  ``max_n`` bounds the search and
    raises ``Inconclusive`` when exceeded.
    """
    if L.n < 2:
        raise TrivialLatticeError("Krull dimension undefined for the trivial lattice")
    imp = [[L.implication(x, s) for s in range(L.n)] for x in range(L.n)]
    steps = []
    layer = {L.bot: ()}  # state -> x-tuple reaching it
    n = 0
    limit = max_n if max_n is not None else L.n
    while True:
        nxt = {}
        for s, xs in layer.items():
            for x in range(L.n):
                t = L.join[imp[x][s]][x]
                if t not in nxt:
                    nxt[t] = xs + (x,)
        layer = nxt
        bad = [s for s in sorted(layer) if s != L.top]
        if not bad:
            steps.append(KrullStep(n, True))
            return KrullResult(n, tuple(steps))
        steps.append(KrullStep(n, False, layer[bad[0]]))
        n += 1
        if n > limit:
            raise Inconclusive(f"no dimension bound found up to {limit}")


# ---------------------------------------------------------------------------
# quotients


@dataclass(frozen=True, eq=False)
class QuotientResult:
    lattice: FinDistLattice
    qmap: tuple[int, ...]  # element of L -> class index


def congruence_of_prime(L: FinDistLattice, p: PrimeFilter) -> list[int]:
    """Class labels for ``a ~ b`` iff some ``x`` in ``p`` has ``x & a = x & b``."""
    label = [-1] * L.n
    k = 0
    for a in range(L.n):
        if label[a] >= 0:
            continue
        for b in range(a, L.n):
            if label[b] < 0 and any(L.meet[x][a] == L.meet[x][b] for x in p.member):
                label[b] = k
        k += 1
    return label


def quotient_by_prime(L: FinDistLattice, p: PrimeFilter | Iterable[int]) -> QuotientResult:
    if not isinstance(p, PrimeFilter):
        p = PrimeFilter(frozenset(p))
    bad = prime_filter_violation(L, p.member)
    if bad is not None:
        raise NotPrimeError(f"not a prime filter: {bad}", bad)
    label = congruence_of_prime(L, p)
    # the relation must be an equivalence compatible with both operations
    for a in range(L.n):
        for b in range(L.n):
            same = any(L.meet[x][a] == L.meet[x][b] for x in p.member)
            if same != (label[a] == label[b]):
                raise LatticeError(f"relation not transitive at ({a}, {b})")
            if same:
                for c in range(L.n):
                    if label[L.meet[a][c]] != label[L.meet[b][c]] or label[L.join[a][c]] != label[L.join[b][c]]:
                        raise LatticeError(f"not a congruence at ({a}, {b}, {c})")
    k = max(label) + 1
    reps = [label.index(c) for c in range(k)]
    leq = [[label[L.meet[reps[c]][reps[d]]] == c for d in range(k)] for c in range(k)]
    Q = FinDistLattice.from_leq(leq)
    return QuotientResult(Q, tuple(label))


# ---------------------------------------------------------------------------
# text format


def parse_lattice(text: str) -> FinDistLattice:
    """``dlat <n>`` header followed by covering pairs ``i < j``, one per line.

    ``#`` starts a comment.  Every listed pair must be a cover of the
    generated order.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise LatticeError("empty lattice file")
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "dlat" or not parts[1].isdigit():
        raise LatticeError(f"line {lineno}: expected header 'dlat <n>'")
    n = int(parts[1])
    pairs = []
    for lineno, line in lines[1:]:
        bits = line.replace("<", " < ").split()
        if len(bits) != 3 or bits[1] != "<" or not bits[0].isdigit() or not bits[2].isdigit():
            raise LatticeError(f"line {lineno}: expected 'i < j'")
        i, j = int(bits[0]), int(bits[2])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise LatticeError(f"line {lineno}: pair out of range")
        pairs.append((i, j))
    L = FinDistLattice.from_relation(n, pairs)
    cov = set(L.covers())
    for i, j in pairs:
        if (i, j) not in cov:
            raise LatticeError(f"pair {i} < {j} is not a covering pair")
    return L


def format_lattice(L: FinDistLattice) -> str:
    lines = [f"dlat {L.n}"]
    lines += [f"{i} < {j}" for i, j in sorted(L.covers())]
    return "\n".join(lines) + "\n"


def chain(n: int) -> FinDistLattice:
    return FinDistLattice.from_relation(n, [(i, i + 1) for i in range(n - 1)])


def boolean_algebra(k: int) -> FinDistLattice:
    masks = list(range(1 << k))
    return FinDistLattice.from_subset_masks(masks)
