"""Instance generators: exhaustive and random lattices, random signatures and models."""
from __future__ import annotations

import random
from itertools import product

from .dlat import FinDistLattice, _poset_iso, down_sets


def _poset_signature(below):
    n = len(below)
    return tuple(sorted((bin(below[i]).count("1"), sum(1 for j in range(n) if below[j] >> i & 1))
                        for i in range(n)))


def posets_by_downset_count(max_count: int) -> list[list[int]]:
    """All posets (up to iso, as strict-below bitmask lists) having at most
    ``max_count`` down-sets.  Grown one maximal element at a time."""
    level = [[]]
    out = [[]]
    while level:
        nxt: dict[tuple, list[list[int]]] = {}
        for below in level:
            n = len(below)
            for d in down_sets(n, below):
                cand = below + [d]
                if len(down_sets(n + 1, cand)) > max_count:
                    continue
                sig = _poset_signature(cand)
                bucket = nxt.setdefault(sig, [])
                if any(_poset_iso(n + 1, cand, other) is not None for other in bucket):
                    continue
                bucket.append(cand)
        level = [p for bucket in nxt.values() for p in bucket]
        level.sort(key=lambda p: (_poset_signature(p), p))
        out.extend(level)
    return out


def all_lattices(max_size: int, min_size: int = 1) -> list[FinDistLattice]:
    """Every distributive lattice with between ``min_size`` and ``max_size`` elements, up to iso."""
    res = []
    for below in posets_by_downset_count(max_size):
        ds = down_sets(len(below), below)
        if len(ds) >= min_size:
            res.append(FinDistLattice.from_subset_masks(ds))
    res.sort(key=lambda L: L.n)
    return res


def relabel(L: FinDistLattice, perm) -> FinDistLattice:
    """Copy of ``L`` with element ``a`` renamed ``perm[a]``."""
    n = L.n
    inv = [0] * n
    for a, b in enumerate(perm):
        inv[b] = a
    leq = [[L.leq(inv[x], inv[y]) for y in range(n)] for x in range(n)]
    return FinDistLattice.from_leq(leq)


def random_lattice(rng: random.Random, max_size: int = 20, min_size: int = 2) -> FinDistLattice:
    while True:
        k = rng.randint(1, max(1, max_size - 1))
        p = rng.choice([0.15, 0.3, 0.5, 0.7])
        below = []
        for i in range(k):
            m = 0
            for j in range(i):
                if rng.random() < p:
                    m |= (1 << j) | below[j]
            below.append(m)
        ds = down_sets(k, below)
        if min_size <= len(ds) <= max_size:
            L = FinDistLattice.from_subset_masks(ds)
            perm = list(range(L.n))
            rng.shuffle(perm)
            return relabel(L, perm)


def named_lattices() -> dict[str, FinDistLattice]:
    from .dlat import boolean_algebra, chain
    return {
        "2": chain(2),
        "3-chain": chain(3),
        "B2": boolean_algebra(2),
        "free-xy": FinDistLattice.from_relation(
            6, [(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]),
    }
