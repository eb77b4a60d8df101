import random
from itertools import combinations

import pytest

from posmodel import corpus, dlat
from posmodel.dlat import (
    FinDistLattice, LatticeError, NotPrimeError, TrivialLatticeError, birkhoff_roundtrip,
    boolean_algebra, chain, check_distributive, krull_dim_algebraic, krull_dim_chains,
    lattice_isomorphism, parse_lattice, prime_filters, quotient_by_prime, spec,
)


def brute_prime_filters(L):
    """Every subset tested against the definition."""
    out = []
    for mask in range(1 << L.n):
        p = {a for a in range(L.n) if mask >> a & 1}
        if L.top not in p or L.bot in p:
            continue
        if any(L.meet[a][b] not in p for a in p for b in p):
            continue
        if any(b not in p for a in p for b in range(L.n) if L.leq(a, b)):
            continue
        if any(L.join[a][b] in p and a not in p and b not in p for a in range(L.n) for b in range(L.n)):
            continue
        out.append(frozenset(p))
    return set(out)


def brute_krull(L):
    pts = list(brute_prime_filters(L))
    best = 0

    def longest(p, memo={}):
        key = (id(L), p)
        if key not in memo:
            memo[key] = max([1 + longest(q) for q in pts if p < q], default=0)
        return memo[key]
    for p in pts:
        best = max(best, longest(p))
    return best


def m3_leq():
    # 0 < a,b,c < 1
    n = 5
    leq = [[a == b for b in range(n)] for a in range(n)]
    for a in range(n):
        leq[0][a] = True
        leq[a][4] = True
    return leq


def test_m3_is_not_distributive():
    rep = check_distributive(5, m3_leq())
    assert not rep.ok
    assert "distributivity" in rep.kinds()


def test_pentagon_reported():
    # 0 < a < b < 1, 0 < c < 1
    rel = [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]
    with pytest.raises(LatticeError):
        FinDistLattice.from_relation(5, rel)


def test_malformed_tables():
    rep = check_distributive(2, [[True]])
    assert rep.malformed and not rep.violations


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 1), (3, 1), (4, 2), (5, 3), (6, 5), (7, 8), (8, 15)])
def test_lattice_counts(n, expected):
    # distributive lattices up to isomorphism, counted by size
    assert sum(1 for L in corpus.all_lattices(8) if L.n == n) == expected


def test_chain3_spectrum():
    L = chain(3)
    S = spec(L)
    assert {p.member for p in S.points} == {frozenset({2}), frozenset({1, 2})}
    small = S.index_of({2})
    big = S.index_of({1, 2})
    assert S.specialization[small][big] and not S.specialization[big][small]


def test_free_distributive_on_two_generators_has_four_points():
    L = corpus.named_lattices()["free-xy"]
    assert len(spec(L).points) == 4


def test_prime_filters_match_brute_force_on_corpus():
    for L in corpus.all_lattices(8, min_size=2):
        assert {p.member for p in prime_filters(L)} == brute_prime_filters(L)


def test_trivial_lattice():
    L = chain(1)
    with pytest.raises(TrivialLatticeError):
        prime_filters(L)
    assert krull_dim_chains(L) is None
    with pytest.raises(TrivialLatticeError):
        krull_dim_algebraic(L)


@pytest.mark.parametrize("n", range(2, 8))
def test_chain_dimension(n):
    assert krull_dim_chains(chain(n)) == n - 2
    assert krull_dim_algebraic(chain(n)).dim == n - 2


def test_boolean_algebras_are_zero_dimensional():
    for k in range(1, 4):
        assert krull_dim_algebraic(boolean_algebra(k)).dim == 0


def test_krull_exhaustive_witness_search_agrees_on_chain3():
    L = chain(3)
    assert dlat.krull_witness_search(L, (1,)) is None  # n = 0 fails
    for xs in [(a, b) for a in range(3) for b in range(3)]:
        assert dlat.krull_witness_search(L, xs) is not None


def test_krull_against_brute_force_chains():
    for L in corpus.all_lattices(8, min_size=2):
        assert krull_dim_chains(L) == brute_krull(L)


def test_birkhoff_roundtrip_is_identity_up_to_iso():
    rng = random.Random(11)
    for _ in range(20):
        L = corpus.random_lattice(rng, 8)
        r = birkhoff_roundtrip(L)
        assert dlat.is_lattice_isomorphism(L, r.lattice, r.witness)


def test_isomorphism_found_for_relabelled_copy():
    rng = random.Random(5)
    for _ in range(10):
        L = corpus.random_lattice(rng, 8)
        perm = list(range(L.n))
        rng.shuffle(perm)
        phi = lattice_isomorphism(L, corpus.relabel(L, perm))
        assert phi is not None
        assert dlat.is_lattice_isomorphism(L, corpus.relabel(L, perm), phi)


def test_non_isomorphic_pair():
    assert lattice_isomorphism(chain(4), boolean_algebra(2)) is None


def brute_quotient_size(L, p):
    cls = set()
    for a in range(L.n):
        cls.add(frozenset(b for b in range(L.n) if any(L.meet[x][a] == L.meet[x][b] for x in p)))
    return len(cls)


def test_quotient_examples():
    L = chain(3)
    # p = {top} relates nothing: the quotient is the chain itself
    assert quotient_by_prime(L, {2}).lattice.n == brute_quotient_size(L, {2}) == 3
    assert quotient_by_prime(L, {1, 2}).lattice.n == brute_quotient_size(L, {1, 2}) == 2
    B = boolean_algebra(2)
    a = 1  # the mask {0}
    assert quotient_by_prime(B, {a, 3}).lattice.n == 2


def test_quotient_sizes_match_brute_force():
    for L in corpus.all_lattices(8, min_size=2):
        for p in prime_filters(L):
            q = quotient_by_prime(L, p)
            assert q.lattice.n == brute_quotient_size(L, p.member)
            assert q.qmap[L.top] != q.qmap[L.bot]


def test_quotient_rejects_non_prime():
    B = boolean_algebra(2)
    with pytest.raises(NotPrimeError):
        quotient_by_prime(B, {3})


def test_format_roundtrip():
    for L in corpus.all_lattices(6):
        if L.n < 2:
            continue
        M = parse_lattice(dlat.format_lattice(L))
        assert lattice_isomorphism(L, M) is not None


@pytest.mark.parametrize("text", [
    "", "lattice 3\n", "dlat 3\n0 < 7\n", "dlat 3\n0 < 2\n0 < 1\n1 < 2\n", "dlat 2\n0 - 1\n",
])
def test_parse_errors(text):
    with pytest.raises(LatticeError):
        parse_lattice(text)


def test_stone_map_is_injective_homomorphism():
    for L in corpus.all_lattices(8, min_size=2):
        S = spec(L)
        opens = S.basic_opens
        assert len(set(opens)) == L.n
        for a, b in combinations(range(L.n), 2):
            assert opens[L.meet[a][b]] == opens[a] & opens[b]
            assert opens[L.join[a][b]] == opens[a] | opens[b]
