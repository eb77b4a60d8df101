import random

import pytest

from brute_lm import brute_lm_size
from corpus_gen import random_model, random_signature
from posmodel.dlat import boolean_algebra, chain, quotient_by_prime
from posmodel.invariant import (
    check_hom_elementarity_vs_tp, is_positively_closed_direct, l_of_hom,
    lm_compute, lm_product_check, nat_transformations_to_typespace, posetal_import,
    search_positively_closed, tp, tp_transformation_index, verify_nat_transformation,
)
from posmodel.model import enumerate_homomorphisms, make_model, terminal_model
from posmodel.semcat import SemCat
from posmodel.syntax import parse_theory

UNARY = parse_theory("sort A\nrel R : A").signature


@pytest.fixture
def r0():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]}, name="r0")
    return SemCat([M], 2)


@pytest.fixture
def full():
    # each element named by its own relation: every subset is definable
    sig = parse_theory("sort A\nrel R : A\nrel S : A").signature
    M = make_model(sig, {"A": 2}, {"R": [(0,)], "S": [(1,)]}, name="powerset")
    return SemCat([M], 2)


def test_r0_invariant_is_three(r0):
    lm = lm_compute(r0, 0)
    assert len(lm) == 3 and lm.complete
    assert brute_lm_size(SemCat(r0.family, 4)) == 3


def test_r0_not_positively_closed(r0):
    r = is_positively_closed_direct(r0, 0)
    assert not r.closed
    u, x, a = r.counterexample
    assert x == ("A",) and a == (1,)
    assert r0.component_set(u, 0) == {(0,)}


def test_positively_closed_gives_two(full):
    assert is_positively_closed_direct(full, 0).closed
    lm = lm_compute(full, 0)
    assert len(lm) == 2 and lm.is_two()


def test_lm_never_trivial():
    rng = random.Random(2)
    for _ in range(20):
        sig = random_signature(rng, max_sorts=2)
        C = SemCat([random_model(rng, sig, 3)], 2)
        lm = lm_compute(C, 0)
        assert len(lm) >= 2 and lm.top != lm.bot


def test_lm_matches_brute_force_classes():
    rng = random.Random(1)
    for _ in range(30):
        sig = random_signature(rng, max_sorts=2, max_rels=2)
        C = SemCat([random_model(rng, sig, 2)], 4)
        assert len(lm_compute(C, 0, pair_bound=2)) == brute_lm_size(C)


def test_tp_of_zero(r0):
    t = tp(r0, 0, ("A",), (0,))
    inside = {frozenset(r0.component_set(d, 0)) for d in r0.elements(("A",)) if d in t}
    assert inside == {frozenset({(0,)}), frozenset({(0,), (1,)})}


def test_transformations_on_three_element_invariant(r0):
    lm = lm_compute(r0, 0)
    taus = nat_transformations_to_typespace(r0, 0, lm)
    assert len(taus) == 2
    for t in taus:
        assert verify_nat_transformation(r0, 0, t) == []
    k = tp_transformation_index(lm, taus)
    assert k is not None
    other = taus[1 - k]
    # pointwise comparable: the tp transformation sits below the other one
    for x in r0.contexts:
        for a in r0.family[0].tuples(x):
            g_tp = taus[k].type_at(x, a).generator
            g_other = other.type_at(x, a).generator
            assert g_tp & ~g_other == 0 or g_other & ~g_tp == 0


def test_unique_transformation_when_positively_closed(full):
    lm = lm_compute(full, 0)
    taus = nat_transformations_to_typespace(full, 0, lm)
    assert len(taus) == 1 and tp_transformation_index(lm, taus) == 0
    for x in full.contexts:
        for a in full.family[0].tuples(x):
            assert taus[0].type_at(x, a) == tp(full, 0, x, a)


def brute_tp(cat, i, x, a):
    p = cat.point(x, i, a)
    return frozenset(d.mask for d in cat.elements(x) if d.mask >> p & 1)


def test_elementarity_equals_type_preservation():
    rng = random.Random(4)
    seen = 0
    for _ in range(12):
        sig = random_signature(rng, max_sorts=1, max_rels=2)
        M, N = random_model(rng, sig, 2, name="M"), random_model(rng, sig, 3, name="N")
        C = SemCat([M, N], 2)
        for h in enumerate_homomorphisms(M, N, cap=50):
            ag = check_hom_elementarity_vs_tp(C, h)
            same = all(brute_tp(C, 0, x, a) == brute_tp(C, 1, x, h.on_tuple(x, a))
                       for x in C.contexts for a in M.tuples(x))
            assert ag.elementary == same
            seen += 1
    assert seen > 0


def test_homs_into_positively_closed_target_give_bounded_surjections():
    sig = UNARY
    M = make_model(sig, {"A": 2}, {"R": [(0,)]}, name="M")
    N = make_model(sig, {"A": 1}, {"R": [(0,)]}, name="N")
    C = SemCat([M, N], 2)
    lmM, lmN = lm_compute(C, 0), lm_compute(C, 1)
    assert lmN.is_two()
    for h in enumerate_homomorphisms(M, N):
        f = l_of_hom(C, h, lmM, lmN)
        assert f.well_defined and f.homomorphism
        assert set(f.mapping) == {lmN.bot, lmN.top}


def test_product_with_terminal_model():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]}, name="M")
    one = terminal_model(UNARY)
    C = SemCat([M, one], 3)
    r = lm_product_check(C, 0, 1)
    assert r.iso and not r.flagged
    assert r.target_size == len(lm_compute(C, 0)) * len(lm_compute(C, 1))


def test_product_random_pairs():
    rng = random.Random(8)
    for _ in range(5):
        sig = random_signature(rng, max_sorts=2, max_rels=2)
        C = SemCat([random_model(rng, sig, 2), random_model(rng, sig, 2)], 3)
        r = lm_product_check(C, 0, 1)
        assert r.iso and not r.flagged, r.reason


def test_search_from_r0(r0):
    res = search_positively_closed(SemCat(r0.family, 3), 0, size_bound=3)
    assert res.found
    assert res.steps == 1
    assert res.model.size("A") == 1 and res.model.rels["R"] == {(0,)}


@pytest.mark.parametrize("L,p,size", [
    (chain(2), {1}, 2),
    (chain(3), {2}, 3),
    (chain(3), {1, 2}, 2),
    (boolean_algebra(2), {1, 3}, 2),
])
def test_posetal_import_examples(L, p, size):
    res = posetal_import(L, p)
    assert res.ok
    assert len(res.lm) == size == quotient_by_prime(L, p).lattice.n

