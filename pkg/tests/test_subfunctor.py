import random

import pytest

from corpus_gen import random_model, random_signature
from posmodel.invariant import is_positively_closed_direct
from posmodel.model import make_model
from posmodel.semcat import SemCat
from posmodel.subfunctor import (
    SortSubsetFamily, corrupt, poscl_subfunctor_check, tv_check, tv_extend, verify_subfunctor,
)
from posmodel.syntax import parse_theory

EDGE = parse_theory("sort A\nrel R : A A").signature


@pytest.fixture
def edge():
    return SemCat([make_model(EDGE, {"A": 2}, {"R": [(0, 1)]})], 3)


def test_dropping_a_witness_fails(edge):
    fam = SortSubsetFamily({"A": frozenset({0})})
    assert not tv_check(edge, 0, fam).holds
    r = tv_check(edge, 0, fam, include_sentences=False)
    assert not r.holds
    phi, x, k, t = r.violation
    # 0 has an R-successor in M, and every such witness lies outside N
    assert t == (0,)
    wits = {tt[:k] for tt in edge.component_set(phi, 0) if tt[k:] == t}
    assert wits and not any(fam.contains(x[:k], w) for w in wits)
    assert not poscl_subfunctor_check(edge, 0, fam).holds


def test_full_family_passes(edge):
    fam = SortSubsetFamily.full(edge.family[0])
    assert tv_check(edge, 0, fam).holds
    ext = tv_extend(edge, 0, fam)
    assert verify_subfunctor(edge, 0, ext).ok


def test_hand_tables():
    # R = {(0,0)} on {0,1}: N = {0} keeps the loop
    C = SemCat([make_model(EDGE, {"A": 2}, {"R": [(0, 0)]})], 2)
    fam = SortSubsetFamily({"A": frozenset({0})})
    assert tv_check(C, 0, fam).holds
    ext = tv_extend(C, 0, fam)
    assert ext.obj(("A", "A")) == {(0, 0)}
    for d, rows in ext.tables.items():
        assert rows == ext.obj(d.context) & C.component_set(d, 0)
    assert verify_subfunctor(C, 0, ext).ok


def test_corrupted_extension_is_rejected(edge):
    ext = tv_extend(edge, 0, SortSubsetFamily.full(edge.family[0]))
    assert not verify_subfunctor(edge, 0, corrupt(ext)).ok


def test_empty_family_and_sentences(edge):
    fam = SortSubsetFamily.empty(edge.family[0])
    # the sentence "A is inhabited" holds in M but not in an empty N
    assert not tv_check(edge, 0, fam).holds
    assert tv_check(edge, 0, fam, include_sentences=False).holds


def test_positively_closed_model_full_family():
    sig = parse_theory("sort A\nrel R : A\nrel S : A").signature
    M = make_model(sig, {"A": 2}, {"R": [(0,)], "S": [(1,)]})
    C = SemCat([M], 2)
    assert is_positively_closed_direct(C, 0).closed
    r = poscl_subfunctor_check(C, 0, SortSubsetFamily.full(M))
    assert r.holds
    assert is_positively_closed_direct(C, r.extension).closed


def test_validation():
    M = make_model(EDGE, {"A": 2}, {})
    with pytest.raises(ValueError):
        SortSubsetFamily({"A": frozenset({5})}).validate(M)
    with pytest.raises(ValueError):
        SortSubsetFamily({"B": frozenset()}).validate(M)


def test_tv_agrees_with_verification_on_random_families():
    rng = random.Random(21)
    for _ in range(25):
        sig = random_signature(rng, max_sorts=2, max_rels=2)
        M = random_model(rng, sig, 3)
        C = SemCat([M], 2)
        fam = SortSubsetFamily({s: frozenset(e for e in range(M.size(s)) if rng.random() < 0.6)
                                for s in sig.sorts})
        tv = tv_check(C, 0, fam).holds
        assert verify_subfunctor(C, 0, tv_extend(C, 0, fam, check=False)).ok == tv
        if poscl_subfunctor_check(C, 0, fam).holds:
            assert tv
