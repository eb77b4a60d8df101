import random
from itertools import product

import pytest

from corpus_gen import random_model, random_signature
from posmodel.model import make_model
from posmodel.redprod import (
    FilterError, IndexFilter, diagonal_map, los_containment, los_formula_check, reduced_product,
)
from posmodel.syntax import parse_formula, parse_theory

EDGE = parse_theory("sort A\nrel R : A A\nrel P : A").signature


def test_filter_validation():
    with pytest.raises(FilterError):
        IndexFilter(2, frozenset({frozenset({0})}))  # index set missing
    with pytest.raises(FilterError):
        IndexFilter.generated(3, [{0}, {1}])  # empty meet
    F = IndexFilter.generated(3, [{0, 1}, {1, 2}])
    assert F.core == {1} and F.ultra


def test_principal_is_ultra_iff_singleton_core():
    assert IndexFilter.principal(3, {2}).ultra
    assert not IndexFilter.principal(3, {0, 2}).ultra
    assert not IndexFilter.principal(3, {0, 1, 2}).ultra


def test_collapse_to_core_product():
    rng = random.Random(31)
    for _ in range(20):
        sig = random_signature(rng, max_sorts=2, max_rels=2)
        n = rng.randint(1, 3)
        models = [random_model(rng, sig, 2) for _ in range(n)]
        core = {k for k in range(n) if rng.random() < 0.5} or {0}
        rp = reduced_product(models, IndexFilter.principal(n, core))
        for s in sig.sorts:
            expected = 1
            for k in core:
                expected *= models[k].size(s)
            assert rp.model.size(s) == expected


def test_los_on_formulas():
    rng = random.Random(32)
    formulas = ["R(x,y)", "exists z:A . R(x,z) & R(z,y)", "P(x) | x = y", "exists z:A . P(z)"]
    for _ in range(10):
        n = rng.randint(1, 3)
        models = [random_model(rng, EDGE, 2) for _ in range(n)]
        F = IndexFilter.principal(n, {rng.randrange(n)})
        rp = reduced_product(models, F)
        ctx = [("x", "A"), ("y", "A")]
        for text in formulas:
            assert los_formula_check(rp, parse_formula(text, EDGE, ctx), ctx)


def test_containment_off_the_principal_index():
    sig = parse_theory("sort A\nrel P : A").signature
    models = [make_model(sig, {"A": 2}, {}) for _ in range(3)]
    x = ("A",)
    A = [{(0,)}, {(0,), (1,)}, {(0,), (1,)}]
    B = [{(0,)}, {(0,)}, {(0,)}]
    # A_i <= B_i only at index 0
    assert los_containment(models, IndexFilter.principal(3, {0}), x, A, B)
    assert not los_containment(models, IndexFilter.principal(3, {1}), x, A, B)


def test_containment_needs_ultrafilter():
    sig = parse_theory("sort A").signature
    models = [make_model(sig, {"A": 1}, {}) for _ in range(2)]
    with pytest.raises(FilterError):
        los_containment(models, IndexFilter.principal(2, {0, 1}), ("A",), [set()] * 2, [set()] * 2)


def test_diagonal_is_elementary():
    rng = random.Random(33)
    for _ in range(8):
        M = random_model(rng, EDGE, 3)
        n = rng.randint(1, 4)
        d = diagonal_map(M, n, IndexFilter.principal(n, {rng.randrange(n)}))
        assert d.elementary and d.injective


def test_colimit_element_classes():
    sig = parse_theory("sort A").signature
    models = [make_model(sig, {"A": 2}, {}) for _ in range(2)]
    rp = reduced_product(models, IndexFilter.principal(2, {0}))
    # tuples agreeing at the core index land in one class
    for a, b in product(range(2), repeat=2):
        assert rp.element("A", {0, 1}, (a, b)) == rp.element("A", {0}, (a,))
