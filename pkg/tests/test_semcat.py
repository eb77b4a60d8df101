import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from corpus_gen import random_model, random_signature
from naive import truth_table
from posmodel.model import make_model
from posmodel.semcat import CoordMap, SemCat
from posmodel.syntax import And, Bot, Eq, Exists, Or, Rel, Top, Var, free_vars, parse_theory

UNARY = parse_theory("sort A\nrel R : A").signature


def enumerate_formulas(sig, scope, bound, depth):
    """Every pe formula over ``scope`` of nesting depth <= ``depth``, with one
    quantified variable available per level."""
    atoms = [Top(), Bot()]
    vs = [Var(v, s) for v, s in scope + bound]
    atoms += [Eq(a, b) for a in vs for b in vs if a.sort == b.sort]
    for r, ar in sig.relations.items():
        for args in product(*[[v for v in vs if v.sort == s] for s in ar]):
            atoms.append(Rel(r, tuple(args)))
    layer = atoms
    for _ in range(depth):
        nxt = list(atoms)
        nxt += [And(a, b) for a in layer for b in layer] + [Or(a, b) for a in layer for b in layer]
        nxt += [Exists(v, s, f) for v, s in bound for f in layer]
        layer = nxt
    return layer


def sets_by_enumeration(M, ctx, depth=2):
    out = set()
    bound = [("z", s) for s in M.sig.sorts]
    names = {v for v, _ in ctx}
    for f in enumerate_formulas(M.sig, list(ctx), bound[:1], depth):
        if {v for v, _ in free_vars(f)} - names:
            continue
        out.add(truth_table(M, f, ctx))
    return out


def test_single_unary_relation_lattice():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]})
    C = SemCat([M], 1)
    got = {C.component_set(d, 0) for d in C.elements(("A",))}
    assert got == {frozenset(), frozenset({(0,)}), frozenset({(0,), (1,)})}
    # {1} is not definable: brute formula enumeration finds the same three sets
    assert sets_by_enumeration(M, (("x", "A"),)) == got


def test_enumeration_is_sound_on_pairs():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]})
    C = SemCat([M], 2)
    stored = {C.component_set(d, 0) for d in C.elements(("A", "A"))}
    found = sets_by_enumeration(M, (("x", "A"), ("y", "A")), depth=1)
    assert found <= stored


def test_lattice_sizes_on_tiny_model():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]})
    C = SemCat([M], 3)
    assert C.lattice_size(()) == 2
    assert C.lattice_size(("A",)) == 3
    assert C.lattice_size(("A", "A")) == 9


def test_disagreeing_sentence_grows_empty_context():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]})
    N = make_model(UNARY, {"A": 2}, {"R": []})
    C = SemCat([M, N], 2)
    assert C.lattice_size(()) >= 3
    assert not C.is_two_valued()


def test_weakly_boolean_counterexample():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]})
    C = SemCat([M], 1)
    wb, cex = C.is_weakly_boolean()
    assert not wb
    x, a, b = cex
    assert x == ("A",)
    assert C.component_set(a, 0) == {(0,), (1,)} and C.component_set(b, 0) == {(0,)}


def test_atoms_of_three_chain():
    M = make_model(UNARY, {"A": 2}, {"R": [(0,)]})
    C = SemCat([M], 1)
    assert [C.component_set(d, 0) for d in C.atom_subobjects(("A",))] == [frozenset({(0,)})]


def test_closure_and_coherence_on_random_families():
    rng = random.Random(7)
    for _ in range(15):
        sig = random_signature(rng, max_sorts=2)
        fam = [random_model(rng, sig, 3) for _ in range(rng.randint(1, 2))]
        C = SemCat(fam, 2)
        assert C.check_closed() == []
        for i in range(len(fam)):
            assert C.evaluation_functor(i).check_coherence() == []


def test_image_matches_direct_projection():
    rng = random.Random(3)
    for _ in range(10):
        sig = random_signature(rng, max_sorts=2)
        M = random_model(rng, sig, 3)
        C = SemCat([M], 2)
        for x in C.contexts:
            if len(x) != 2:
                continue
            for d in C.principal_sets(x):
                for keep in [(0,), (1,)]:
                    img = C.image_along_projection(d, keep)
                    direct = {tuple(t[k] for k in keep) for t in C.component_set(d, 0)}
                    assert C.component_set(img, 0) == direct


def test_witness_formulas_evaluate_to_their_sets():
    rng = random.Random(9)
    for _ in range(8):
        sig = random_signature(rng, max_sorts=2)
        M = random_model(rng, sig, 3)
        C = SemCat([M], 2)
        for x in C.contexts:
            vars_ = C.context_vars(x)
            ctx = [(v.name, v.sort) for v in vars_]
            for d in C.principal_sets(x):
                f = C.witness(d, vars_)
                assert truth_table(M, f, ctx) == C.component_set(d, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.sets(st.integers(0, 2)), st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2))))
def test_definable_sets_form_a_distributive_sublattice(n, r, e):
    sig = parse_theory("sort A\nrel R : A\nrel E : A A").signature
    M = make_model(sig, {"A": n}, {"R": [(a,) for a in r if a < n],
                                   "E": [t for t in e if max(t) < n]})
    C = SemCat([M], 2)
    for x in C.contexts:
        els = C.elements(x)
        masks = {d.mask for d in els}
        for a in els:
            for b in els:
                assert (a.mask & b.mask) in masks and (a.mask | b.mask) in masks
