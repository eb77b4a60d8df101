from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from naive import truth_table
from posmodel.model import (
    Homomorphism, check_sequent, check_theory, enumerate_homomorphisms, eval_formula,
    is_elementary_hom, is_homomorphism, make_model, model_product, product_projections,
    terminal_model,
)
from posmodel.semcat import SemCat
from posmodel.syntax import (
    And, App, Bot, Eq, Exists, Or, Rel, Top, Var, parse_formula, parse_model, parse_theory,
)

SIG = parse_theory("sort A\nsort B\nrel R : A B\nrel S : A\nfun f : A -> B").signature
CTX = (("x", "A"), ("y", "B"))


def _terms(sort, scope):
    out = [Var(v, s) for v, s in scope if s == sort]
    if sort == "B":
        out += [App("f", (Var(v, "A"),), "B") for v, s in scope if s == "A"]
    return out


@st.composite
def formulas(draw, scope=CTX, depth=3):
    kinds = ["top", "bot", "eq", "R", "S"] + (["and", "or", "ex"] if depth > 0 else [])
    k = draw(st.sampled_from(kinds))
    if k == "top":
        return Top()
    if k == "bot":
        return Bot()
    if k == "eq":
        s = draw(st.sampled_from(["A", "B"]))
        ts = _terms(s, scope)
        if not ts:
            return Top()
        return Eq(draw(st.sampled_from(ts)), draw(st.sampled_from(ts)))
    if k == "R":
        a, b = _terms("A", scope), _terms("B", scope)
        if not a or not b:
            return Bot()
        return Rel("R", (draw(st.sampled_from(a)), draw(st.sampled_from(b))))
    if k == "S":
        a = _terms("A", scope)
        return Rel("S", (draw(st.sampled_from(a)),)) if a else Top()
    if k in ("and", "or"):
        l = draw(formulas(scope, depth - 1))
        r = draw(formulas(scope, depth - 1))
        return And(l, r) if k == "and" else Or(l, r)
    s = draw(st.sampled_from(["A", "B"]))
    v = f"z{depth}"
    return Exists(v, s, draw(formulas(scope + ((v, s),), depth - 1)))


@st.composite
def models(draw):
    a = draw(st.integers(1, 3))
    b = draw(st.integers(1, 3))
    R = draw(st.sets(st.tuples(st.integers(0, a - 1), st.integers(0, b - 1))))
    S = draw(st.sets(st.tuples(st.integers(0, a - 1))))
    f = {(i,): draw(st.integers(0, b - 1)) for i in range(a)}
    return make_model(SIG, {"A": a, "B": b}, {"R": R, "S": S}, {"f": f})


@settings(max_examples=200, deadline=None)
@given(models(), formulas())
def test_eval_matches_truth_table(M, f):
    assert eval_formula(M, f, CTX) == truth_table(M, f, CTX)


@settings(max_examples=60, deadline=None)
@given(models(), models(), formulas())
def test_eval_in_product_is_pairwise(M, N, f):
    P = model_product(M, N)
    got = eval_formula(P, f, CTX)
    left, right = eval_formula(M, f, CTX), eval_formula(N, f, CTX)
    enc = {s: (lambda i, j, s=s: i * N.size(s) + j) for s in SIG.sorts}
    want = frozenset(tuple(enc[s](a, b) for (_, s), a, b in zip(CTX, ta, tb))
                     for ta in left for tb in right)
    assert got == want


def test_product_projections_are_homs():
    M = make_model(SIG, {"A": 2, "B": 1}, {"R": [(0, 0)], "S": [(1,)]}, {"f": {(0,): 0, (1,): 0}})
    P = model_product(M, terminal_model(SIG))
    p1, p2 = product_projections(M, terminal_model(SIG), P)
    assert is_homomorphism(P, M, p1.maps)
    assert is_homomorphism(P, p2.target, p2.maps)


def test_sequent_witness():
    th = parse_theory("sort A\nrel R : A A\naxiom (x:A) true => exists y:A . R(x,y)")
    M = parse_model("A = {a,b}\nR = {(a,b)}", th.signature)
    assert check_theory(M, th.axioms) == [(0, (1,))]
    good = parse_model("A = {a,b}\nR = {(a,b),(b,b)}", th.signature)
    assert check_sequent(good, th.axioms[0]).holds


def brute_homs(M, N):
    sorts = M.sig.sorts
    spaces = [list(product(range(N.size(s)), repeat=M.size(s))) for s in sorts]
    out = set()
    for combo in product(*spaces):
        maps = dict(zip(sorts, combo))
        if is_homomorphism(M, N, maps):
            out.add(tuple(combo))
    return out


@pytest.mark.parametrize("m_edges,n_edges", [
    ([(0, 1)], [(0, 1), (1, 0)]),                     # discrete order into a 2-cycle
    ([(0, 1), (1, 2)], [(0, 0), (0, 1), (1, 1)]),     # 3-chain into a reflexive 2-chain
    ([(0, 0)], [(0, 1)]),                             # loop into a loop-free graph: none
])
def test_hom_enumeration_matches_brute_force(m_edges, n_edges):
    sig = parse_theory("sort A\nrel E : A A").signature
    M = make_model(sig, {"A": 1 + max(max(e) for e in m_edges)}, {"E": m_edges})
    N = make_model(sig, {"A": 1 + max(max(e) for e in n_edges)}, {"E": n_edges})
    got = {h.key() for h in enumerate_homomorphisms(M, N)}
    assert got == brute_homs(M, N)


def test_inclusion_missing_witness_is_not_elementary():
    sig = parse_theory("sort A\nrel R : A A").signature
    small = make_model(sig, {"A": 2}, {"R": [(0, 1)]}, name="small")
    big = make_model(sig, {"A": 3}, {"R": [(0, 1), (1, 2)]}, name="big")
    h = Homomorphism(small, big, {"A": (0, 1)})
    assert is_homomorphism(small, big, h.maps)
    C = SemCat([small, big], 2)
    r = is_elementary_hom(h, C)
    assert not r.elementary
    # h does not reflect the reported set: its preimage differs from small's part
    in_big = C.component_set(r.defset, 1)
    in_small = C.component_set(r.defset, 0)
    preimage = {t for t in small.tuples(r.context) if h.on_tuple(r.context, t) in in_big}
    assert preimage != set(in_small)


def test_identity_is_elementary_and_injective():
    sig = parse_theory("sort A\nrel R : A A").signature
    M = make_model(sig, {"A": 3}, {"R": [(0, 1), (1, 2)]})
    C = SemCat([M], 2)
    r = is_elementary_hom(Homomorphism(M, M, {"A": (0, 1, 2)}), C, 0, 0)
    assert r.elementary and r.injective
