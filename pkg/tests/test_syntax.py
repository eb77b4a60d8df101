import pytest

from posmodel.model import make_model
from posmodel.syntax import (
    DSLError, Exists, Or, Rel, format_formula, format_model, format_theory, free_vars,
    parse_formula, parse_model, parse_sequent, parse_theory,
)

TOY = """
sort A
sort B
rel R : A B
fun f : A -> B
fun c : -> A
axiom (x:A) true => exists y:B . R(x,y)
axiom R(c, f(c)) => false
"""

CHAIN3 = """
# a 3-chain as sorts a <= b <= c with monos between them
sort a
sort b
sort c
fun i : a -> b
fun j : b -> c
axiom (x:a, y:a) i(x) = i(y) => x = y
axiom (x:b, y:b) j(x) = j(y) => x = y
"""


def test_toy_theory_parses():
    th = parse_theory(TOY)
    assert th.signature.sorts == ["A", "B"]
    assert th.signature.relations == {"R": ("A", "B")}
    assert th.signature.functions["c"] == ((), "A")
    assert len(th.axioms) == 2
    assert isinstance(th.axioms[0].rhs, Exists)


def test_chain_encoding_parses():
    th = parse_theory(CHAIN3)
    assert len(th.signature.sorts) == 3
    assert len(th.axioms) == 2


def test_theory_format_roundtrip():
    th = parse_theory(TOY)
    again = parse_theory(format_theory(th))
    assert again.signature == th.signature
    assert again.axioms == th.axioms


@pytest.mark.parametrize("text,kind", [
    ("sort A\nrel R : A\naxiom (x:A) R(x,x) => true", "arity"),
    ("sort A\naxiom (x:A) Q(x) => true", "unknown-symbol"),
    ("sort A\nsort B\nrel R : A\naxiom (y:B) R(y) => true", "sort-mismatch"),
    ("sort A\nsort A", "duplicate"),
    ("sort A\naxiom (x:A) true => ~R(x)", None),
    ("sort A\nrel R : A\naxiom (x:A) R(y) => true", None),
])
def test_theory_errors(text, kind):
    with pytest.raises(DSLError) as exc:
        parse_theory(text)
    if kind is not None:
        assert exc.value.kind == kind
    assert exc.value.line >= 1


def test_negation_rejected_with_position():
    with pytest.raises(DSLError) as exc:
        parse_theory("sort A\nrel R : A\naxiom (x:A) true => not R(x)")
    assert exc.value.line == 3


def test_formula_roundtrip_and_precedence():
    th = parse_theory("sort A\nrel P : A\nrel Q : A\nrel S : A")
    sig = th.signature
    f = parse_formula("P(x) | Q(x) & S(x)", sig, [("x", "A")])
    assert isinstance(f, Or)
    g = parse_formula("(P(x) | Q(x)) & S(x)", sig, [("x", "A")])
    for h in (f, g):
        assert parse_formula(format_formula(h), sig, [("x", "A")]) == h


def test_free_variables():
    th = parse_theory("sort A\nrel R : A A")
    f = parse_formula("exists y:A . R(x, y)", th.signature, [("x", "A")])
    assert free_vars(f) == [("x", "A")]


def test_model_parse_and_format_roundtrip():
    th = parse_theory(TOY)
    text = "model m\nA = {a, b}\nB = {p}\nR = {(a,p), (b,p)}\nf = {a -> p, b -> p}\nc = a\n"
    M = parse_model(text, th.signature)
    assert M.name == "m"
    assert M.size("A") == 2 and M.rels["R"] == {(0, 0), (1, 0)}
    again = parse_model(format_model(M), th.signature)
    assert again.carriers == M.carriers and again.rels == M.rels and again.funcs == M.funcs


@pytest.mark.parametrize("text", [
    "A = {a}\nB = {p}\nf = {a -> p}",  # constant c missing
    "A = {a}\nB = {p}\nf = {a -> q}\nc = a",  # unknown element
    "A = {a, a}\nB = {p}\nf = {a -> p}\nc = a",
    "A = {a}\nB = {p}\nR = {(p, a)}\nf = {a -> p}\nc = a",
    "A = {a}\nB = {p}\nZ = {}\nf = {a -> p}\nc = a",
])
def test_model_errors(text):
    th = parse_theory(TOY)
    with pytest.raises(DSLError):
        parse_model(text, th.signature)


def test_sequent_parse():
    th = parse_theory("sort A\nrel R : A A")
    s = parse_sequent("(x:A) R(x,x) => exists y:A . R(x,y)", th.signature)
    assert s.context == (("x", "A"),)
    assert isinstance(s.lhs, Rel)


def test_make_model_names_elements():
    th = parse_theory("sort A\nrel R : A")
    M = make_model(th.signature, {"A": 3}, {"R": [(1,)]})
    assert M.carriers["A"] == ("0", "1", "2")
    assert M.rels["R"] == {(1,)}
