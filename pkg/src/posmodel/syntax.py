"""Theory and model DSL: multi-sorted signatures, positive-existential
formulas, coherent sequents.

Theory files::

    sort A
    rel R : A A
    fun f : A -> A
    fun c : -> A
    axiom (x:A) true => exists y:A . R(x,y)

Model files::

    A = {0,1}
    R = {(0,1)}
    f = {0->1, 1->1}
    c = 0
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

KEYWORDS = {"sort", "rel", "fun", "axiom", "exists", "true", "false", "model"}


class DSLError(Exception):
    """Parse or well-formedness error with a kind and a source position."""

    def __init__(self, kind: str, message: str, line: int = 0, col: int = 0):
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {kind}: {message}")


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str
    sort: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple
    sort: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


Term = Union[Var, App]


@dataclass(frozen=True)
class Top:
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Bot:
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: "Formula"
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


Formula = Union[Top, Bot, Eq, Rel, And, Or, Exists]
FORMULA_TYPES = (Top, Bot, Eq, Rel, And, Or, Exists)


@dataclass(frozen=True)
class Sequent:
    context: tuple  # ((name, sort), ...)
    lhs: Formula
    rhs: Formula
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Signature:
    sorts: list = field(default_factory=list)
    relations: dict = field(default_factory=dict)  # name -> tuple of sorts
    functions: dict = field(default_factory=dict)  # name -> (domain tuple, codomain)

    def kind_of(self, name: str) -> str | None:
        if name in self.sorts:
            return "sort"
        if name in self.relations:
            return "rel"
        if name in self.functions:
            return "fun"
        return None

    def constants(self) -> list[str]:
        return [f for f, (dom, _) in self.functions.items() if not dom]


@dataclass
class Theory:
    signature: Signature
    axioms: list


def conj(*fs: Formula) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else And(out, f)
    return Top() if out is None else out


def disj(*fs: Formula) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else Or(out, f)
    return Bot() if out is None else out


# ---------------------------------------------------------------------------
# free variables


def term_vars(t: Term, out: dict):
    if isinstance(t, Var):
        out.setdefault(t.name, t.sort)
    else:
        for a in t.args:
            term_vars(a, out)


def _fv(f, bound: frozenset, out: dict):
    if isinstance(f, (Top, Bot)):
        return
    if isinstance(f, Eq):
        tmp: dict = {}
        term_vars(f.left, tmp)
        term_vars(f.right, tmp)
    elif isinstance(f, Rel):
        tmp = {}
        for a in f.args:
            term_vars(a, tmp)
    elif isinstance(f, (And, Or)):
        _fv(f.left, bound, out)
        _fv(f.right, bound, out)
        return
    elif isinstance(f, Exists):
        _fv(f.body, bound | {f.var}, out)
        return
    else:
        raise TypeError(f"not a positive-existential formula: {f!r}")
    for k, v in tmp.items():
        if k not in bound:
            out.setdefault(k, v)


def free_vars(f: Formula) -> list[tuple[str, str]]:
    """Unbound variables in order of first occurrence, with their sorts."""
    out: dict = {}
    _fv(f, frozenset(), out)
    return list(out.items())


def depth(f: Formula) -> int:
    if isinstance(f, (And, Or)):
        return 1 + max(depth(f.left), depth(f.right))
    if isinstance(f, Exists):
        return 1 + depth(f.body)
    return 0


# ---------------------------------------------------------------------------
# printing


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn
    return f"{t.fn}({','.join(format_term(a) for a in t.args)})"


def format_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Eq):
        return f"{format_term(f.left)} = {format_term(f.right)}"
    if isinstance(f, Rel):
        return f"{f.name}({','.join(format_term(a) for a in f.args)})"
    if isinstance(f, Exists):
        return f"exists {f.var}:{f.sort} . {format_formula(f.body)}"
    if isinstance(f, And):
        return f"{_operand(f.left, And, False)} & {_operand(f.right, And, True)}"
    if isinstance(f, Or):
        return f"{_operand(f.left, Or, False)} | {_operand(f.right, Or, True)}"
    raise TypeError(f"not a positive-existential formula: {f!r}")


def _operand(f, parent, right):
    s = format_formula(f)
    if isinstance(f, Exists):
        return f"({s})"
    if parent is And and isinstance(f, Or):
        return f"({s})"
    if right and isinstance(f, parent):
        return f"({s})"
    return s


def format_context(ctx) -> str:
    return "(" + ", ".join(f"{v}:{s}" for v, s in ctx) + ")"


def format_sequent(s: Sequent) -> str:
    return f"axiom {format_context(s.context)} {format_formula(s.lhs)} => {format_formula(s.rhs)}"


def format_theory(th: Theory) -> str:
    sig = th.signature
    lines = [f"sort {s}" for s in sig.sorts]
    lines += [f"rel {r} : {' '.join(ar)}" for r, ar in sig.relations.items()]
    for fn, (dom, cod) in sig.functions.items():
        lines.append(f"fun {fn} : {' '.join(dom)}{' ' if dom else ''}-> {cod}")
    lines += [format_sequent(a) for a in th.axioms]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<sym>=>|->|[(){},:.=&|])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>[0-9]+)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'num', 'sym', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise DSLError("lexical", f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind in ("sym", "ident", "num"):
                toks.append(Token(kind, s, line, col))
            col += len(s)
        i = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


class _Stream:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("sym", "ident") and t.text == text

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text or t.kind == "eof":
            raise DSLError("grammar", f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.next()
        if t.kind != "ident" or t.text in KEYWORDS:
            raise DSLError("grammar", f"expected {what}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t


# ---------------------------------------------------------------------------
# formula parser


class _FormulaParser:
    def __init__(self, sig: Signature, ts: _Stream):
        self.sig = sig
        self.ts = ts

    def formula(self, scope: dict) -> Formula:
        left = self.conj(scope)
        while self.ts.at("|"):
            t = self.ts.next()
            left = Or(left, self.conj(scope), pos=(t.line, t.col))
        return left

    def conj(self, scope):
        left = self.unary(scope)
        while self.ts.at("&"):
            t = self.ts.next()
            left = And(left, self.unary(scope), pos=(t.line, t.col))
        return left

    def unary(self, scope):
        ts = self.ts
        t = ts.peek()
        if t.kind == "ident" and t.text == "exists":
            ts.next()
            binders = []
            while True:
                v = ts.ident("variable")
                ts.expect(":")
                s = ts.ident("sort")
                if s.text not in self.sig.sorts:
                    raise DSLError("unknown-symbol", f"unknown sort {s.text!r}", s.line, s.col)
                if v.text in scope or any(b[0] == v.text for b in binders):
                    raise DSLError("variable-capture", f"variable {v.text!r} is already bound", v.line, v.col)
                binders.append((v.text, s.text, (v.line, v.col)))
                if ts.at(","):
                    ts.next()
                    continue
                break
            ts.expect(".")
            inner = dict(scope)
            for name, sort, _ in binders:
                inner[name] = sort
            body = self.formula(inner)
            for name, sort, pos in reversed(binders):
                body = Exists(name, sort, body, pos=pos)
            return body
        if t.kind == "ident" and t.text == "true":
            ts.next()
            return Top(pos=(t.line, t.col))
        if t.kind == "ident" and t.text == "false":
            ts.next()
            return Bot(pos=(t.line, t.col))
        if ts.at("("):
            ts.next()
            f = self.formula(scope)
            ts.expect(")")
            return f
        if t.kind == "ident" and t.text in self.sig.relations and t.text not in scope:
            ts.next()
            args = self.arglist(scope, t)
            arity = self.sig.relations[t.text]
            if len(args) != len(arity):
                raise DSLError("arity", f"{t.text} expects {len(arity)} arguments, got {len(args)}", t.line, t.col)
            for a, s in zip(args, arity):
                if a.sort != s:
                    raise DSLError("sort-mismatch", f"argument {format_term(a)} of {t.text} has sort {a.sort}, expected {s}",
                                   *a.pos)
            return Rel(t.text, tuple(args), pos=(t.line, t.col))
        left = self.term(scope)
        eq = ts.peek()
        if not ts.at("="):
            raise DSLError("grammar", f"expected '=' after term, found {eq.text or 'end of input'!r}", eq.line, eq.col)
        ts.next()
        right = self.term(scope)
        if left.sort != right.sort:
            raise DSLError("sort-mismatch", f"cannot equate {left.sort} with {right.sort}", eq.line, eq.col)
        return Eq(left, right, pos=(eq.line, eq.col))

    def arglist(self, scope, head) -> list:
        ts = self.ts
        ts.expect("(")
        args = []
        if ts.at(")"):
            ts.next()
            return args
        while True:
            args.append(self.term(scope))
            if ts.at(","):
                ts.next()
                continue
            ts.expect(")")
            return args

    def term(self, scope) -> Term:
        ts = self.ts
        t = ts.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            raise DSLError("grammar", f"expected a term, found {t.text or 'end of input'!r}", t.line, t.col)
        ts.next()
        if t.text in scope:
            return Var(t.text, scope[t.text], pos=(t.line, t.col))
        if t.text in self.sig.functions:
            dom, cod = self.sig.functions[t.text]
            args = self.arglist(scope, t) if (dom or ts.at("(")) else []
            if len(args) != len(dom):
                raise DSLError("arity", f"{t.text} expects {len(dom)} arguments, got {len(args)}", t.line, t.col)
            for a, s in zip(args, dom):
                if a.sort != s:
                    raise DSLError("sort-mismatch", f"argument {format_term(a)} of {t.text} has sort {a.sort}, expected {s}",
                                   *a.pos)
            return App(t.text, tuple(args), cod, pos=(t.line, t.col))
        if t.text in self.sig.relations:
            raise DSLError("grammar", f"relation {t.text!r} used as a term", t.line, t.col)
        raise DSLError("unknown-symbol", f"unknown variable or function {t.text!r}", t.line, t.col)


def _parse_context(sig: Signature, ts: _Stream) -> tuple:
    ts.expect("(")
    ctx = []
    seen = set()
    if ts.at(")"):
        ts.next()
        return ()
    while True:
        v = ts.ident("variable")
        ts.expect(":")
        s = ts.ident("sort")
        if s.text not in sig.sorts:
            raise DSLError("unknown-symbol", f"unknown sort {s.text!r}", s.line, s.col)
        if v.text in seen:
            raise DSLError("variable-capture", f"variable {v.text!r} declared twice", v.line, v.col)
        seen.add(v.text)
        ctx.append((v.text, s.text))
        if ts.at(","):
            ts.next()
            continue
        ts.expect(")")
        return tuple(ctx)


def _starts_context(ts: _Stream) -> bool:
    if not ts.at("("):
        return False
    if ts.at(")", 1):
        return True
    return ts.peek(1).kind == "ident" and ts.at(":", 2)


def parse_formula(text: str, sig: Signature, context=()) -> Formula:
    ts = _Stream(tokenize(text))
    f = _FormulaParser(sig, ts).formula(dict(context))
    t = ts.peek()
    if t.kind != "eof":
        raise DSLError("grammar", f"unexpected {t.text!r} after formula", t.line, t.col)
    return f


def parse_theory(text: str) -> Theory:
    ts = _Stream(tokenize(text))
    sig = Signature()
    axioms = []

    def declare(tok):
        if tok.text in KEYWORDS:
            raise DSLError("grammar", f"{tok.text!r} is reserved", tok.line, tok.col)
        if sig.kind_of(tok.text):
            raise DSLError("duplicate", f"name {tok.text!r} already declared", tok.line, tok.col)

    def sort_ref(tok):
        if tok.text not in sig.sorts:
            raise DSLError("unknown-symbol", f"unknown sort {tok.text!r}", tok.line, tok.col)
        return tok.text

    while ts.peek().kind != "eof":
        t = ts.next()
        if t.kind != "ident":
            raise DSLError("grammar", f"expected a declaration, found {t.text!r}", t.line, t.col)
        if t.text == "sort":
            name = ts.ident("sort name")
            declare(name)
            sig.sorts.append(name.text)
        elif t.text == "rel":
            name = ts.ident("relation name")
            declare(name)
            ts.expect(":")
            ar = []
            while ts.peek().kind == "ident" and ts.peek().text not in KEYWORDS:
                ar.append(sort_ref(ts.next()))
            if not ar:
                raise DSLError("arity", f"relation {name.text!r} needs at least one sort", name.line, name.col)
            sig.relations[name.text] = tuple(ar)
        elif t.text == "fun":
            name = ts.ident("function name")
            declare(name)
            ts.expect(":")
            dom = []
            while not ts.at("->"):
                tok = ts.peek()
                if tok.kind != "ident" or tok.text in KEYWORDS:
                    raise DSLError("grammar", f"expected a sort or '->', found {tok.text or 'end of input'!r}",
                                   tok.line, tok.col)
                dom.append(sort_ref(ts.next()))
            ts.expect("->")
            cod = sort_ref(ts.ident("sort"))
            sig.functions[name.text] = (tuple(dom), cod)
        elif t.text == "axiom":
            ctx = _parse_context(sig, ts) if _starts_context(ts) else ()
            fp = _FormulaParser(sig, ts)
            lhs = fp.formula(dict(ctx))
            ts.expect("=>")
            rhs = fp.formula(dict(ctx))
            axioms.append(Sequent(ctx, lhs, rhs, pos=(t.line, t.col)))
        else:
            raise DSLError("grammar", f"expected sort, rel, fun or axiom, found {t.text!r}", t.line, t.col)
    return Theory(sig, axioms)


def parse_sequent(text: str, sig: Signature) -> Sequent:
    ts = _Stream(tokenize(text))
    if ts.at("axiom"):
        ts.next()
    ctx = _parse_context(sig, ts) if _starts_context(ts) else ()
    fp = _FormulaParser(sig, ts)
    lhs = fp.formula(dict(ctx))
    ts.expect("=>")
    rhs = fp.formula(dict(ctx))
    if ts.peek().kind != "eof":
        t = ts.peek()
        raise DSLError("grammar", f"unexpected {t.text!r}", t.line, t.col)
    return Sequent(ctx, lhs, rhs)


# ---------------------------------------------------------------------------
# model parser


def _element(ts: _Stream) -> Token:
    t = ts.next()
    if t.kind not in ("ident", "num"):
        raise DSLError("grammar", f"expected an element, found {t.text or 'end of input'!r}", t.line, t.col)
    return t


def _tuple(ts: _Stream) -> list[Token]:
    if ts.at("("):
        ts.next()
        out = []
        if ts.at(")"):
            ts.next()
            return out
        while True:
            out.append(_element(ts))
            if ts.at(","):
                ts.next()
                continue
            ts.expect(")")
            return out
    return [_element(ts)]


def _braced(ts: _Stream, item):
    ts.expect("{")
    out = []
    if ts.at("}"):
        ts.next()
        return out
    while True:
        out.append(item(ts))
        if ts.at(","):
            ts.next()
            continue
        ts.expect("}")
        return out


def parse_model(text: str, sig: Signature, name: str | None = None):
    """Parse a model description against ``sig``.  Relations left unmentioned
    are empty; every sort and function must be given."""
    from .model import FinModel

    ts = _Stream(tokenize(text))
    carriers: dict[str, list[str]] = {}
    raw_rels: dict = {}
    raw_funs: dict = {}
    seen = set()
    if ts.at("model"):
        ts.next()
        name = ts.ident("model name").text
    while ts.peek().kind != "eof":
        head = ts.ident("symbol")
        if head.text in seen:
            raise DSLError("model", f"{head.text!r} given twice", head.line, head.col)
        seen.add(head.text)
        ts.expect("=")
        kind = sig.kind_of(head.text)
        if kind is None:
            raise DSLError("unknown-symbol", f"{head.text!r} is not in the signature", head.line, head.col)
        if kind == "sort":
            elems = _braced(ts, _element)
            names = [e.text for e in elems]
            if len(set(names)) != len(names):
                raise DSLError("model", f"duplicate element in carrier of {head.text}", head.line, head.col)
            carriers[head.text] = names
        elif kind == "rel":
            raw_rels[head.text] = (head, _braced(ts, _tuple))
        else:
            dom, _ = sig.functions[head.text]
            if not dom and not ts.at("{"):
                raw_funs[head.text] = (head, [([], _element(ts))])
            else:
                def entry(ts):
                    args = _tuple(ts)
                    ts.expect("->")
                    return args, _element(ts)
                raw_funs[head.text] = (head, _braced(ts, entry))
    for s in sig.sorts:
        if s not in carriers:
            raise DSLError("model", f"no carrier given for sort {s!r}", 1, 1)
    index = {s: {e: i for i, e in enumerate(es)} for s, es in carriers.items()}

    def lookup(sort, tok):
        try:
            return index[sort][tok.text]
        except KeyError:
            raise DSLError("model", f"element {tok.text!r} is not in the carrier of {sort}", tok.line, tok.col) from None

    rels = {}
    for r, arity in sig.relations.items():
        tuples = set()
        if r in raw_rels:
            head, entries = raw_rels[r]
            for tup in entries:
                if len(tup) != len(arity):
                    pos = (tup[0].line, tup[0].col) if tup else (head.line, head.col)
                    raise DSLError("model", f"tuple of length {len(tup)} for {r} of arity {len(arity)}", *pos)
                tuples.add(tuple(lookup(s, t) for s, t in zip(arity, tup)))
        rels[r] = frozenset(tuples)
    funcs = {}
    for f, (dom, cod) in sig.functions.items():
        if f not in raw_funs:
            if not dom and not carriers[cod]:
                raise DSLError("model", f"constant into empty carrier: {f} : -> {cod}", 1, 1)
            if any(not carriers[s] for s in dom):
                funcs[f] = {}
                continue
            raise DSLError("model", f"no table given for function {f!r}", 1, 1)
        head, entries = raw_funs[f]
        table = {}
        for args, val in entries:
            if len(args) != len(dom):
                pos = (args[0].line, args[0].col) if args else (val.line, val.col)
                raise DSLError("model", f"{f} expects {len(dom)} arguments, got {len(args)}", *pos)
            key = tuple(lookup(s, a) for s, a in zip(dom, args))
            if not dom and not carriers[cod]:
                raise DSLError("model", f"constant into empty carrier: {f} : -> {cod}", val.line, val.col)
            v = lookup(cod, val)
            if key in table and table[key] != v:
                raise DSLError("model", f"{f} given two values at {[a.text for a in args]}", val.line, val.col)
            table[key] = v
        expected = 1
        for s in dom:
            expected *= len(carriers[s])
        if len(table) != expected:
            missing = _first_missing(table, [len(carriers[s]) for s in dom])
            shown = tuple(carriers[s][i] for s, i in zip(dom, missing))
            raise DSLError("model", f"function table of {f} is partial: no value at {shown}", head.line, head.col)
        funcs[f] = table
    return FinModel(sig, {s: tuple(carriers[s]) for s in sig.sorts}, rels, funcs, name=name)


def _first_missing(table, sizes):
    from itertools import product
    for key in product(*[range(k) for k in sizes]):
        if key not in table:
            return key
    return ()


def format_model(M) -> str:
    sig = M.sig
    lines = []
    for s in sig.sorts:
        lines.append(f"{s} = {{{','.join(M.carriers[s])}}}")

    def el(sort, i):
        return M.carriers[sort][i]

    for r, arity in sig.relations.items():
        items = []
        for tup in sorted(M.rels[r]):
            names = [el(s, i) for s, i in zip(arity, tup)]
            items.append(f"({','.join(names)})")
        lines.append(f"{r} = {{{','.join(items)}}}")
    for f, (dom, cod) in sig.functions.items():
        table = M.funcs[f]
        if not dom:
            lines.append(f"{f} = {el(cod, table[()])}")
            continue
        items = []
        for key in sorted(table):
            names = [el(s, i) for s, i in zip(dom, key)]
            items.append(f"({','.join(names)})->{el(cod, table[key])}")
        lines.append(f"{f} = {{{','.join(items)}}}")
    return "\n".join(lines) + "\n"
