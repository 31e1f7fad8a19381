"""Hand-written tokenizer and recursive-descent parsers.

Three entry points share one token stream: `parse_assertion` for the
quantifier-free layer, `parse_formula` for temporal formulas, and
`parse_system` for transition-system files. `#` starts a line comment.

Assertion precedence, loosest first: `||`, `&&`, `->` (right
associative), comparison. Formula precedence differs: `->` is loosest
there and only a theory atom may appear on its left.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import formula as F
from . import logic
from .errors import ParseError, UndeclaredVariable, UnsupportedConstruct
from .logic import Assertion, Term, Var

_PUNCT = ("&&", "||", "->", "!=", "<=", ">=", "(", ")", ",", ";", ":", "!", "=", "<", ">", "+", "-", "*", "'")

TEMPORAL_KEYWORDS = {"A", "E", "U", "AG", "EG", "AF", "EF", "AX", "EX"}
KEYWORDS = TEMPORAL_KEYWORDS | {"forall", "exists", "true", "false"}
RESERVED_NAMES = KEYWORDS | {"vars", "init", "next", "wf"}


@dataclass(frozen=True)
class Token:
    kind: str  # "int" | "ident" | "punct" | "eof"
    text: str
    pos: int  # 0-based character offset


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("ident", text[i:j], i))
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, i))
                i += len(p)
                break
        else:
            raise ParseError(i + 1, "a token", text)
    toks.append(Token("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.toks[self.i].text == text and self.toks[self.i].kind != "eof"

    def take(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"'{text}'")
        return self.advance()

    def fail(self, expected: str) -> None:
        raise ParseError(self.peek().pos + 1, expected, self.text)

    def expect_eof(self) -> None:
        if self.peek().kind != "eof":
            self.fail("end of input")

    # Terms

    def term(self) -> Term:
        t = self.factor()
        while True:
            if self.take("+"):
                t = logic.term_add(t, self.factor())
            elif self.take("-"):
                t = logic.term_sub(t, self.factor())
            else:
                return t

    def factor(self) -> Term:
        tok = self.peek()
        if tok.text == "-":
            self.advance()
            return logic.term_scale(self.factor(), -1)
        if tok.kind == "int":
            self.advance()
            value = int(tok.text)
            if self.take("*"):
                return logic.term_scale(logic.var_term(self.var_ref()), value)
            return logic.const_term(value)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return logic.var_term(self.var_ref())
        self.fail("a term")
        raise AssertionError  # unreachable

    def var_ref(self) -> Var:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail("a variable name")
        self.advance()
        return Var(tok.text, primed=self.take("'"))

    # Assertions

    def assertion(self) -> Assertion:
        a = self.a_conj()
        while self.take("||"):
            a = logic.Or(a, self.a_conj())
        return a

    def a_conj(self) -> Assertion:
        a = self.a_impl()
        while self.take("&&"):
            a = logic.And(a, self.a_impl())
        return a

    def a_impl(self) -> Assertion:
        a = self.a_cmp()
        if self.take("->"):
            return logic.Implies(a, self.a_impl())
        return a

    def a_cmp(self) -> Assertion:
        tok = self.peek()
        if tok.text == "true" and tok.kind == "ident":
            self.advance()
            return logic.TRUE
        if tok.text == "false" and tok.kind == "ident":
            self.advance()
            return logic.FALSE
        if self.take("!"):
            return logic.Not(self.a_cmp())
        if self.take("("):
            a = self.assertion()
            self.expect(")")
            return a
        lhs = self.term()
        rel = self.peek()
        if rel.text not in logic.REL_OPS:
            self.fail("a relation (=, !=, <, <=, >, >=)")
        self.advance()
        return logic.Cmp(lhs, rel.text, self.term())

    # Formulas

    def formula(self) -> F.Formula:
        lhs = self.f_or()
        if self.take("->"):
            rhs = self.formula()
            if not isinstance(lhs, F.Atom):
                raise UnsupportedConstruct(
                    "the left side of -> inside a formula must be a theory atom"
                )
            if isinstance(rhs, F.Atom):
                return F.Atom(logic.Implies(lhs.pred, rhs.pred))
            return F.Guard(lhs.pred, rhs)
        return lhs

    def f_or(self) -> F.Formula:
        f = self.f_and()
        while self.take("||"):
            g = self.f_and()
            if isinstance(f, F.Atom) and isinstance(g, F.Atom):
                f = F.Atom(logic.Or(f.pred, g.pred))
            else:
                f = F.FOr(f, g)
        return f

    def f_and(self) -> F.Formula:
        f = self.f_unary()
        while self.take("&&"):
            g = self.f_unary()
            if isinstance(f, F.Atom) and isinstance(g, F.Atom):
                f = F.Atom(logic.And(f.pred, g.pred))
            else:
                f = F.FAnd(f, g)
        return f

    def f_unary(self) -> F.Formula:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text in ("forall", "exists"):
                self.advance()
                name = self.peek()
                if name.kind != "ident" or name.text in RESERVED_NAMES:
                    self.fail("a quantified variable name")
                self.advance()
                self.expect(":")
                body = self.formula()
                return F.Forall(name.text, body) if tok.text == "forall" else F.Exists(name.text, body)
            if tok.text in ("AG", "EG", "AF", "EF", "AX", "EX"):
                self.advance()
                self.expect("(")
                body = self.formula()
                self.expect(")")
                path = {"G": F.G, "F": F.F, "X": F.X}[tok.text[1]](body)
                return F.A(path) if tok.text[0] == "A" else F.E(path)
            if tok.text in ("A", "E"):
                self.advance()
                self.expect("(")
                lhs = self.formula()
                if not (self.peek().kind == "ident" and self.peek().text == "U"):
                    self.fail("'U'")
                self.advance()
                rhs = self.formula()
                self.expect(")")
                return F.A(F.U(lhs, rhs)) if tok.text == "A" else F.E(F.U(lhs, rhs))
            if tok.text == "U":
                self.fail("a formula")
        if self.take("!"):
            g = self.f_unary()
            if isinstance(g, F.Atom):
                return F.Atom(logic.Not(g.pred))
            return F.FNot(g)
        if self.take("("):
            g = self.formula()
            self.expect(")")
            return g
        return self.f_atom()

    def f_atom(self) -> F.Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "true":
            self.advance()
            return F.Atom(logic.TRUE)
        if tok.kind == "ident" and tok.text == "false":
            self.advance()
            return F.Atom(logic.FALSE)
        lhs = self.term()
        rel = self.peek()
        if rel.text not in logic.REL_OPS:
            self.fail("a relation (=, !=, <, <=, >, >=)")
        self.advance()
        return F.Atom(logic.Cmp(lhs, rel.text, self.term()))


def parse_assertion(text: str) -> Assertion:
    p = _Parser(text)
    a = p.assertion()
    p.expect_eof()
    return a


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.expect_eof()
    return t


def parse_formula(text: str) -> F.Formula:
    p = _Parser(text)
    f = p.formula()
    p.expect_eof()
    return f


def parse_system_parts(text: str) -> tuple[tuple[str, ...], Assertion, Assertion]:
    """Parse `vars ...; init ...; next ...;` and validate variable use."""
    p = _Parser(text)
    if not (p.peek().kind == "ident" and p.peek().text == "vars"):
        p.fail("'vars'")
    p.advance()
    names: list[str] = []
    while True:
        tok = p.peek()
        if tok.kind != "ident" or tok.text in RESERVED_NAMES:
            p.fail("a variable name")
        if tok.text in names:
            raise ParseError(tok.pos + 1, f"a fresh name ({tok.text!r} already declared)", text)
        names.append(tok.text)
        p.advance()
        if not p.take(","):
            break
    p.expect(";")
    for kw in ("init", "next"):
        if not (p.peek().kind == "ident" and p.peek().text == kw):
            p.fail(f"'{kw}'")
        p.advance()
        if kw == "init":
            init = p.assertion()
        else:
            nxt = p.assertion()
        p.expect(";")
    p.expect_eof()
    declared = set(names)
    for v in logic.free_vars(init):
        if v.primed or v.name not in declared:
            raise UndeclaredVariable(v.key())
    for v in logic.free_vars(nxt):
        if v.name not in declared:
            raise UndeclaredVariable(v.key())
    return tuple(names), init, nxt
