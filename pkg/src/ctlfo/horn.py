"""Implication constraints over uninterpreted predicates.

A clause is `premise -> head`. Premises conjoin theory assertions,
predicate applications, and negated predicate applications. Heads
conjoin assertions and applications, optionally under a trailing
existential block, and may carry a theory guard: a head
`(g -> items)` abbreviates folding `g` into the premise but prints the
way guarded constraints are usually displayed.

Predicate symbols come in three kinds: `query` symbols are solved for,
`wf` symbols additionally carry a well-foundedness declaration, and
`system` symbols (`init`, `next`) stand for the transition system and are
expanded from attached definitions when grounding or exporting. `init`
is always applied to the base variables; `next` is applied to the full
current scope and its primed copy, with frame equalities spelled out
separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import logic, parser
from .errors import NotExportable, ParseError
from .logic import Assertion, Term, Var

KIND_QUERY = "query"
KIND_WF = "wf"
KIND_SYSTEM = "system"

SYSTEM_NAMES = ("init", "next")


@dataclass(frozen=True)
class PredicateSymbol:
    name: str
    arity: int
    kind: str = KIND_QUERY


@dataclass(frozen=True)
class PredApp:
    sym: PredicateSymbol
    args: tuple[Term, ...]

    def __post_init__(self):
        # System symbols are applied at widened arity under quantifier
        # scopes: next(v, x, v', x') for nominal next(v, v').
        if self.sym.kind != KIND_SYSTEM and len(self.args) != self.sym.arity:
            raise ValueError(f"{self.sym.name} expects {self.sym.arity} args, got {len(self.args)}")


@dataclass(frozen=True)
class Neg:
    """A negated predicate application in a premise."""

    app: PredApp


PremiseItem = object  # Assertion | PredApp | Neg
HeadItem = object  # Assertion | PredApp


@dataclass(frozen=True)
class Head:
    guard: Assertion | None = None
    outer: tuple[HeadItem, ...] = ()
    exists: tuple[Var, ...] = ()
    inner: tuple[HeadItem, ...] = ()

    def items(self) -> tuple[HeadItem, ...]:
        return self.outer + self.inner


@dataclass(frozen=True)
class HornClause:
    premise: tuple[PremiseItem, ...]
    head: Head


@dataclass(frozen=True)
class HornSystem:
    preds: tuple[PredicateSymbol, ...]
    clauses: tuple[HornClause, ...]
    wf: tuple[str, ...] = ()
    # Metadata, excluded from equality: definitions for the system symbols
    # and the base variable tuple they are parameterized over.
    base_vars: tuple[str, ...] | None = field(default=None, compare=False)
    defs: dict | None = field(default=None, compare=False)

    def pred(self, name: str) -> PredicateSymbol:
        for p in self.preds:
            if p.name == name:
                return p
        raise KeyError(name)


class FreshNames:
    """Deterministic `prefix_0, prefix_1, ...` numbering, one counter per prefix."""

    def __init__(self):
        self._counters: dict[str, int] = {}

    def fresh_pred(self, prefix: str, arity: int, kind: str = KIND_QUERY) -> PredicateSymbol:
        n = self._counters.get(prefix, 0)
        self._counters[prefix] = n + 1
        return PredicateSymbol(f"{prefix}_{n}", arity, kind)


def var_args(names: tuple[str, ...], primed: bool = False) -> tuple[Term, ...]:
    return tuple(logic.var_term(Var(n, primed)) for n in names)


# ---------------------------------------------------------------- rendering


def render_app(app: PredApp) -> str:
    return f"{app.sym.name}({', '.join(logic.render_term(t) for t in app.args)})"


def _render_item(item) -> str:
    # Compound assertions are parenthesized so that `&&` and `->` always
    # separate clause items, never parts of one item.
    if isinstance(item, PredApp):
        return render_app(item)
    if isinstance(item, Neg):
        return "!" + render_app(item.app)
    return logic.render_assertion(item, 3)


def render_clause(c: HornClause) -> str:
    left = " && ".join(_render_item(it) for it in c.premise)
    parts = [_render_item(it) for it in c.head.outer]
    if c.head.exists:
        names = ", ".join(v.key() for v in c.head.exists)
        tail = " && ".join(_render_item(it) for it in c.head.inner)
        parts.append(f"exists {names}: {tail}")
    right = " && ".join(parts) if parts else "true"
    if c.head.guard is not None:
        right = f"({logic.render_assertion(c.head.guard, 3)} -> {right})"
    return f"{left} -> {right}"


def emit_textual(hs: HornSystem) -> str:
    lines = [render_clause(c) for c in hs.clauses]
    lines += [f"wf({name})" for name in hs.wf]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ reading


def read_textual(text: str) -> HornSystem:
    """Parse emit_textual output back into a HornSystem.

    Predicate symbols are reconstructed in order of first occurrence;
    `init`/`next` come back as system symbols without definitions.
    """
    preds: dict[str, PredicateSymbol] = {}
    order: list[PredicateSymbol] = []
    wf_names: list[str] = []
    clauses: list[HornClause] = []
    pending_wf_arity: dict[str, int] = {}

    def get_sym(name: str, arity: int, pos: int) -> PredicateSymbol:
        sym = preds.get(name)
        if sym is None:
            kind = KIND_SYSTEM if name in SYSTEM_NAMES else KIND_QUERY
            if name == "next" and "init" in preds:
                # next may only occur widened; its declared arity pairs
                # the system state with its primed copy.
                arity = 2 * preds["init"].arity
            sym = PredicateSymbol(name, arity, kind)
            preds[name] = sym
            order.append(sym)
            return sym
        if sym.arity != arity and sym.kind != KIND_SYSTEM:
            raise ParseError(pos + 1, f"{name}/{sym.arity} (arity mismatch)", text)
        return sym

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        p = parser._Parser(line)
        if p.peek().kind == "ident" and p.peek().text == "wf" and p.peek(1).text == "(":
            p.advance()
            p.expect("(")
            tok = p.peek()
            if tok.kind != "ident":
                p.fail("a predicate name")
            p.advance()
            p.expect(")")
            p.expect_eof()
            wf_names.append(tok.text)
            continue
        clauses.append(_read_clause(p, get_sym, pending_wf_arity))

    for name in wf_names:
        sym = preds.get(name)
        if sym is None:
            arity = pending_wf_arity.get(name, 2)
            sym = PredicateSymbol(name, arity, KIND_WF)
            preds[name] = sym
            order.append(sym)
        elif sym.kind != KIND_WF:
            fixed = PredicateSymbol(sym.name, sym.arity, KIND_WF)
            preds[name] = fixed
            order[order.index(sym)] = fixed
    # Re-point applications at the fixed symbols.
    fixed_clauses = tuple(_repoint(c, preds) for c in clauses)
    return HornSystem(tuple(order), fixed_clauses, tuple(wf_names))


def _repoint(c: HornClause, preds: dict[str, PredicateSymbol]) -> HornClause:
    def fix_item(item):
        if isinstance(item, PredApp):
            return PredApp(preds[item.sym.name], item.args)
        if isinstance(item, Neg):
            return Neg(PredApp(preds[item.app.sym.name], item.app.args))
        return item

    head = Head(
        c.head.guard,
        tuple(fix_item(i) for i in c.head.outer),
        c.head.exists,
        tuple(fix_item(i) for i in c.head.inner),
    )
    return HornClause(tuple(fix_item(i) for i in c.premise), head)


def _at_app(p: parser._Parser) -> bool:
    tok = p.peek()
    return (
        tok.kind == "ident"
        and tok.text not in parser.KEYWORDS
        and p.peek(1).text == "("
    )


def _read_app(p: parser._Parser, get_sym) -> PredApp:
    tok = p.advance()
    p.expect("(")
    args = [p.term()]
    while p.take(","):
        args.append(p.term())
    p.expect(")")
    return PredApp(get_sym(tok.text, len(args), tok.pos), tuple(args))


def _read_clause(p: parser._Parser, get_sym, pending) -> HornClause:
    premise: list = []
    while True:
        if p.at("!") and p.peek(1).kind == "ident" and p.peek(1).text not in parser.KEYWORDS and p.peek(2).text == "(":
            p.advance()
            premise.append(Neg(_read_app(p, get_sym)))
        elif _at_app(p):
            premise.append(_read_app(p, get_sym))
        else:
            premise.append(p.a_cmp())
        if p.take("&&"):
            continue
        p.expect("->")
        break
    guard = None
    if p.at("(") and _guarded_head_ahead(p):
        p.expect("(")
        guard = p.a_cmp()
        p.expect("->")
        outer, exists, inner = _read_head_items(p, get_sym)
        p.expect(")")
    else:
        outer, exists, inner = _read_head_items(p, get_sym)
    p.expect_eof()
    return HornClause(tuple(premise), Head(guard, outer, exists, inner))


def _guarded_head_ahead(p: parser._Parser) -> bool:
    """Lookahead: does `(...)` hold a guard with a predicate application after `->`?"""
    depth = 0
    i = p.i
    arrow_at = None
    while True:
        tok = p.toks[i]
        if tok.kind == "eof":
            return False
        if tok.text == "(":
            depth += 1
        elif tok.text == ")":
            depth -= 1
            if depth == 0:
                return False
        elif tok.text == "->" and depth == 1 and arrow_at is None:
            nxt = p.toks[i + 1]
            after = p.toks[i + 2] if i + 2 < len(p.toks) else None
            if nxt.kind == "ident" and (
                nxt.text == "exists" or (after is not None and after.text == "(")
            ):
                return True
            arrow_at = i
        i += 1


def _read_head_items(p: parser._Parser, get_sym):
    outer: list = []
    exists: tuple[Var, ...] = ()
    inner: list = []
    target = outer
    while True:
        if p.peek().kind == "ident" and p.peek().text == "exists" and not exists:
            p.advance()
            names = [p.var_ref()]
            while p.take(","):
                names.append(p.var_ref())
            p.expect(":")
            exists = tuple(names)
            target = inner
            continue
        if p.peek().kind == "ident" and p.peek().text == "true" and p.peek(1).text != "->":
            p.advance()
        elif _at_app(p):
            target.append(_read_app(p, get_sym))
        else:
            target.append(p.a_cmp())
        if not p.take("&&"):
            break
    return tuple(outer), exists, tuple(inner)


# --------------------------------------------------------------- CHC export


def emit_chc(hs: HornSystem) -> str:
    """Render as an SMT-LIB HORN script over Int.

    Only the safety fragment is exportable: no existential heads, no
    negated premise applications, no wf declarations. System symbols are
    expanded from their definitions, conjunctive heads are split, and a
    pure theory head `c` becomes `premise and not c -> false`.
    """
    out = ["(set-logic HORN)"]
    queries = [p for p in hs.preds if p.kind != KIND_SYSTEM]
    for p in queries:
        sorts = " ".join(["Int"] * p.arity)
        out.append(f"(declare-fun {p.name} ({sorts}) Bool)")
    for idx, c in enumerate(hs.clauses):
        out.extend(_chc_clause(hs, idx, c))
    if hs.wf:
        raise NotExportable("well-foundedness declaration")
    out.append("(check-sat)")
    return "\n".join(out) + "\n"


def _chc_clause(hs: HornSystem, idx: int, c: HornClause) -> list[str]:
    if c.head.exists:
        raise NotExportable("existential head", idx)
    premise_terms: list[str] = []
    for item in c.premise:
        if isinstance(item, Neg):
            raise NotExportable("negated premise application", idx)
        premise_terms.append(_chc_item(hs, idx, item))
    if c.head.guard is not None:
        premise_terms.append(_chc_assertion(c.head.guard))
    lines = []
    free = _clause_vars(c)
    binder = " ".join(f"({_chc_var(v)} Int)" for v in free)
    for item in c.head.items():
        if isinstance(item, PredApp):
            if item.sym.kind == KIND_SYSTEM:
                raise NotExportable("system application in head", idx)
            head = _chc_app_atom(item)
        else:
            if item == logic.TRUE:
                continue
            premise_terms_item = premise_terms + [f"(not {_chc_assertion(item)})"]
            lines.append(_chc_assert(binder, premise_terms_item, "false"))
            continue
        lines.append(_chc_assert(binder, premise_terms, head))
    if not c.head.items():
        lines.append(_chc_assert(binder, premise_terms, "false"))
    return lines


def _chc_assert(binder: str, premise: list[str], head: str) -> str:
    if not premise:
        body = head
    elif len(premise) == 1:
        body = f"(=> {premise[0]} {head})"
    else:
        body = f"(=> (and {' '.join(premise)}) {head})"
    if binder:
        return f"(assert (forall ({binder}) {body}))"
    return f"(assert {body})"


def _chc_item(hs: HornSystem, idx: int, item) -> str:
    if isinstance(item, PredApp):
        if item.sym.kind == KIND_SYSTEM:
            return _chc_assertion(_expand_system_app(hs, idx, item))
        return _chc_app_atom(item)
    return _chc_assertion(item)


def _expand_system_app(hs: HornSystem, idx: int, app: PredApp) -> Assertion:
    if hs.defs is None or hs.base_vars is None or app.sym.name not in hs.defs:
        raise NotExportable(f"no definition attached for {app.sym.name}", idx)
    body = hs.defs[app.sym.name]
    base = hs.base_vars
    mapping: dict[Var, Term] = {}
    if app.sym.name == "init":
        for i, name in enumerate(base):
            mapping[Var(name)] = app.args[i]
    else:
        half = len(app.args) // 2
        for i, name in enumerate(base):
            mapping[Var(name)] = app.args[i]
            mapping[Var(name, True)] = app.args[half + i]
    return logic.substitute_map(body, mapping)


def _chc_app_atom(app: PredApp) -> str:
    if not app.args:
        return app.sym.name
    return f"({app.sym.name} {' '.join(_chc_term(t) for t in app.args)})"


def _chc_var(v: Var) -> str:
    return v.name + "!" if v.primed else v.name


def _chc_term(t: Term) -> str:
    parts = []
    for v, cf in t.coeffs:
        if cf == 1:
            parts.append(_chc_var(v))
        elif cf == -1:
            parts.append(f"(- {_chc_var(v)})")
        else:
            parts.append(f"(* {cf} {_chc_var(v)})" if cf >= 0 else f"(- (* {-cf} {_chc_var(v)}))")
    if t.const != 0 or not parts:
        parts.append(str(t.const) if t.const >= 0 else f"(- {-t.const})")
    if len(parts) == 1:
        return parts[0]
    return f"(+ {' '.join(parts)})"


def _chc_assertion(a: Assertion) -> str:
    if isinstance(a, logic.Cmp):
        lhs, rhs = _chc_term(a.lhs), _chc_term(a.rhs)
        if a.op == "=":
            return f"(= {lhs} {rhs})"
        if a.op == "!=":
            return f"(not (= {lhs} {rhs}))"
        return f"({a.op} {lhs} {rhs})"
    if isinstance(a, logic.BoolLit):
        return "true" if a.value else "false"
    if isinstance(a, logic.Not):
        return f"(not {_chc_assertion(a.arg)})"
    if isinstance(a, logic.And):
        return f"(and {_chc_assertion(a.lhs)} {_chc_assertion(a.rhs)})"
    if isinstance(a, logic.Or):
        return f"(or {_chc_assertion(a.lhs)} {_chc_assertion(a.rhs)})"
    if isinstance(a, logic.Implies):
        return f"(=> {_chc_assertion(a.lhs)} {_chc_assertion(a.rhs)})"
    raise TypeError(f"not an assertion: {a!r}")


def _clause_vars(c: HornClause) -> tuple[Var, ...]:
    """Free variables in first-occurrence order (existentials excluded)."""
    seen: list[Var] = []

    def add_term(t: Term) -> None:
        for v, _ in t.coeffs:
            if v not in seen:
                seen.append(v)

    def add_item(item) -> None:
        if isinstance(item, PredApp):
            for t in item.args:
                add_term(t)
        elif isinstance(item, Neg):
            add_item(item.app)
        else:
            for v in sorted(logic.free_vars(item)):
                if v not in seen:
                    seen.append(v)

    for item in c.premise:
        add_item(item)
    if c.head.guard is not None:
        add_item(c.head.guard)
    for item in c.head.items():
        add_item(item)
    return tuple(v for v in seen if v not in c.head.exists)


def clause_free_vars(c: HornClause) -> tuple[Var, ...]:
    return _clause_vars(c)
