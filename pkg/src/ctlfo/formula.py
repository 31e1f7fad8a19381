"""Temporal formulas: data quantifiers freely nested with path operators.

The shape is two-layered: a state formula is an atom, a boolean
combination, a data quantifier, a guard (theory atom implying a formula),
or a path quantifier A/E applied to a path formula X/G/F/U. F is sugar
for `true U -`. Negation is a transient node: `negation_normal_form`
removes it by the dualities below, and the constraint generator rejects
formulas that still contain it.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import logic
from .errors import ShadowingError, UndeclaredVariable, UnsupportedConstruct
from .logic import Assertion, Var


class Formula:
    __slots__ = ()


class Path:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    pred: Assertion


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class FAnd(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class FOr(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class FNot(Formula):
    body: Formula


@dataclass(frozen=True)
class Guard(Formula):
    """`guard -> body` where guard is a theory assertion.

    Semantically the disjunction of the negated guard with the body; kept
    as its own node so emitted constraints preserve the implication shape.
    """

    guard: Assertion
    body: Formula


@dataclass(frozen=True)
class A(Formula):
    path: Path


@dataclass(frozen=True)
class E(Formula):
    path: Path


@dataclass(frozen=True)
class X(Path):
    body: Formula


@dataclass(frozen=True)
class G(Path):
    body: Formula


@dataclass(frozen=True)
class F(Path):
    body: Formula


@dataclass(frozen=True)
class U(Path):
    lhs: Formula
    rhs: Formula


ATOM_TRUE = Atom(logic.TRUE)


def is_atom_true(f: Formula) -> bool:
    return isinstance(f, Atom) and f.pred == logic.TRUE


def desugar(f: Formula) -> Formula:
    """Rewrite every F into `true U -`. Idempotent."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Forall):
        return Forall(f.var, desugar(f.body))
    if isinstance(f, Exists):
        return Exists(f.var, desugar(f.body))
    if isinstance(f, FAnd):
        return FAnd(desugar(f.lhs), desugar(f.rhs))
    if isinstance(f, FOr):
        return FOr(desugar(f.lhs), desugar(f.rhs))
    if isinstance(f, FNot):
        return FNot(desugar(f.body))
    if isinstance(f, Guard):
        return Guard(f.guard, desugar(f.body))
    if isinstance(f, (A, E)):
        ctor = type(f)
        p = f.path
        if isinstance(p, X):
            return ctor(X(desugar(p.body)))
        if isinstance(p, G):
            return ctor(G(desugar(p.body)))
        if isinstance(p, F):
            return ctor(U(ATOM_TRUE, desugar(p.body)))
        if isinstance(p, U):
            return ctor(U(desugar(p.lhs), desugar(p.rhs)))
    raise TypeError(f"not a formula: {f!r}")


def negation_normal_form(f: Formula) -> Formula:
    """Push all negations down to atoms.

    Dualities (total systems assumed for the X cases):
      !forall = exists !, !AX = EX !, !AG p = A-dual via E(true U !p),
      !EG p = A(true U !p), !A(p U q) = E(!q U (!p && !q)) || EG(!q)
      and symmetrically for E; at atoms the theory relation is flipped.
    Structure is shared through a memo table, so the result grows by at
    most a constant per negated U when measured as a DAG.
    """
    memo: dict[tuple[Formula, bool], Formula] = {}

    def walk(g: Formula, neg: bool) -> Formula:
        key = (g, neg)
        hit = memo.get(key)
        if hit is not None:
            return hit
        memo[key] = out = _nnf(g, neg, walk)
        return out

    return walk(f, False)


def _nnf(g: Formula, neg: bool, walk) -> Formula:
    if isinstance(g, Atom):
        return Atom(logic.negate(g.pred)) if neg else g
    if isinstance(g, FNot):
        return walk(g.body, not neg)
    if isinstance(g, Forall):
        return Exists(g.var, walk(g.body, True)) if neg else Forall(g.var, walk(g.body, False))
    if isinstance(g, Exists):
        return Forall(g.var, walk(g.body, True)) if neg else Exists(g.var, walk(g.body, False))
    if isinstance(g, FAnd):
        if neg:
            return FOr(walk(g.lhs, True), walk(g.rhs, True))
        return FAnd(walk(g.lhs, False), walk(g.rhs, False))
    if isinstance(g, FOr):
        if neg:
            return FAnd(walk(g.lhs, True), walk(g.rhs, True))
        return FOr(walk(g.lhs, False), walk(g.rhs, False))
    if isinstance(g, Guard):
        if neg:
            return FAnd(Atom(logic.positive(g.guard)), walk(g.body, True))
        return Guard(g.guard, walk(g.body, False))
    if isinstance(g, (A, E)):
        pos_ctor = type(g)
        dual_ctor = E if isinstance(g, A) else A
        p = g.path
        if not neg:
            if isinstance(p, X):
                return pos_ctor(X(walk(p.body, False)))
            if isinstance(p, G):
                return pos_ctor(G(walk(p.body, False)))
            if isinstance(p, F):
                return pos_ctor(F(walk(p.body, False)))
            return pos_ctor(U(walk(p.lhs, False), walk(p.rhs, False)))
        if isinstance(p, X):
            return dual_ctor(X(walk(p.body, True)))
        if isinstance(p, G):
            return dual_ctor(U(ATOM_TRUE, walk(p.body, True)))
        if isinstance(p, F):
            return dual_ctor(G(walk(p.body, True)))
        # !(p U q) = (!q U (!p && !q)) || G !q, under the flipped quantifier.
        nl, nr = walk(p.lhs, True), walk(p.rhs, True)
        if is_atom_true(p.lhs):
            return dual_ctor(G(nr))
        return FOr(dual_ctor(U(nr, FAnd(nl, nr))), dual_ctor(G(nr)))
    raise TypeError(f"not a formula: {g!r}")


def formula_size(f: Formula) -> int:
    """Tree node count; path operators count, their A/E wrapper does not."""
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (Forall, Exists, FNot)):
        return 1 + formula_size(f.body)
    if isinstance(f, (FAnd, FOr)):
        return 1 + formula_size(f.lhs) + formula_size(f.rhs)
    if isinstance(f, Guard):
        return 1 + formula_size(f.body)
    if isinstance(f, (A, E)):
        p = f.path
        if isinstance(p, U):
            return 1 + formula_size(p.lhs) + formula_size(p.rhs)
        return 1 + formula_size(p.body)
    raise TypeError(f"not a formula: {f!r}")


def dag_size(f: Formula) -> int:
    """Number of structurally distinct subformulas (shared nodes count once)."""
    seen: set[Formula] = set()

    def walk(g: Formula) -> None:
        if g in seen:
            return
        seen.add(g)
        if isinstance(g, (Forall, Exists, FNot)):
            walk(g.body)
        elif isinstance(g, (FAnd, FOr)):
            walk(g.lhs)
            walk(g.rhs)
        elif isinstance(g, Guard):
            walk(g.body)
        elif isinstance(g, (A, E)):
            p = g.path
            if isinstance(p, U):
                walk(p.lhs)
                walk(p.rhs)
            else:
                walk(p.body)

    walk(f)
    return len(seen)


def count_until(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, (Forall, Exists, FNot, Guard)):
        return count_until(f.body)
    if isinstance(f, (FAnd, FOr)):
        return count_until(f.lhs) + count_until(f.rhs)
    if isinstance(f, (A, E)):
        p = f.path
        if isinstance(p, U):
            return 1 + count_until(p.lhs) + count_until(p.rhs)
        if isinstance(p, F):
            return 1 + count_until(p.body)
        return count_until(p.body)
    raise TypeError(f"not a formula: {f!r}")


def _binder_subtrees(f: Formula):
    if isinstance(f, (Forall, Exists, FNot, Guard)):
        yield f.body
    elif isinstance(f, (FAnd, FOr)):
        yield f.lhs
        yield f.rhs
    elif isinstance(f, (A, E)):
        p = f.path
        if isinstance(p, U):
            yield p.lhs
            yield p.rhs
        else:
            yield p.body


def _own_assertions(f: Formula):
    if isinstance(f, Atom):
        yield f.pred
    elif isinstance(f, Guard):
        yield f.guard


def free_data_vars(f: Formula) -> frozenset[str]:
    """Names occurring in atoms and not bound by a data quantifier."""

    def walk(g: Formula, bound: frozenset[str]) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for a in _own_assertions(g):
            out |= frozenset(v.name for v in logic.free_vars(a)) - bound
        if isinstance(g, (Forall, Exists)):
            return out | walk(g.body, bound | {g.var})
        for sub in _binder_subtrees(g):
            out |= walk(sub, bound)
        return out

    return walk(f, frozenset())


def check_no_shadowing(f: Formula, program_vars: tuple[str, ...]) -> None:
    """Reject rebinding of any identifier and undeclared/primed atoms.

    Every quantifier must introduce a name distinct from the program
    variables and from all enclosing binders; atom variables must be
    declared (program or bound) and unprimed.
    """
    declared = set(program_vars)

    def walk(g: Formula, bound: tuple[str, ...], path: str) -> None:
        for a in _own_assertions(g):
            for v in logic.free_vars(a):
                if v.primed:
                    raise UnsupportedConstruct(f"primed variable {v.key()!r} in formula at {path}")
                if v.name not in declared and v.name not in bound:
                    raise UndeclaredVariable(v.name)
        if isinstance(g, (Forall, Exists)):
            kind = "forall" if isinstance(g, Forall) else "exists"
            here = f"{path}/{kind} {g.var}"
            if g.var in declared or g.var in bound:
                raise ShadowingError(g.var, here)
            walk(g.body, bound + (g.var,), here)
            return
        for sub in _binder_subtrees(g):
            walk(sub, bound, path + "/" + type(g).__name__)

    walk(f, (), "")


# Rendering. Formula-level precedence: `->` loosest, then `||`, then `&&`,
# then unary/temporal/atom. Atoms re-enter the assertion renderer; their
# top connective is mapped onto the formula levels so the printed text
# folds back to the same tree.

_F_IMPL, _F_OR, _F_AND, _F_UNARY = 0, 1, 2, 3


def _atom_level(a: Assertion) -> int:
    if isinstance(a, logic.Implies):
        return _F_IMPL
    if isinstance(a, logic.Or):
        return _F_OR
    if isinstance(a, logic.And):
        return _F_AND
    return _F_UNARY


def _render_atom(a: Assertion, required: int = 0) -> str:
    """Atom interior printed for the formula grammar.

    The two grammars disagree on `->`: tighter than `&&` in assertions,
    loosest in formulas. Reparsed formula text re-enters the formula
    grammar even inside parentheses, so every connective inside an atom
    must be parenthesized by formula precedence.
    """
    mine = _atom_level(a)
    if isinstance(a, logic.Implies):
        body = f"{_render_atom(a.lhs, _F_OR)} -> {_render_atom(a.rhs, _F_IMPL)}"
    elif isinstance(a, logic.Or):
        body = f"{_render_atom(a.lhs, _F_OR)} || {_render_atom(a.rhs, _F_OR + 1)}"
    elif isinstance(a, logic.And):
        body = f"{_render_atom(a.lhs, _F_AND)} && {_render_atom(a.rhs, _F_AND + 1)}"
    elif isinstance(a, logic.Not):
        body = f"!({_render_atom(a.arg)})"
    else:
        body = logic.render_assertion(a, 3)
    if mine < required:
        return f"({body})"
    return body


def render_formula(f: Formula, required: int = 0) -> str:
    if isinstance(f, Atom):
        mine = _atom_level(f.pred)
        body = _render_atom(f.pred)
    elif isinstance(f, (Forall, Exists)):
        mine = _F_UNARY
        kw = "forall" if isinstance(f, Forall) else "exists"
        return _wrap(f"{kw} {f.var}: {render_formula(f.body)}", required)
    elif isinstance(f, Guard):
        mine = _F_IMPL
        body = f"{_render_atom(f.guard, _F_OR)} -> {render_formula(f.body, _F_IMPL)}"
    elif isinstance(f, FOr):
        mine = _F_OR
        body = f"{render_formula(f.lhs, _F_OR)} || {render_formula(f.rhs, _F_OR + 1)}"
    elif isinstance(f, FAnd):
        mine = _F_AND
        body = f"{render_formula(f.lhs, _F_AND)} && {render_formula(f.rhs, _F_AND + 1)}"
    elif isinstance(f, FNot):
        mine = _F_UNARY
        body = f"!{render_formula(f.body, _F_UNARY)}"
    elif isinstance(f, (A, E)):
        mine = _F_UNARY
        q = "A" if isinstance(f, A) else "E"
        p = f.path
        if isinstance(p, U):
            body = f"{q}({render_formula(p.lhs)} U {render_formula(p.rhs)})"
        else:
            body = f"{q}{type(p).__name__}({render_formula(p.body)})"
    else:
        raise TypeError(f"not a formula: {f!r}")
    if mine < required:
        return f"({body})"
    return body


def _wrap(text: str, required: int) -> str:
    return f"({text})" if required > 0 else text
