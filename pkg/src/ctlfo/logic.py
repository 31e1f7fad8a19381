"""Integer terms, quantifier-free assertions, and their evaluation.

Terms are kept in a normal form: a sorted linear combination of variables
plus a constant. Assertions are the boolean layer over comparisons; the
implication connective is first class so that emitted constraint text can
keep the `c1 -> c2` shape instead of a rewritten disjunction.

States map variable keys to integers. A primed variable v' is looked up
under the key "v'", so a transition assertion is evaluated on one merged
mapping holding both the current and the next values.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import UnboundVariable

State = Mapping[str, int]

REL_OPS = ("=", "!=", "<", "<=", ">", ">=")

_REL_FUNS: dict[str, Callable[[int, int], bool]] = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}

_REL_NEG = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


@dataclass(frozen=True, order=True)
class Var:
    """A variable occurrence; `primed` marks the post-state copy."""

    name: str
    primed: bool = False

    def key(self) -> str:
        return self.name + "'" if self.primed else self.name


@dataclass(frozen=True)
class Term:
    """Linear combination: sum of coeff*var plus a constant.

    `coeffs` is sorted by variable and holds no zero coefficients, so
    structural equality coincides with arithmetic identity.
    """

    coeffs: tuple[tuple[Var, int], ...] = ()
    const: int = 0


def const_term(n: int) -> Term:
    return Term((), n)


def var_term(v: Var | str) -> Term:
    if isinstance(v, str):
        v = Var(v)
    return Term(((v, 1),), 0)


def _norm(parts: dict[Var, int], const: int) -> Term:
    items = tuple(sorted((v, c) for v, c in parts.items() if c != 0))
    return Term(items, const)


def term_add(a: Term, b: Term) -> Term:
    parts = dict(a.coeffs)
    for v, c in b.coeffs:
        parts[v] = parts.get(v, 0) + c
    return _norm(parts, a.const + b.const)


def term_scale(a: Term, k: int) -> Term:
    return _norm({v: c * k for v, c in a.coeffs}, a.const * k)


def term_sub(a: Term, b: Term) -> Term:
    return term_add(a, term_scale(b, -1))


def eval_term(t: Term, s: State) -> int:
    total = t.const
    for v, c in t.coeffs:
        key = v.key()
        if key not in s:
            raise UnboundVariable(key)
        total += c * s[key]
    return total


def term_vars(t: Term) -> frozenset[Var]:
    return frozenset(v for v, _ in t.coeffs)


def term_substitute(t: Term, x: str, r: Term) -> Term:
    """Replace the unprimed variable x by the term r."""
    target = Var(x)
    parts = dict(t.coeffs)
    k = parts.pop(target, 0)
    if k == 0:
        return t
    scaled = term_scale(r, k)
    for v, c in scaled.coeffs:
        parts[v] = parts.get(v, 0) + c
    return _norm(parts, t.const + scaled.const)


class Assertion:
    """Base of the quantifier-free boolean layer."""

    __slots__ = ()


@dataclass(frozen=True)
class Cmp(Assertion):
    lhs: Term
    op: str
    rhs: Term


@dataclass(frozen=True)
class BoolLit(Assertion):
    value: bool


@dataclass(frozen=True)
class Not(Assertion):
    arg: Assertion


@dataclass(frozen=True)
class And(Assertion):
    lhs: Assertion
    rhs: Assertion


@dataclass(frozen=True)
class Or(Assertion):
    lhs: Assertion
    rhs: Assertion


@dataclass(frozen=True)
class Implies(Assertion):
    lhs: Assertion
    rhs: Assertion


TRUE = BoolLit(True)
FALSE = BoolLit(False)


def eval_assertion(a: Assertion, s: State) -> bool:
    if isinstance(a, Cmp):
        return _REL_FUNS[a.op](eval_term(a.lhs, s), eval_term(a.rhs, s))
    if isinstance(a, BoolLit):
        return a.value
    if isinstance(a, Not):
        return not eval_assertion(a.arg, s)
    if isinstance(a, And):
        return eval_assertion(a.lhs, s) and eval_assertion(a.rhs, s)
    if isinstance(a, Or):
        return eval_assertion(a.lhs, s) or eval_assertion(a.rhs, s)
    if isinstance(a, Implies):
        return (not eval_assertion(a.lhs, s)) or eval_assertion(a.rhs, s)
    raise TypeError(f"not an assertion: {a!r}")


def free_vars(a: Assertion) -> frozenset[Var]:
    if isinstance(a, Cmp):
        return term_vars(a.lhs) | term_vars(a.rhs)
    if isinstance(a, BoolLit):
        return frozenset()
    if isinstance(a, Not):
        return free_vars(a.arg)
    if isinstance(a, (And, Or, Implies)):
        return free_vars(a.lhs) | free_vars(a.rhs)
    raise TypeError(f"not an assertion: {a!r}")


def substitute(a: Assertion, x: str, t: Term) -> Assertion:
    """Capture-free substitution of the unprimed variable x by t.

    Assertions are quantifier free, so this is plain structural rewriting.
    """
    if isinstance(a, Cmp):
        return Cmp(term_substitute(a.lhs, x, t), a.op, term_substitute(a.rhs, x, t))
    if isinstance(a, BoolLit):
        return a
    if isinstance(a, Not):
        return Not(substitute(a.arg, x, t))
    if isinstance(a, And):
        return And(substitute(a.lhs, x, t), substitute(a.rhs, x, t))
    if isinstance(a, Or):
        return Or(substitute(a.lhs, x, t), substitute(a.rhs, x, t))
    if isinstance(a, Implies):
        return Implies(substitute(a.lhs, x, t), substitute(a.rhs, x, t))
    raise TypeError(f"not an assertion: {a!r}")


def rename_vars(a: Assertion, mapping: Mapping[Var, Var]) -> Assertion:
    """Rename variable occurrences (used to move an assertion across scopes)."""

    def ren_term(t: Term) -> Term:
        parts: dict[Var, int] = {}
        for v, c in t.coeffs:
            w = mapping.get(v, v)
            parts[w] = parts.get(w, 0) + c
        return _norm(parts, t.const)

    if isinstance(a, Cmp):
        return Cmp(ren_term(a.lhs), a.op, ren_term(a.rhs))
    if isinstance(a, BoolLit):
        return a
    if isinstance(a, Not):
        return Not(rename_vars(a.arg, mapping))
    if isinstance(a, And):
        return And(rename_vars(a.lhs, mapping), rename_vars(a.rhs, mapping))
    if isinstance(a, Or):
        return Or(rename_vars(a.lhs, mapping), rename_vars(a.rhs, mapping))
    if isinstance(a, Implies):
        return Implies(rename_vars(a.lhs, mapping), rename_vars(a.rhs, mapping))
    raise TypeError(f"not an assertion: {a!r}")


def substitute_map(a: Assertion, mapping: Mapping[Var, Term]) -> Assertion:
    """Simultaneous substitution of variables (primed or not) by terms."""

    def sub_term(t: Term) -> Term:
        out = const_term(t.const)
        for v, c in t.coeffs:
            repl = mapping.get(v)
            out = term_add(out, term_scale(repl, c) if repl is not None else Term(((v, c),), 0))
        return out

    if isinstance(a, Cmp):
        return Cmp(sub_term(a.lhs), a.op, sub_term(a.rhs))
    if isinstance(a, BoolLit):
        return a
    if isinstance(a, Not):
        return Not(substitute_map(a.arg, mapping))
    if isinstance(a, And):
        return And(substitute_map(a.lhs, mapping), substitute_map(a.rhs, mapping))
    if isinstance(a, Or):
        return Or(substitute_map(a.lhs, mapping), substitute_map(a.rhs, mapping))
    if isinstance(a, Implies):
        return Implies(substitute_map(a.lhs, mapping), substitute_map(a.rhs, mapping))
    raise TypeError(f"not an assertion: {a!r}")


def negate(a: Assertion) -> Assertion:
    """Negation pushed down to comparisons (no Not nodes in the result)."""
    if isinstance(a, Cmp):
        return Cmp(a.lhs, _REL_NEG[a.op], a.rhs)
    if isinstance(a, BoolLit):
        return BoolLit(not a.value)
    if isinstance(a, Not):
        return positive(a.arg)
    if isinstance(a, And):
        return Or(negate(a.lhs), negate(a.rhs))
    if isinstance(a, Or):
        return And(negate(a.lhs), negate(a.rhs))
    if isinstance(a, Implies):
        return And(positive(a.lhs), negate(a.rhs))
    raise TypeError(f"not an assertion: {a!r}")


def positive(a: Assertion) -> Assertion:
    """Same assertion with every Not pushed down and eliminated."""
    if isinstance(a, Not):
        return negate(a.arg)
    if isinstance(a, And):
        return And(positive(a.lhs), positive(a.rhs))
    if isinstance(a, Or):
        return Or(positive(a.lhs), positive(a.rhs))
    if isinstance(a, Implies):
        return Implies(positive(a.lhs), positive(a.rhs))
    return a


# Rendering. Precedence mirrors the input grammar: `||` is loosest, then
# `&&`, then `->` (right associative), then comparisons.

_LEVEL_OR, _LEVEL_AND, _LEVEL_IMPL, _LEVEL_CMP = 0, 1, 2, 3


def render_term(t: Term) -> str:
    if not t.coeffs:
        return str(t.const)
    out: list[str] = []
    for i, (v, c) in enumerate(t.coeffs):
        mag = abs(c)
        atom = v.key() if mag == 1 else f"{mag}*{v.key()}"
        if i == 0:
            out.append(f"-{atom}" if c < 0 else atom)
        else:
            out.append(f"- {atom}" if c < 0 else f"+ {atom}")
    if t.const != 0:
        out.append(f"- {abs(t.const)}" if t.const < 0 else f"+ {t.const}")
    return " ".join(out)


def _level(a: Assertion) -> int:
    if isinstance(a, Or):
        return _LEVEL_OR
    if isinstance(a, And):
        return _LEVEL_AND
    if isinstance(a, Implies):
        return _LEVEL_IMPL
    return _LEVEL_CMP


def render_assertion(a: Assertion, required: int = 0) -> str:
    mine = _level(a)
    if isinstance(a, Cmp):
        body = f"{render_term(a.lhs)} {a.op} {render_term(a.rhs)}"
    elif isinstance(a, BoolLit):
        body = "true" if a.value else "false"
    elif isinstance(a, Not):
        body = f"!({render_assertion(a.arg)})"
    elif isinstance(a, Or):
        body = f"{render_assertion(a.lhs, _LEVEL_OR)} || {render_assertion(a.rhs, _LEVEL_OR + 1)}"
    elif isinstance(a, And):
        body = f"{render_assertion(a.lhs, _LEVEL_AND)} && {render_assertion(a.rhs, _LEVEL_AND + 1)}"
    elif isinstance(a, Implies):
        body = f"{render_assertion(a.lhs, _LEVEL_CMP)} -> {render_assertion(a.rhs, _LEVEL_IMPL)}"
    else:
        raise TypeError(f"not an assertion: {a!r}")
    if mine < required:
        return f"({body})"
    return body


def compile_assertion(a: Assertion) -> Callable[[State], bool]:
    """Closure-compile an assertion for the grounding/checking hot loops.

    Agrees with eval_assertion everywhere; raises KeyError (not
    UnboundVariable) on missing variables, so callers must supply full
    states.
    """
    if isinstance(a, Cmp):
        lhs, rhs, fun = _compile_term(a.lhs), _compile_term(a.rhs), _REL_FUNS[a.op]
        return lambda s: fun(lhs(s), rhs(s))
    if isinstance(a, BoolLit):
        v = a.value
        return lambda s: v
    if isinstance(a, Not):
        f = compile_assertion(a.arg)
        return lambda s: not f(s)
    if isinstance(a, And):
        f, g = compile_assertion(a.lhs), compile_assertion(a.rhs)
        return lambda s: f(s) and g(s)
    if isinstance(a, Or):
        f, g = compile_assertion(a.lhs), compile_assertion(a.rhs)
        return lambda s: f(s) or g(s)
    if isinstance(a, Implies):
        f, g = compile_assertion(a.lhs), compile_assertion(a.rhs)
        return lambda s: (not f(s)) or g(s)
    raise TypeError(f"not an assertion: {a!r}")


def compile_term(t: Term) -> Callable[[State], int]:
    items = tuple((v.key(), c) for v, c in t.coeffs)
    const = t.const
    if not items:
        return lambda s: const
    if len(items) == 1:
        k0, c0 = items[0]
        return lambda s: c0 * s[k0] + const
    return lambda s: sum(c * s[k] for k, c in items) + const


_compile_term = compile_term
