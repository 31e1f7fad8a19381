"""Compilation of temporal formulas into implication constraints.

Each subformula is activated by a predicate application over the current
scope: the base system variables plus every data variable bound so far.
Quantifiers extend the scope, temporal operators introduce invariant and
ranking symbols, and eventualities record a well-foundedness obligation
on their ranking relation. Atom subformulas are folded into the clause
that uses them instead of receiving a symbol of their own.

`next` is applied at the widened arity of the current scope; the frame
equalities `x' = x` for quantifier-bound variables are emitted as
separate conjuncts.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import formula as F
from . import logic
from .errors import OpenFormula, UnsupportedConstruct
from .formula import check_no_shadowing, free_data_vars, render_formula
from .horn import (
    KIND_SYSTEM,
    KIND_WF,
    FreshNames,
    Head,
    HornClause,
    HornSystem,
    Neg,
    PredApp,
    PredicateSymbol,
    render_app,
)
from .logic import Assertion, Var, var_term
from .system import TransitionSystem

# One activation record: (formula, scope, activation, transition) rendered.
TraceRow = tuple[str, str, str, str]


@dataclass(frozen=True)
class GenContext:
    """Scope variables, activating application, and frame equalities."""

    scope: tuple[Var, ...]
    premise: PredApp
    frames: tuple[Assertion, ...]


def gen(f: F.Formula, ts: TransitionSystem) -> HornSystem:
    hs, _ = gen_with_trace(f, ts)
    return hs


def gen_trace(f: F.Formula, ts: TransitionSystem) -> tuple[TraceRow, ...]:
    _, rows = gen_with_trace(f, ts)
    return rows


def gen_with_trace(f: F.Formula, ts: TransitionSystem) -> tuple[HornSystem, tuple[TraceRow, ...]]:
    check_no_shadowing(f, ts.vars)
    open_names = free_data_vars(f) - set(ts.vars)
    if open_names:
        raise OpenFormula(sorted(open_names))
    g = _Gen(ts)
    g.gen(f, g.root_context())
    hs = HornSystem(
        tuple(g.preds),
        tuple(g.clauses),
        tuple(g.wf),
        base_vars=ts.vars,
        defs={"init": ts.init, "next": ts.next},
    )
    return hs, tuple(g.trace)


def render_gen_trace(rows: tuple[TraceRow, ...]) -> str:
    return "\n".join(f"Gen({r[0]}; {r[1]}; {r[2]}; {r[3]})" for r in rows)


class _Gen:
    def __init__(self, ts: TransitionSystem):
        self.names = FreshNames()
        self.base = tuple(Var(n) for n in ts.vars)
        self.init_sym = PredicateSymbol("init", len(ts.vars), KIND_SYSTEM)
        self.next_sym = PredicateSymbol("next", 2 * len(ts.vars), KIND_SYSTEM)
        self.preds: list[PredicateSymbol] = [self.init_sym]
        self._next_seen = False
        self.clauses: list[HornClause] = []
        self.wf: list[str] = []
        self.trace: list[TraceRow] = []
        self._base_next = render_app(
            PredApp(self.next_sym, _args(self.base) + _args(self.base, primed=True))
        )

    def root_context(self) -> GenContext:
        return GenContext(self.base, PredApp(self.init_sym, _args(self.base)), ())

    # -- bookkeeping

    def fresh(self, prefix: str, arity: int, kind: str = "query") -> PredicateSymbol:
        sym = self.names.fresh_pred(prefix, arity, kind)
        self.preds.append(sym)
        return sym

    def app(self, sym: PredicateSymbol, scope: tuple[Var, ...], primed: bool = False) -> PredApp:
        return PredApp(sym, _args(scope, primed))

    def next_app(self, scope: tuple[Var, ...]) -> PredApp:
        if not self._next_seen:
            self.preds.append(self.next_sym)
            self._next_seen = True
        return PredApp(self.next_sym, _args(scope) + _args(scope, primed=True))

    def emit(self, premise, head: Head) -> None:
        self.clauses.append(HornClause(tuple(premise), head))

    def row(self, f: F.Formula, ctx: GenContext, override: str | None = None) -> None:
        nxt = " && ".join([self._base_next] + [logic.render_assertion(a, 3) for a in ctx.frames])
        text = override if override is not None else render_formula(f)
        self.trace.append((text, _fmt_scope(ctx.scope), render_app(ctx.premise), nxt))

    def extend(self, ctx: GenContext, name: str, premise: PredApp) -> GenContext:
        frame = logic.Cmp(var_term(Var(name, True)), "=", var_term(Var(name)))
        return GenContext(ctx.scope + (Var(name),), premise, ctx.frames + (frame,))

    # -- dispatch

    def gen(self, f: F.Formula, ctx: GenContext) -> None:
        self.row(f, ctx)
        if isinstance(f, F.Atom):
            self.emit([ctx.premise], Head(outer=(f.pred,)))
        elif isinstance(f, F.Forall):
            self.gen(f.body, self.extend(ctx, f.var, ctx.premise))
        elif isinstance(f, F.Exists):
            scope2 = ctx.scope + (Var(f.var),)
            aux = self.fresh("aux", len(scope2))
            aux_app = self.app(aux, scope2)
            self.emit([ctx.premise], Head(exists=(Var(f.var),), inner=(aux_app,)))
            self.gen(f.body, self.extend(ctx, f.var, aux_app))
        elif isinstance(f, F.Guard):
            self._guard(f.guard, f.body, ctx)
        elif isinstance(f, F.FAnd):
            self._conj(f, ctx)
        elif isinstance(f, F.FOr):
            self._disj(f, ctx)
        elif isinstance(f, (F.A, F.E)):
            self._temporal(f, ctx)
        elif isinstance(f, F.FNot):
            raise UnsupportedConstruct("negation must be pushed to atoms before generation")
        else:
            raise TypeError(f"not a formula: {f!r}")

    def _guard(self, g: Assertion, body: F.Formula, ctx: GenContext) -> None:
        if isinstance(body, F.Atom):
            # Folds to one theory assertion; the textual reader produces
            # the same shape when reading the emitted clause back.
            self.emit([ctx.premise], Head(outer=(logic.Implies(g, body.pred),)))
            return
        aux = self.fresh("aux", len(ctx.scope))
        aux_app = self.app(aux, ctx.scope)
        self.emit([ctx.premise], Head(guard=g, outer=(aux_app,)))
        self.row(body, ctx, override=f"{logic.render_assertion(g, 3)} -> {render_app(aux_app)}")
        self.gen(body, GenContext(ctx.scope, aux_app, ctx.frames))

    def _conj(self, f: F.FAnd, ctx: GenContext) -> None:
        items: list = []
        todo: list[tuple[F.Formula, PredApp]] = []
        for child in (f.lhs, f.rhs):
            if isinstance(child, F.Atom):
                items.append(child.pred)
            else:
                aux = self.fresh("aux", len(ctx.scope))
                app = self.app(aux, ctx.scope)
                items.append(app)
                todo.append((child, app))
        self.emit([ctx.premise], Head(outer=tuple(items)))
        for child, app in todo:
            self.gen(child, GenContext(ctx.scope, app, ctx.frames))

    def _disj(self, f: F.FOr, ctx: GenContext) -> None:
        if isinstance(f.lhs, F.Atom) and isinstance(f.rhs, F.Atom):
            self.emit([ctx.premise], Head(outer=(logic.Or(f.lhs.pred, f.rhs.pred),)))
            return
        if isinstance(f.lhs, F.Atom) or isinstance(f.rhs, F.Atom):
            atom, other = (f.lhs, f.rhs) if isinstance(f.lhs, F.Atom) else (f.rhs, f.lhs)
            self._guard(logic.negate(atom.pred), other, ctx)
            return
        aux1 = self.fresh("aux", len(ctx.scope))
        aux2 = self.fresh("aux", len(ctx.scope))
        self.emit(
            [ctx.premise, Neg(self.app(aux1, ctx.scope))],
            Head(outer=(self.app(aux2, ctx.scope),)),
        )
        self.gen(f.lhs, GenContext(ctx.scope, self.app(aux1, ctx.scope), ctx.frames))
        self.gen(f.rhs, GenContext(ctx.scope, self.app(aux2, ctx.scope), ctx.frames))

    # -- temporal operators

    def _temporal(self, f, ctx: GenContext) -> None:
        universal = isinstance(f, F.A)
        p = f.path
        if isinstance(p, F.F):
            p = F.U(F.ATOM_TRUE, p.body)
        if isinstance(p, F.X):
            self._next_step(universal, p.body, ctx)
        elif isinstance(p, F.G):
            self._globally(universal, p.body, ctx)
        elif isinstance(p, F.U):
            self._until(universal, p.lhs, p.rhs, ctx)
        else:
            raise TypeError(f"not a path formula: {p!r}")

    def _next_step(self, universal: bool, body: F.Formula, ctx: GenContext) -> None:
        nxt = self.next_app(ctx.scope)
        primed = tuple(Var(v.name, True) for v in ctx.scope)
        if isinstance(body, F.Atom):
            target = logic.rename_vars(body.pred, {v: Var(v.name, True) for v in ctx.scope})
            rec = None
        else:
            aux = self.fresh("aux", len(ctx.scope))
            target = self.app(aux, ctx.scope, primed=True)
            rec = (body, self.app(aux, ctx.scope))
        if universal:
            # Some successor exists; the property holds after every step.
            self.emit([ctx.premise], Head(exists=primed, inner=(nxt, *ctx.frames)))
            self.emit([ctx.premise, nxt, *ctx.frames], Head(outer=(target,)))
        else:
            self.emit([ctx.premise], Head(exists=primed, inner=(nxt, *ctx.frames, target)))
        if rec is not None:
            self.gen(rec[0], GenContext(ctx.scope, rec[1], ctx.frames))

    def _globally(self, universal: bool, body: F.Formula, ctx: GenContext) -> None:
        inv = self.fresh("inv", len(ctx.scope))
        inv_app = self.app(inv, ctx.scope)
        inv_next = self.app(inv, ctx.scope, primed=True)
        nxt = self.next_app(ctx.scope)
        primed = tuple(Var(v.name, True) for v in ctx.scope)
        self.emit([ctx.premise], Head(outer=(inv_app,)))
        if universal:
            self.emit([inv_app, nxt, *ctx.frames], Head(outer=(inv_next,)))
        else:
            self.emit([inv_app], Head(exists=primed, inner=(nxt, *ctx.frames, inv_next)))
        if isinstance(body, F.Atom):
            self.emit([inv_app], Head(outer=(body.pred,)))
        else:
            self.gen(body, GenContext(ctx.scope, inv_app, ctx.frames))

    def _until(self, universal: bool, lhs: F.Formula, rhs: F.Formula, ctx: GenContext) -> None:
        inv = self.fresh("inv", len(ctx.scope))
        inv_app = self.app(inv, ctx.scope)
        inv_next = self.app(inv, ctx.scope, primed=True)
        rec: list[tuple[F.Formula, PredApp]] = []
        if isinstance(lhs, F.Atom):
            start: tuple = () if F.is_atom_true(lhs) else (lhs.pred,)
        else:
            aux1 = self.fresh("aux", len(ctx.scope))
            start = (self.app(aux1, ctx.scope),)
            rec.append((lhs, self.app(aux1, ctx.scope)))
        if isinstance(rhs, F.Atom):
            stop = logic.Not(rhs.pred)
        else:
            aux2 = self.fresh("aux", len(ctx.scope))
            stop = Neg(self.app(aux2, ctx.scope))
            rec.append((rhs, self.app(aux2, ctx.scope)))
        nxt = self.next_app(ctx.scope)
        primed = tuple(Var(v.name, True) for v in ctx.scope)
        rank = self.fresh("rank", 2 * len(ctx.scope), KIND_WF)
        rank_app = PredApp(rank, _args(ctx.scope) + _args(ctx.scope, primed=True))
        self.emit([ctx.premise], Head(outer=(inv_app,)))
        if universal:
            # While the goal is open: the start side holds, a step exists,
            # and every step stays in the invariant while decreasing rank.
            self.emit([inv_app, stop], Head(outer=start, exists=primed, inner=(nxt, *ctx.frames)))
            self.emit([inv_app, stop, nxt, *ctx.frames], Head(outer=(inv_next, rank_app)))
        else:
            self.emit(
                [inv_app, stop],
                Head(outer=start, exists=primed, inner=(nxt, *ctx.frames, inv_next, rank_app)),
            )
        self.wf.append(rank.name)
        for child, app in rec:
            self.gen(child, GenContext(ctx.scope, app, ctx.frames))


def _args(scope: tuple[Var, ...], primed: bool = False) -> tuple:
    return tuple(var_term(Var(v.name, True) if primed else v) for v in scope)


def _fmt_scope(scope: tuple[Var, ...]) -> str:
    if len(scope) == 1:
        return scope[0].key()
    return "(" + ", ".join(v.key() for v in scope) + ")"
