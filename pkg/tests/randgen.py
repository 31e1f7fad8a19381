"""Seeded random instances shared across the test modules.

Systems are made total inside any box by disjoining a stutter step, so
path dualities hold and both engines see the same semantics. Step
relations are unions of deterministic guarded branches, keeping state
fan-out at desk scale. Formula generation covers the whole grammar; the
total number of data variables in scope (system plus quantified) stays
at or below three so ground instantiation stays small.
"""

from __future__ import annotations

import random

from ctlfo import logic
from ctlfo import formula as F
from ctlfo.logic import And, Cmp, Not, Or, Var, const_term, term_add, var_term
from ctlfo.system import TransitionSystem

SYS_NAMES = ("v", "w", "u")
FO_NAMES = ("x", "y", "z")
REL_OPS = ("=", "!=", "<", "<=", ">", ">=")


def rand_term(rng: random.Random, names, lo=-2, hi=2):
    pick = rng.random()
    if pick < 0.45:
        return var_term(Var(rng.choice(names)))
    if pick < 0.7:
        return term_add(var_term(Var(rng.choice(names))), const_term(rng.randint(lo, hi)))
    return const_term(rng.randint(lo, hi))


def rand_cmp(rng: random.Random, names, lo=-2, hi=2) -> Cmp:
    return Cmp(rand_term(rng, names, lo, hi), rng.choice(REL_OPS), rand_term(rng, names, lo, hi))


def rand_assertion(rng: random.Random, names, depth=2, lo=-2, hi=2):
    if depth <= 0 or rng.random() < 0.4:
        return rand_cmp(rng, names, lo, hi)
    k = rng.random()
    if k < 0.35:
        return And(rand_assertion(rng, names, depth - 1, lo, hi), rand_assertion(rng, names, depth - 1, lo, hi))
    if k < 0.7:
        return Or(rand_assertion(rng, names, depth - 1, lo, hi), rand_assertion(rng, names, depth - 1, lo, hi))
    if k < 0.85:
        return Not(rand_assertion(rng, names, depth - 1, lo, hi))
    return logic.Implies(rand_assertion(rng, names, depth - 1, lo, hi), rand_assertion(rng, names, depth - 1, lo, hi))


def _stutter(names) -> logic.Assertion:
    eqs = [Cmp(var_term(Var(n, True)), "=", var_term(Var(n))) for n in names]
    out = eqs[0]
    for e in eqs[1:]:
        out = And(out, e)
    return out


def _update(rng: random.Random, names, n, lo, hi) -> Cmp:
    """One primed equation: shift, constant, or copy of some variable."""
    target = var_term(Var(n, True))
    pick = rng.random()
    if pick < 0.4:
        return Cmp(target, "=", term_add(var_term(Var(rng.choice(names))), const_term(rng.randint(-1, 1))))
    if pick < 0.6:
        return Cmp(target, "=", const_term(rng.randint(lo, hi)))
    return Cmp(target, "=", var_term(Var(rng.choice(names))))


def _move(rng: random.Random, names, lo, hi):
    """A single branch of the step relation, pinning every variable.

    Branches stay deterministic so state fan-out is the branch count,
    not a power of the domain; half of them get an enabling guard.
    """
    out = _update(rng, names, names[0], lo, hi)
    for n in names[1:]:
        out = And(out, _update(rng, names, n, lo, hi))
    if rng.random() < 0.5:
        out = And(rand_cmp(rng, names, lo, hi), out)
    return out


def random_system(rng: random.Random, max_vars=3, lo=-2, hi=2, single_init=False) -> TransitionSystem:
    nv = rng.randint(1, max_vars)
    names = SYS_NAMES[:nv]
    if single_init:
        parts = [Cmp(var_term(Var(n)), "=", const_term(rng.randint(lo, hi))) for n in names]
        init = parts[0]
        for p in parts[1:]:
            init = And(init, p)
    elif rng.random() < 0.5:
        init = Cmp(var_term(Var(rng.choice(names))), rng.choice(REL_OPS), const_term(rng.randint(lo, hi)))
    else:
        init = rand_assertion(rng, names, 1, lo, hi)
    moves = _move(rng, names, lo, hi)
    for _ in range(rng.randint(0, 2)):
        moves = Or(moves, _move(rng, names, lo, hi))
    nxt = Or(moves, _stutter(names))
    return TransitionSystem(names, init, nxt)


def random_formula(rng: random.Random, sys_vars, depth=3, max_scope=3, allow_not=True) -> F.Formula:
    """Any grammar production; quantifiers stop once the scope is full."""
    return _formula(rng, tuple(sys_vars), depth, max_scope, allow_not)


def _atom(rng, names) -> F.Formula:
    return F.Atom(rand_cmp(rng, names))


def _formula(rng, names, depth, max_scope, allow_not):
    if depth <= 0:
        return _atom(rng, names)
    free = [n for n in FO_NAMES if n not in names]
    can_quantify = bool(free) and len(names) < max_scope
    while True:
        k = rng.randrange(10)
        if k in (0, 1):
            q = rng.choice((F.Forall, F.Exists)) if can_quantify else None
            if q is None:
                continue
            name = free[0]
            return q(name, _formula(rng, names + (name,), depth - 1, max_scope, allow_not))
        if k == 2:
            return F.Guard(rand_cmp(rng, names), _formula(rng, names, depth - 1, max_scope, allow_not))
        if k == 3:
            return F.FAnd(
                _formula(rng, names, depth - 1, max_scope, allow_not),
                _formula(rng, names, depth - 1, max_scope, allow_not),
            )
        if k == 4:
            return F.FOr(
                _formula(rng, names, depth - 1, max_scope, allow_not),
                _formula(rng, names, depth - 1, max_scope, allow_not),
            )
        if k == 5:
            if not allow_not:
                continue
            return F.FNot(_formula(rng, names, depth - 1, max_scope, allow_not))
        ctor = F.A if rng.random() < 0.5 else F.E
        path = rng.randrange(4)
        if path == 0:
            return ctor(F.X(_formula(rng, names, depth - 1, max_scope, allow_not)))
        if path == 1:
            return ctor(F.G(_formula(rng, names, depth - 1, max_scope, allow_not)))
        if path == 2:
            return ctor(F.F(_formula(rng, names, depth - 1, max_scope, allow_not)))
        return ctor(
            F.U(
                _formula(rng, names, depth - 1, max_scope, allow_not),
                _formula(rng, names, depth - 1, max_scope, allow_not),
            )
        )


def random_digraph(rng: random.Random, max_nodes=8):
    """Edge list over 0..n-1, dense enough to hit plenty of cycles."""
    n = rng.randint(1, max_nodes)
    edges = []
    for a in range(n):
        for b in range(n):
            if rng.random() < 0.25:
                edges.append((a, b))
    return n, edges
