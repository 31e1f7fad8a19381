"""Structural checks on the constraint generator.

The golden files under tests/golden freeze the emitted constraints and
the activation trace for the register-growth property. The remaining
tests audit documented invariants over seeded random formulas: clause
linearity, fresh-symbol uniqueness, scope arities, and trace length.
"""

import random
from pathlib import Path

import pytest

from ctlfo import (
    ShadowingError,
    UndeclaredVariable,
    UnsupportedConstruct,
    emit_textual,
    formula_size,
    gen,
    gen_trace,
    gen_with_trace,
    negation_normal_form,
    parse_formula,
    parse_system,
    render_gen_trace,
)
from ctlfo import formula as F
from ctlfo.horn import KIND_SYSTEM, KIND_WF

from randgen import random_formula, random_system

GOLDEN = Path(__file__).parent / "golden"

COUNTER = parse_system("vars v; init v = 0; next v' = v + 1;")
GROWTH = parse_formula("forall x: v = x -> EF(v > x)")


def test_growth_constraints_golden():
    hs = gen(GROWTH, COUNTER)
    expected = (GOLDEN / "growth_constraints.txt").read_text()
    assert emit_textual(hs) + "\n" == expected


def test_growth_trace_golden():
    rows = gen_trace(GROWTH, COUNTER)
    expected = (GOLDEN / "growth_trace.txt").read_text()
    assert render_gen_trace(rows) + "\n" == expected


def test_growth_symbols():
    hs = gen(GROWTH, COUNTER)
    assert [p.name for p in hs.preds] == ["init", "aux_0", "inv_0", "next", "rank_0"]
    assert hs.wf == ("rank_0",)
    assert hs.pred("rank_0").arity == 4
    assert hs.pred("rank_0").kind == KIND_WF
    assert hs.pred("init").kind == KIND_SYSTEM
    assert hs.pred("next").arity == 2


def test_atom_formula_single_row():
    rows = gen_trace(parse_formula("v = 0"), COUNTER)
    assert len(rows) == 1


def _rows(f):
    """Expected trace length.

    One row per activation; an implication whose consequent is replaced
    by a fresh symbol gets one extra rewrite row; atoms folded into a
    parent clause get none.
    """
    if isinstance(f, F.Atom):
        return 1
    if isinstance(f, (F.Forall, F.Exists)):
        return 1 + _rows(f.body)
    if isinstance(f, F.Guard):
        return 1 if isinstance(f.body, F.Atom) else 2 + _rows(f.body)
    if isinstance(f, F.FAnd):
        return 1 + sum(_rows(c) for c in (f.lhs, f.rhs) if not isinstance(c, F.Atom))
    if isinstance(f, F.FOr):
        sides = (f.lhs, f.rhs)
        atoms = [c for c in sides if isinstance(c, F.Atom)]
        if len(atoms) == 2:
            return 1
        if len(atoms) == 1:
            other = f.rhs if isinstance(f.lhs, F.Atom) else f.lhs
            return 2 + _rows(other)
        return 1 + _rows(f.lhs) + _rows(f.rhs)
    p = f.path
    if isinstance(p, F.F):
        p = F.U(F.ATOM_TRUE, p.body)
    if isinstance(p, (F.X, F.G)):
        return 1 + (0 if isinstance(p.body, F.Atom) else _rows(p.body))
    n = 1
    if not isinstance(p.lhs, F.Atom) and not F.is_atom_true(p.lhs):
        n += _rows(p.lhs)
    if not isinstance(p.rhs, F.Atom):
        n += _rows(p.rhs)
    return n


def test_trace_length_matches_structure():
    rng = random.Random(41)
    for _ in range(300):
        ts = random_system(rng)
        f = negation_normal_form(random_formula(rng, ts.vars))
        assert len(gen_trace(f, ts)) == _rows(f)


def test_clause_count_linear_in_formula_size():
    rng = random.Random(42)
    for _ in range(300):
        ts = random_system(rng)
        f = negation_normal_form(random_formula(rng, ts.vars))
        hs = gen(f, ts)
        assert len(hs.clauses) <= 6 * formula_size(f) + 2


def test_fresh_symbols_unique():
    rng = random.Random(43)
    for _ in range(300):
        ts = random_system(rng)
        f = negation_normal_form(random_formula(rng, ts.vars))
        hs = gen(f, ts)
        names = [p.name for p in hs.preds]
        assert len(set(names)) == len(names)
        for w in hs.wf:
            assert hs.pred(w).kind == KIND_WF


def test_rank_arity_doubles_invariant_arity():
    # Every clause that applies a rank symbol applies its invariant as
    # the first premise, over half as many arguments.
    rng = random.Random(44)
    for _ in range(200):
        ts = random_system(rng)
        f = negation_normal_form(random_formula(rng, ts.vars))
        hs = gen(f, ts)
        wf = set(hs.wf)
        for c in hs.clauses:
            ranks = [
                item
                for item in (*c.head.outer, *c.head.inner)
                if hasattr(item, "sym") and item.sym.name in wf
            ]
            for r in ranks:
                assert r.sym.arity % 2 == 0
                assert c.premise[0].sym.arity * 2 == r.sym.arity


def test_activation_args_prefix_scope():
    # Scopes only ever extend at the tail, so every activating
    # application's argument list is a prefix of the row's scope.
    rng = random.Random(45)
    for _ in range(200):
        ts = random_system(rng)
        f = negation_normal_form(random_formula(rng, ts.vars))
        for _text, scope, premise, _nxt in gen_trace(f, ts):
            names = scope.strip("()").split(", ")
            args = premise[premise.index("(") + 1 : -1].split(", ")
            assert args == names[: len(args)]


def test_negation_must_be_pushed_down():
    with pytest.raises(UnsupportedConstruct):
        gen(parse_formula("!EF(v = 0)"), COUNTER)


def test_rebound_and_undeclared_names_rejected():
    with pytest.raises(ShadowingError):
        gen(parse_formula("forall v: v = 0"), COUNTER)
    with pytest.raises(ShadowingError):
        gen(parse_formula("forall x: exists x: v = x"), COUNTER)
    with pytest.raises(UndeclaredVariable):
        gen(parse_formula("EF(v > y)"), COUNTER)
