"""Surface syntax: tokenizer, assertion/formula/system grammars.

The main oracle is the render/parse round trip on random inputs; the
rest pins precedence, atom fusion, and error positions.
"""

import random

import pytest

from ctlfo import DomainBound, mc_check, parse_formula, parse_system, render_formula
from ctlfo import formula as F
from ctlfo.errors import ParseError, UndeclaredVariable, UnsupportedConstruct
from ctlfo.system import render_system

from randgen import random_formula, random_system


def test_formula_render_parse_round_trip():
    # The parser fuses boolean structure over plain atoms into one atom
    # and negation styles differ, so reparsing canonicalizes rather than
    # reproduces generator ASTs; one reparse reaches the fixpoint.
    rng = random.Random(31)
    for _ in range(300):
        ts = random_system(rng)
        f = random_formula(rng, ts.vars)
        g = parse_formula(render_formula(f))
        assert parse_formula(render_formula(g)) == g


def test_reparse_preserves_verdicts():
    rng = random.Random(33)
    bound = DomainBound(-2, 2)
    for _ in range(100):
        ts = random_system(rng)
        f = random_formula(rng, ts.vars)
        g = parse_formula(render_formula(f))
        assert mc_check(ts, g, bound).holds == mc_check(ts, f, bound).holds


def test_system_render_parse_round_trip():
    rng = random.Random(32)
    for _ in range(300):
        ts = random_system(rng)
        assert parse_system(render_system(ts)) == ts


def test_quantifiers_scope_maximally_right():
    f = parse_formula("forall x: v = x -> EF(v > x)")
    assert isinstance(f, F.Forall) and f.var == "x"
    assert isinstance(f.body, F.Guard)
    g = parse_formula("exists x: AG(v = x -> AF(w = 1))")
    assert isinstance(g, F.Exists)
    assert isinstance(g.body, F.A) and isinstance(g.body.path, F.G)


def test_boolean_structure_over_atoms_is_fused():
    # Connectives between plain theory atoms stay one atom; a temporal
    # operand forces a formula-level node.
    assert isinstance(parse_formula("v = 0 && w = 1"), F.Atom)
    assert isinstance(parse_formula("!v = 0"), F.Atom)
    assert isinstance(parse_formula("v = 0 -> w = 1"), F.Atom)
    assert isinstance(parse_formula("v = 0 || EF(w = 1)"), F.FOr)
    assert isinstance(parse_formula("v = 0 && EX(w = 1)"), F.FAnd)


def test_formula_implication_needs_atom_left():
    with pytest.raises(UnsupportedConstruct):
        parse_formula("EF(v = 0) -> w = 1")
    f = parse_formula("v = 0 -> EF(w = 1)")
    assert isinstance(f, F.Guard)


def test_until_syntax():
    f = parse_formula("A(v = 0 U w = 1)")
    assert isinstance(f, F.A) and isinstance(f.path, F.U)
    g = parse_formula("E(true U v = 2)")
    assert isinstance(g, F.E) and F.is_atom_true(g.path.lhs)
    with pytest.raises(ParseError):
        parse_formula("E(p U)")
    with pytest.raises(ParseError):
        parse_formula("A(v = 0)")


def test_system_grammar_examples():
    ts = parse_system("vars v; init v = 0; next v' = v + 1;")
    assert ts.vars == ("v",)
    multi = parse_system("vars a, b; init a = 0 && b = 0; next a' = b && b' = a;")
    assert multi.vars == ("a", "b")
    with_comment = parse_system(
        "# counter\nvars v;\ninit v = 0; # start\nnext v' = v + 1;\n"
    )
    assert with_comment == ts


def test_system_validation_errors():
    with pytest.raises(UndeclaredVariable):
        parse_system("vars v; init w = 0; next v' = v;")
    with pytest.raises(UndeclaredVariable):
        parse_system("vars v; init v' = 0; next v' = v;")
    with pytest.raises(ParseError):
        parse_system("vars v; init v = 0 next v' = v;")
    with pytest.raises(ParseError):
        parse_system("vars; init true; next true;")


def test_parse_errors_carry_column_positions():
    with pytest.raises(ParseError) as err:
        parse_formula("v @ 3")
    assert "column 3" in str(err.value)
    with pytest.raises(ParseError) as err:
        parse_formula("E(p U)")
    assert "column" in str(err.value)


def test_reserved_words_are_not_variables():
    with pytest.raises(ParseError):
        parse_formula("true = 1")
    with pytest.raises(ParseError):
        parse_system("vars init; init init = 0; next init' = init;")
