"""Round trips and exports for the constraint representation.

The textual format carries no declaration header, so the reader rebuilds
predicate symbols from applications: system symbols by name, wf symbols
from wf(...) lines, everything else as query symbols. Reading emitted
text back must reproduce the clauses exactly. The CHC export covers only
the safety fragment and expands system applications from the attached
definitions.
"""

import random
from dataclasses import replace

import pytest

from ctlfo import (
    NotExportable,
    ParseError,
    emit_chc,
    emit_textual,
    gen,
    negation_normal_form,
    parse_formula,
    parse_system,
    read_textual,
)
from ctlfo.horn import KIND_SYSTEM, KIND_WF, FreshNames, HornSystem

from randgen import random_formula, random_system

COUNTER = parse_system("vars v; init v = 0; next v' = v + 1;")
GROWTH = parse_formula("forall x: v = x -> EF(v > x)")


def test_textual_round_trip_random():
    # Clauses and symbols survive emit/read; declaration order may not,
    # because the reader only sees first occurrences.
    for k in range(150):
        rng = random.Random(7000 + k)
        ts = random_system(rng)
        f = random_formula(rng, ts.vars)
        hs = gen(negation_normal_form(f), ts)
        hs2 = read_textual(emit_textual(hs))
        assert hs2.clauses == hs.clauses
        assert set(hs2.preds) == set(hs.preds)
        assert hs2.wf == hs.wf


def test_round_trip_is_identity_on_reader_output():
    for k in range(60):
        rng = random.Random(8600 + k)
        ts = random_system(rng)
        f = random_formula(rng, ts.vars)
        hs2 = read_textual(emit_textual(gen(negation_normal_form(f), ts)))
        hs3 = read_textual(emit_textual(hs2))
        assert hs3 == hs2


def test_golden_text_reads_back_to_generated_system():
    hs = gen(GROWTH, COUNTER)
    hs2 = read_textual(emit_textual(hs))
    assert hs2.clauses == hs.clauses
    assert hs2.wf == ("rank_0",)
    assert hs2.pred("rank_0").kind == KIND_WF
    assert hs2.pred("rank_0").arity == 4
    assert hs2.pred("init").kind == KIND_SYSTEM
    # Widened applications must not distort the declared transition arity.
    assert hs2.pred("next").arity == 2


def test_fresh_pred_numbering():
    names = FreshNames()
    assert names.fresh_pred("aux", 2).name == "aux_0"
    assert names.fresh_pred("aux", 3).name == "aux_1"
    assert names.fresh_pred("inv", 1).name == "inv_0"
    assert names.fresh_pred("aux", 1).name == "aux_2"
    rank = names.fresh_pred("rank", 4, KIND_WF)
    assert rank.name == "rank_0"
    assert rank.kind == KIND_WF
    assert rank.arity == 4


def test_chc_export_safety():
    hs = gen(parse_formula("AG(v >= 0)"), COUNTER)
    script = emit_chc(hs)
    lines = script.strip().splitlines()
    assert lines[0] == "(set-logic HORN)"
    assert lines[-1] == "(check-sat)"
    assert "(declare-fun inv_0 (Int) Bool)" in lines
    # System symbols are expanded from their definitions, never declared.
    assert "(declare-fun init" not in script
    assert "(declare-fun next" not in script
    assert "(init " not in script
    assert "(next " not in script
    # init clause, step clause, and the theory head turned into -> false.
    assert sum(1 for ln in lines if ln.startswith("(assert")) == 3
    assert script.count("false") == 1


def test_chc_z3_smoke():
    z3 = pytest.importorskip("z3")
    safe = emit_chc(gen(parse_formula("AG(v >= 0)"), COUNTER))
    unsafe = emit_chc(gen(parse_formula("AG(v >= 1)"), COUNTER))
    verdicts = {}
    for name, script in [("safe", safe), ("unsafe", unsafe)]:
        s = z3.SolverFor("HORN")
        s.from_string(script.replace("(check-sat)", ""))
        verdicts[name] = s.check()
    assert verdicts["safe"] == z3.sat
    assert verdicts["unsafe"] == z3.unsat


def test_chc_rejects_non_safety():
    with pytest.raises(NotExportable, match="existential"):
        emit_chc(gen(parse_formula("EX(v = 1)"), COUNTER))
    # A-until carries an existential progress clause, so it is caught
    # before the wf declaration is.
    with pytest.raises(NotExportable, match="existential"):
        emit_chc(gen(parse_formula("AF(v = 3)"), COUNTER))
    with pytest.raises(NotExportable):
        emit_chc(gen(parse_formula("EX(v = 1) || EX(v = 2)"), COUNTER))
    safe = gen(parse_formula("AG(v >= 0)"), COUNTER)
    with pytest.raises(NotExportable, match="well-foundedness"):
        emit_chc(replace(safe, wf=("rank_0",)))


def test_chc_without_definitions():
    hs = gen(parse_formula("AG(v >= 0)"), COUNTER)
    stripped = read_textual(emit_textual(hs))
    assert stripped.defs is None
    with pytest.raises(NotExportable, match="definition"):
        emit_chc(stripped)


def test_chc_empty_system():
    assert emit_chc(HornSystem((), ())) == "(set-logic HORN)\n(check-sat)\n"


def test_read_textual_errors():
    with pytest.raises(ParseError):
        read_textual("init(v) -> ")
    with pytest.raises(ParseError, match="arity mismatch"):
        read_textual("a(v) -> b(v)\na(v, w) -> b(v)")
    with pytest.raises(ParseError):
        read_textual("wf(3)")


def test_read_textual_comments_and_blanks():
    text = "# emitted constraints\n\ninit(v) -> p(v)  # root\n"
    hs = read_textual(text)
    assert len(hs.clauses) == 1
    assert hs.pred("p").kind != KIND_SYSTEM
