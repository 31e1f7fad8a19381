"""Finite instantiation against a direct clause evaluator.

A ground system must agree with the source clauses pointwise: for any
truth assignment to the ground atoms, each instance evaluates exactly
like the source clause under the instance's environment, with atoms
outside the box read as false. The instance count per clause is the
domain size raised to the number of free variables, trivial instances
included.
"""

import itertools
import random

import pytest

from ctlfo import (
    BoundTooLarge,
    DomainBound,
    UnsupportedConstruct,
    gen,
    ground,
    negation_normal_form,
    parse_formula,
    parse_system,
    read_textual,
)
from ctlfo import logic
from ctlfo.horn import KIND_SYSTEM, Neg, PredApp, clause_free_vars

from randgen import random_formula, random_system

COUNTER = parse_system("vars v; init v = 0; next v' = v + 1;")


def eval_source_clause(hs, gs, clause, env_vals, assign):
    """Truth of one source-clause instance under an atom assignment."""
    fv = clause_free_vars(clause)
    env = {v.key(): val for v, val in zip(fv, env_vals)}

    def item_truth(item, e):
        if isinstance(item, Neg):
            return not item_truth(item.app, e)
        if isinstance(item, PredApp):
            args = tuple(logic.eval_term(t, e) for t in item.args)
            if item.sym.kind == KIND_SYSTEM:
                base = hs.base_vars
                denv = {n: args[i] for i, n in enumerate(base)}
                if item.sym.name != "init":
                    half = len(args) // 2
                    denv.update({n + "'": args[half + i] for i, n in enumerate(base)})
                return logic.eval_assertion(hs.defs[item.sym.name], denv)
            aid = gs.atom_id(item.sym.name, args)
            return False if aid is None else assign[aid]
        return logic.eval_assertion(item, e)

    if not all(item_truth(it, env) for it in clause.premise):
        return True
    if clause.head.guard is not None and not logic.eval_assertion(clause.head.guard, env):
        return True
    if not all(item_truth(it, env) for it in clause.head.outer):
        return False
    if not clause.head.exists:
        return True
    keys = [v.key() for v in clause.head.exists]
    for wvals in itertools.product(gs.bound.values(), repeat=len(keys)):
        wenv = dict(env)
        wenv.update(zip(keys, wvals))
        if all(item_truth(it, wenv) for it in clause.head.inner):
            return True
    return False


def eval_ground_clause(gc, assign):
    if gc.trivial:
        return True
    if not all(assign[aid] == pol for aid, pol in gc.body):
        return True
    return any(all(assign[a] for a in grp) for grp in gc.groups)


def test_ground_matches_source_pointwise():
    # The load-bearing agreement: for random systems and random atom
    # assignments, every instance evaluates like its source clause.
    for k in range(25):
        rng = random.Random(4200 + k)
        ts = random_system(rng)
        f = random_formula(rng, ts.vars, depth=2)
        hs = gen(negation_normal_form(f), ts)
        bound = DomainBound(-1, 1)
        gs = ground(hs, bound)
        for _ in range(3):
            assign = [rng.random() < 0.5 for _ in range(gs.n_atoms)]
            for gc in gs.clauses:
                want = eval_source_clause(hs, gs, hs.clauses[gc.src], gc.env, assign)
                assert eval_ground_clause(gc, assign) == want, (k, gc)


def test_instance_count_invariant():
    for k in range(40):
        rng = random.Random(5100 + k)
        ts = random_system(rng)
        f = random_formula(rng, ts.vars)
        hs = gen(negation_normal_form(f), ts)
        bound = DomainBound(-2, 2)
        gs = ground(hs, bound)
        counts = [bound.size ** len(clause_free_vars(c)) for c in hs.clauses]
        assert len(gs.clauses) == sum(counts)
        by_src = {}
        for gc in gs.clauses:
            by_src[gc.src] = by_src.get(gc.src, 0) + 1
        assert [by_src.get(i, 0) for i in range(len(hs.clauses))] == counts


def test_atom_ids_are_a_dense_bijection():
    hs = gen(parse_formula("forall x: v = x -> EF(v > x)"), COUNTER)
    gs = ground(hs, DomainBound(-2, 2))
    assert gs.n_atoms == sum(5**p.arity for p in gs.preds)
    seen = set()
    for name, off, size, arity in gs._blocks:
        block = gs.atoms_of(name)
        assert block == range(off, off + size)
        for aid in block:
            got_name, args = gs.atom_info(aid)
            assert got_name == name and len(args) == arity
            assert gs.atom_id(name, args) == aid
            seen.add(aid)
    assert seen == set(range(gs.n_atoms))
    assert gs.atom_id("inv_0", (3, 0)) is None
    assert gs.atom_id("inv_0", (-3, 0)) is None


def test_wf_ranges_and_edges():
    hs = gen(parse_formula("forall x: v = x -> EF(v > x)"), COUNTER)
    gs = ground(hs, DomainBound(0, 1))
    ranges = gs.wf_ranges()
    assert [r[0] for r in ranges] == ["rank_0"]
    name, off, size, arity = ranges[0]
    assert (size, arity) == (16, 4)
    name, pre, post = gs.wf_edge(gs.atom_id("rank_0", (0, 1, 1, 0)))
    assert (name, pre, post) == ("rank_0", (0, 1), (1, 0))


def test_trivial_flags():
    bound = DomainBound(-2, 2)
    # False premise: every instance is trivially satisfied.
    gs = ground(read_textual("p(v) && v = v + 1 -> q(v)"), bound)
    assert gs.trivial_count == len(gs.clauses) == 5
    # Contradictory premise literals.
    gs = ground(read_textual("p(v) && !p(v) -> q(v)"), bound)
    assert all(c.trivial for c in gs.clauses)
    # Interpreted head that holds.
    gs = ground(read_textual("p(v) -> v = v"), bound)
    assert all(c.trivial for c in gs.clauses)
    # A live clause is not flagged.
    gs = ground(read_textual("p(v) -> q(v)"), bound)
    assert gs.trivial_count == 0


def test_out_of_box_atoms_are_false():
    bound = DomainBound(-2, 2)
    # Head atom outside the box: empty groups, the premise is refutable.
    gs = ground(read_textual("p(v) -> p(v + 10)"), bound)
    assert all(not c.trivial and c.groups == () for c in gs.clauses)
    # Negated out-of-box premise atom holds, so it drops out of the body.
    gs = ground(read_textual("!p(v + 10) && p(v) -> q(v)"), bound)
    for c in gs.clauses:
        assert not c.trivial
        assert len(c.body) == 1 and c.body[0][1] is True


def test_atom_ceiling(monkeypatch):
    hs = read_textual("p(u, v, w) -> q(u, v, w)")
    monkeypatch.setenv("CTLFO_ATOM_CEILING", "100")
    with pytest.raises(BoundTooLarge, match="ground atoms"):
        ground(hs, DomainBound(-2, 2))
    # 250 atoms fit under 600 but four free variables make 5^4 = 625
    # instances, tripping the second check.
    monkeypatch.setenv("CTLFO_ATOM_CEILING", "600")
    wide = read_textual("p(u, v, w) && q(v, w, x) -> p(u, w, x)")
    with pytest.raises(BoundTooLarge, match="instances"):
        ground(wide, DomainBound(-2, 2))
    monkeypatch.delenv("CTLFO_ATOM_CEILING")
    ground(hs, DomainBound(-2, 2))


def test_system_apps_need_definitions():
    hs = read_textual("init(v) -> p(v)")
    with pytest.raises(UnsupportedConstruct, match="definition"):
        ground(hs, DomainBound(-2, 2))
