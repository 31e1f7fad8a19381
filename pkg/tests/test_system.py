"""Transition systems explored inside a bound box.

Successor enumeration is cross-checked against a naive double loop with
the plain assertion interpreter; totality and reachability get small
frozen cases plus random closure checks.
"""

import random

import pytest

from ctlfo import DomainBound, parse_system
from ctlfo.errors import BoundTooLarge
from ctlfo.logic import eval_assertion
from ctlfo.system import (
    enumerate_states,
    find_deadlock,
    initial_states,
    is_total,
    reachable_states,
    successors,
)

from randgen import random_system

COUNTER = parse_system("vars v; init v = 0; next v' = v + 1;")
STUTTER = parse_system("vars v; init true; next v' = v;")


def test_domain_bound_basics():
    b = DomainBound(-2, 2)
    assert b.size == 5
    assert list(b.values()) == [-2, -1, 0, 1, 2]
    assert 2 in b and 3 not in b
    assert DomainBound.parse("-2..2") == b
    assert str(b) == "-2..2"
    with pytest.raises(ValueError):
        DomainBound(1, 0)


def test_state_enumeration_is_full_box():
    b = DomainBound(-2, 2)
    two = parse_system("vars a, b; init true; next a' = a && b' = b;")
    states = enumerate_states(two, b)
    assert len(states) == 25
    assert len(set(states)) == 25
    assert initial_states(COUNTER, b) == [(0,)]


def test_counter_successors_and_clipping():
    b = DomainBound(-2, 2)
    assert successors(COUNTER, (1,), b) == ((2,),)
    # v = 2 steps out of the box, so it is clipped to a deadlock.
    assert successors(COUNTER, (2,), b) == ()
    nd = parse_system("vars v; init true; next v' = v + 1 || v' = v;")
    assert successors(nd, (2,), b) == ((2,),)
    assert successors(STUTTER, (-1,), b) == ((-1,),)


def test_successors_match_naive_double_loop():
    rng = random.Random(51)
    b = DomainBound(-2, 2)
    for _ in range(60):
        ts = random_system(rng)
        states = enumerate_states(ts, b)
        for s in states:
            got = set(successors(ts, s, b))
            want = {
                t for t in states if eval_assertion(ts.next, ts.pair_dict(s, t))
            }
            assert got == want


def test_totality_and_deadlocks():
    assert is_total(STUTTER, DomainBound(-2, 2))
    assert not is_total(COUNTER, DomainBound(0, 3))
    assert find_deadlock(COUNTER, DomainBound(0, 3)) == (3,)
    nd = parse_system("vars v; init true; next v' = v || v' = v + 1;")
    assert is_total(nd, DomainBound(-2, 2))
    assert find_deadlock(nd, DomainBound(-2, 2)) is None


def test_reachable_states_closure():
    rng = random.Random(52)
    b = DomainBound(-2, 2)
    for _ in range(40):
        ts = random_system(rng)
        reach = reachable_states(ts, b)
        assert set(initial_states(ts, b)) <= reach
        for s in reach:
            assert set(successors(ts, s, b)) <= reach


def test_reachable_counter_is_upward_ray():
    assert reachable_states(COUNTER, DomainBound(-2, 2)) == {(0,), (1,), (2,)}


def test_state_count_ceiling_guard():
    wide = parse_system("vars a, b, c; init true; next a' = a && b' = b && c' = c;")
    with pytest.raises(BoundTooLarge):
        enumerate_states(wide, DomainBound(0, 101))
