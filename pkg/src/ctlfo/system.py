"""Transition systems over integer variables, explored inside a box.

A system is (vars, init, next): `init` constrains the unprimed variables,
`next` relates unprimed to primed copies. All exploration is relative to
a DomainBound [lo, hi] applied to every variable; transitions whose
target leaves the box are clipped away. States are plain tuples ordered
like `vars`.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache

from . import logic, parser
from .errors import BoundTooLarge
from .logic import Assertion

DEFAULT_ATOM_CEILING = 10**6
ATOM_CEILING_ENV = "CTLFO_ATOM_CEILING"


def atom_ceiling() -> int:
    raw = os.environ.get(ATOM_CEILING_ENV)
    return int(raw) if raw else DEFAULT_ATOM_CEILING


@dataclass(frozen=True)
class DomainBound:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty bound [{self.lo}, {self.hi}]")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def values(self) -> range:
        return range(self.lo, self.hi + 1)

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    @staticmethod
    def parse(text: str) -> "DomainBound":
        lo, _, hi = text.partition("..")
        return DomainBound(int(lo), int(hi))

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}"


State = tuple[int, ...]


@dataclass(frozen=True)
class TransitionSystem:
    vars: tuple[str, ...]
    init: Assertion
    next: Assertion

    def state_dict(self, s: State) -> dict[str, int]:
        return dict(zip(self.vars, s))

    def pair_dict(self, s: State, t: State) -> dict[str, int]:
        d = dict(zip(self.vars, s))
        for name, v in zip(self.vars, t):
            d[name + "'"] = v
        return d


def parse_system(text: str) -> TransitionSystem:
    names, init, nxt = parser.parse_system_parts(text)
    return TransitionSystem(names, init, nxt)


def load_system(path: str) -> TransitionSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system(fh.read())


def enumerate_states(ts: TransitionSystem, b: DomainBound) -> list[State]:
    count = b.size ** len(ts.vars)
    ceiling = atom_ceiling()
    if count > ceiling:
        raise BoundTooLarge(count, ceiling, "states in bound")
    return list(itertools.product(b.values(), repeat=len(ts.vars)))


def initial_states(ts: TransitionSystem, b: DomainBound) -> list[State]:
    check = logic.compile_assertion(ts.init)
    return [s for s in enumerate_states(ts, b) if check(ts.state_dict(s))]


class SuccessorMap:
    """Successor sets of every in-bound state, computed once per (ts, b)."""

    def __init__(self, ts: TransitionSystem, b: DomainBound):
        self.ts = ts
        self.bound = b
        self.states = enumerate_states(ts, b)
        step = logic.compile_assertion(ts.next)
        names = ts.vars
        primed = tuple(n + "'" for n in names)
        succ: dict[State, tuple[State, ...]] = {}
        for s in self.states:
            d = dict(zip(names, s))
            out = []
            for t in self.states:
                d.update(zip(primed, t))
                if step(d):
                    out.append(t)
            succ[s] = tuple(out)
        self.succ = succ

    def __getitem__(self, s: State) -> tuple[State, ...]:
        return self.succ[s]


@lru_cache(maxsize=32)
def successor_map(ts: TransitionSystem, b: DomainBound) -> SuccessorMap:
    return SuccessorMap(ts, b)


def successors(ts: TransitionSystem, s: State, b: DomainBound) -> tuple[State, ...]:
    return successor_map(ts, b)[s]


def reachable_states(ts: TransitionSystem, b: DomainBound) -> set[State]:
    smap = successor_map(ts, b)
    frontier = list(initial_states(ts, b))
    seen = set(frontier)
    while frontier:
        s = frontier.pop()
        for t in smap[s]:
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    return seen


def is_total(ts: TransitionSystem, b: DomainBound) -> bool:
    """True iff every state reachable in bound has an in-bound successor."""
    smap = successor_map(ts, b)
    return all(smap[s] for s in reachable_states(ts, b))


def find_deadlock(ts: TransitionSystem, b: DomainBound) -> State | None:
    smap = successor_map(ts, b)
    for s in sorted(reachable_states(ts, b)):
        if not smap[s]:
            return s
    return None


def render_system(ts: TransitionSystem) -> str:
    return (
        f"vars {', '.join(ts.vars)};\n"
        f"init {logic.render_assertion(ts.init)};\n"
        f"next {logic.render_assertion(ts.next)};\n"
    )
