"""Finite instantiation of constraint systems over a bounded integer box.

Every clause is instantiated once per assignment of its free variables,
interpreted parts (theory assertions, init/next definitions) are
evaluated away, and what remains is propositional: a conjunction of
predicate literals implying a disjunction of witness groups, one group
per surviving existential witness. Instances that ground to `true` are
kept, flagged trivial, so the instance count N^(free vars) per clause is
preserved for reporting.

Ground atoms are dense integer ids: each query or wf predicate owns a
contiguous block of size N^arity, mixed-radix over its argument tuple.
An atom over a tuple outside the box is false by convention: it
satisfies a clause when negated in the premise and kills a witness
group in the head.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import logic
from .errors import BoundTooLarge, UnsupportedConstruct
from .horn import KIND_SYSTEM, HornClause, HornSystem, Neg, PredApp, clause_free_vars
from .system import DomainBound, atom_ceiling


@dataclass(frozen=True, slots=True)
class GroundClause:
    """One instance of a source clause.

    body: premise literals (atom id, polarity), interpreted parts removed.
    groups: head disjuncts; each group is a set of atoms required true
        together. An empty groups tuple means the head is false.
    trivial: statically satisfied (false premise, true head, or a
        contradictory premise); carries no constraint.
    src: index of the originating clause.
    env: values of the source clause's free variables, in
        clause_free_vars order.
    """

    body: tuple[tuple[int, bool], ...]
    groups: tuple[tuple[int, ...], ...]
    trivial: bool
    src: int
    env: tuple[int, ...]


class GroundSystem:
    def __init__(self, horn: HornSystem, bound: DomainBound):
        self.horn = horn
        self.bound = bound
        self.preds = tuple(p for p in horn.preds if p.kind != KIND_SYSTEM)
        self.wf_names = horn.wf
        n = bound.size
        self._offsets: dict[str, int] = {}
        self._blocks: list[tuple[str, int, int, int]] = []  # name, offset, size, arity
        total = 0
        for p in self.preds:
            size = n**p.arity
            self._offsets[p.name] = total
            self._blocks.append((p.name, total, size, p.arity))
            total += size
        self.n_atoms = total
        self.clauses: list[GroundClause] = []

    # ------------------------------------------------------------- atoms

    def atom_id(self, name: str, args: tuple[int, ...]) -> int | None:
        """Dense id of an atom, or None if the tuple leaves the box."""
        off = self._offsets[name]
        lo, hi, n = self.bound.lo, self.bound.hi, self.bound.size
        aid = off
        mult = 1
        for v in args:
            if v < lo or v > hi:
                return None
            aid += (v - lo) * mult
            mult *= n
        return aid

    def atom_info(self, aid: int) -> tuple[str, tuple[int, ...]]:
        for name, off, size, arity in self._blocks:
            if off <= aid < off + size:
                rem = aid - off
                lo, n = self.bound.lo, self.bound.size
                args = []
                for _ in range(arity):
                    args.append(lo + rem % n)
                    rem //= n
                return name, tuple(args)
        raise IndexError(aid)

    def atoms_of(self, name: str) -> range:
        for nm, off, size, _ in self._blocks:
            if nm == name:
                return range(off, off + size)
        raise KeyError(name)

    def wf_ranges(self) -> list[tuple[str, int, int, int]]:
        """(name, offset, size, arity) for each wf predicate block."""
        wf = set(self.wf_names)
        return [b for b in self._blocks if b[0] in wf]

    def wf_edge(self, aid: int) -> tuple[str, tuple[int, ...], tuple[int, ...]]:
        name, args = self.atom_info(aid)
        half = len(args) // 2
        return name, args[:half], args[half:]

    @property
    def trivial_count(self) -> int:
        return sum(1 for c in self.clauses if c.trivial)


def ground(hs: HornSystem, bound: DomainBound) -> GroundSystem:
    gs = GroundSystem(hs, bound)
    ceiling = atom_ceiling()
    if gs.n_atoms > ceiling:
        raise BoundTooLarge(gs.n_atoms, ceiling, "ground atoms")
    counts = [bound.size ** len(clause_free_vars(c)) for c in hs.clauses]
    if sum(counts) > ceiling:
        raise BoundTooLarge(sum(counts), ceiling, "ground clause instances")

    defs = {}
    if hs.defs:
        defs = {name: logic.compile_assertion(a) for name, a in hs.defs.items()}
    for ci, c in enumerate(hs.clauses):
        _ground_clause(gs, hs, defs, ci, c)
    assert len(gs.clauses) == sum(counts)
    return gs


# ------------------------------------------------------- clause instancing


def _sys_pairs(hs: HornSystem, app: PredApp) -> list[tuple[str, int]]:
    """Which app argument slot feeds each definition parameter."""
    if hs.base_vars is None or hs.defs is None or app.sym.name not in hs.defs:
        raise UnsupportedConstruct(
            f"cannot ground a symbolic {app.sym.name} application without a definition"
        )
    base = hs.base_vars
    if app.sym.name == "init":
        return [(name, i) for i, name in enumerate(base)]
    # next may be applied at widened arity (extra scope columns); the
    # definition reads base vars from the front half, primed from the back.
    half = len(app.args) // 2
    pairs = [(name, i) for i, name in enumerate(base)]
    pairs += [(name + "'", half + i) for i, name in enumerate(base)]
    return pairs


def _plan_item(gs: GroundSystem, hs: HornSystem, defs, item, positive: bool = True):
    if isinstance(item, Neg):
        return _plan_item(gs, hs, defs, item.app, False)
    if isinstance(item, PredApp):
        arg_fns = tuple(logic.compile_term(t) for t in item.args)
        if item.sym.kind == KIND_SYSTEM:
            pairs = _sys_pairs(hs, item)
            return ("s", defs[item.sym.name], arg_fns, pairs, positive)
        n = gs.bound.size
        pows = tuple(n**i for i in range(item.sym.arity))
        return ("l", gs._offsets[item.sym.name], pows, arg_fns, positive)
    return ("a", logic.compile_assertion(item), positive)


def _ground_clause(gs: GroundSystem, hs: HornSystem, defs, ci: int, c: HornClause) -> None:
    bound = gs.bound
    lo, hi = bound.lo, bound.hi
    values = bound.values()
    fv = clause_free_vars(c)
    keys = [v.key() for v in fv]
    premise_plan = [_plan_item(gs, hs, defs, it) for it in c.premise]
    guard_fn = logic.compile_assertion(c.head.guard) if c.head.guard is not None else None
    outer_plan = [_plan_item(gs, hs, defs, it) for it in c.head.outer]
    inner_plan = [_plan_item(gs, hs, defs, it) for it in c.head.inner]
    exists_keys = [v.key() for v in c.head.exists]

    def eval_item(plan, env) -> int | None:
        """True-area result: atom id, -1 for interpreted-true, None for false."""
        kind = plan[0]
        if kind == "a":
            return -1 if plan[1](env) else None
        if kind == "s":
            _, fn, arg_fns, pairs, _ = plan
            denv = {name: arg_fns[j](env) for name, j in pairs}
            return -1 if fn(denv) else None
        _, off, pows, arg_fns, _ = plan
        aid = off
        for i, afn in enumerate(arg_fns):
            v = afn(env)
            if v < lo or v > hi:
                return None
            aid += (v - lo) * pows[i]
        return aid

    env: dict[str, int] = {}
    out = gs.clauses.append
    for vals in itertools.product(values, repeat=len(fv)):
        for k, v in zip(keys, vals):
            env[k] = v
        trivial = False
        body: list[tuple[int, bool]] = []
        seen: dict[int, bool] = {}
        for plan in premise_plan:
            positive = plan[-1]
            r = eval_item(plan, env)
            if r == -1:
                if not positive:  # negated interpreted part that holds
                    trivial = True
                    break
                continue
            if r is None:
                if positive:
                    trivial = True
                    break
                continue
            prev = seen.get(r)
            if prev is None:
                seen[r] = positive
                body.append((r, positive))
            elif prev != positive:
                trivial = True
                break
        groups: tuple[tuple[int, ...], ...] = ()
        if not trivial:
            if guard_fn is not None and not guard_fn(env):
                trivial = True
        if not trivial:
            outer_atoms: list[int] = []
            head_false = False
            for plan in outer_plan:
                r = eval_item(plan, env)
                if r is None:
                    head_false = True
                    break
                if r != -1:
                    outer_atoms.append(r)
            if head_false:
                groups = ()
            elif not c.head.exists:
                if outer_atoms:
                    groups = (tuple(outer_atoms),)
                else:
                    trivial = True
            else:
                glist: list[tuple[int, ...]] = []
                for wvals in itertools.product(values, repeat=len(exists_keys)):
                    for k, v in zip(exists_keys, wvals):
                        env[k] = v
                    atoms = list(outer_atoms)
                    ok = True
                    for plan in inner_plan:
                        r = eval_item(plan, env)
                        if r is None:
                            ok = False
                            break
                        if r != -1:
                            atoms.append(r)
                    if ok:
                        if not atoms:
                            trivial = True
                            break
                        glist.append(tuple(atoms))
                groups = tuple(glist) if not trivial else ()
        if trivial:
            out(GroundClause((), (), True, ci, vals))
        else:
            out(GroundClause(tuple(body), groups, False, ci, vals))
