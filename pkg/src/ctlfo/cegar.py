"""Skolemization of existential heads with template refinement.

An existential head `premise -> exists y: items` is closed by choosing a
witness function for y over the clause's universal variables. Candidate
functions come from templates: linear offsets of a premise variable,
constants, or finite case splits. Fixing one candidate per existential
variable turns the clause into plain universally quantified Horn form;
the witness equality `y = t` joins the premise.

The refinement loop walks candidate combinations in lexicographic order.
A candidate whose witness leaves the domain box on the feasible premise
region is rejected outright; an unsatisfiable attempt blocks every
combination that agrees with it on the clauses named by the conflict
core, so the unblocked space shrinks each iteration.
"""

from __future__ import annotations

import itertools
import re
import time
from dataclasses import dataclass, field

from . import logic, parser
from .errors import MissingTemplate, ParseError
from .grounding import ground
from .horn import Head, HornClause, HornSystem, Neg, PredApp, clause_free_vars
from .logic import Assertion, Term, Var, var_term
from .solver import Sat, Solution, Unsat, check_solution, solve_ground
from .system import DomainBound

# A candidate witness is a Term or a Piecewise case split over terms.


@dataclass(frozen=True)
class Piecewise:
    cond: Assertion
    then: object
    els: object


@dataclass(frozen=True)
class SkolemTemplate:
    """Ordered witness candidates for one existential variable."""

    clause_index: int
    var: str
    candidates: tuple


@dataclass(frozen=True)
class RefinementConstraint:
    """Blocks every point that takes all listed (slot, candidate) choices."""

    assignments: tuple[tuple[int, int], ...]
    reason: str


@dataclass(frozen=True)
class Solved:
    params: dict
    solution: Solution
    iterations: int
    log: tuple[str, ...] = field(compare=False, default=())


@dataclass(frozen=True)
class Exhausted:
    complete: bool
    iterations: int
    log: tuple[str, ...] = field(compare=False, default=())


def cand_eval(cand, env: dict[str, int]) -> int:
    if isinstance(cand, Piecewise):
        branch = cand.then if logic.eval_assertion(cand.cond, env) else cand.els
        return cand_eval(branch, env)
    return logic.eval_term(cand, env)


def cand_assertion(y: Var, cand) -> Assertion:
    """The defining relation `y = cand` as a premise assertion."""
    if isinstance(cand, Piecewise):
        return logic.Or(
            logic.And(cand.cond, cand_assertion(y, cand.then)),
            logic.And(logic.Not(cand.cond), cand_assertion(y, cand.els)),
        )
    return logic.Cmp(var_term(y), "=", cand)


def cand_vars(cand) -> frozenset[Var]:
    if isinstance(cand, Piecewise):
        return logic.free_vars(cand.cond) | cand_vars(cand.then) | cand_vars(cand.els)
    return logic.term_vars(cand)


def render_cand(y: str, cand) -> str:
    return f"{y} = {_render_rhs(cand)}"


def _render_rhs(cand) -> str:
    if isinstance(cand, Piecewise):
        c = logic.render_assertion(cand.cond, 3)
        return f"({c} ? {_render_rhs(cand.then)} : {_render_rhs(cand.els)})"
    return logic.render_term(cand)


def default_templates(hs: HornSystem, bound: DomainBound) -> tuple[SkolemTemplate, ...]:
    """Per existential variable: `y = x + c` for each clause variable x
    with c in [-2, 2], then the constants of the domain box."""
    out = []
    for ci, c in enumerate(hs.clauses):
        if not c.head.exists:
            continue
        uvars = clause_free_vars(c)
        for y in c.head.exists:
            cands: list = []
            for x in uvars:
                for k in range(-2, 3):
                    cands.append(logic.term_add(var_term(x), logic.const_term(k)))
            for val in bound.values():
                cands.append(logic.const_term(val))
            unique = tuple(dict.fromkeys(cands))
            out.append(SkolemTemplate(ci, y.key(), unique))
    return tuple(out)


def skolemize(hs: HornSystem, chosen) -> HornSystem:
    """Close every existential head with the chosen witness candidates.

    `chosen` maps (clause index, variable key) to a candidate; the witness
    equality joins the premise and the existential block is dropped. The
    totality obligation (the witness stays in the domain box wherever the
    premise is feasible) is checked by the refinement loop, not emitted.
    """
    clauses = []
    for ci, c in enumerate(hs.clauses):
        if not c.head.exists:
            clauses.append(c)
            continue
        eqs = []
        for y in c.head.exists:
            cand = chosen.get((ci, y.key()))
            if cand is None:
                raise MissingTemplate(ci, y.key())
            eqs.append(cand_assertion(y, cand))
        head = Head(c.head.guard, c.head.outer + c.head.inner)
        clauses.append(HornClause(c.premise + tuple(eqs), head))
    return HornSystem(hs.preds, tuple(clauses), hs.wf, base_vars=hs.base_vars, defs=hs.defs)


def _totality_violation(hs: HornSystem, bound: DomainBound, ci: int, cand):
    """A premise-feasible assignment whose witness leaves the box, if any.

    Predicate applications in the premise are ignored (their meaning is
    open), so the check is conservative over the theory-feasible region.
    """
    c = hs.clauses[ci]
    theory = [it for it in c.premise if not isinstance(it, (PredApp, Neg))]
    need = set(cand_vars(cand))
    for a in theory:
        need |= set(logic.free_vars(a))
    names = sorted(v.key() for v in need)
    fns = [logic.compile_assertion(a) for a in theory]
    values = bound.values()
    for combo in itertools.product(values, repeat=len(names)):
        env = dict(zip(names, combo))
        if not all(fn(env) for fn in fns):
            continue
        w = cand_eval(cand, env)
        if not (bound.lo <= w <= bound.hi):
            return env, w
    return None


def refine_loop(
    hs: HornSystem,
    bound: DomainBound,
    templates: tuple[SkolemTemplate, ...] | None = None,
    budget: int | None = None,
    deadline: float | None = None,
):
    """Search template combinations lexicographically until one closes
    the system satisfiably, or the space is covered by blocking
    constraints. Returns Solved or Exhausted; Exhausted.complete tells a
    covered space apart from an exhausted budget or deadline."""
    log: list[str] = []
    slots: list[tuple[int, str]] = []
    for ci, c in enumerate(hs.clauses):
        for y in c.head.exists:
            slots.append((ci, y.key()))

    if not slots:
        r = solve_ground(ground(hs, bound))
        if isinstance(r, Sat):
            log.append("no existential heads; solved directly")
            return Solved({}, r.solution, 0, tuple(log))
        log.append("no existential heads; unsatisfiable directly")
        return Exhausted(isinstance(r, Unsat), 0, tuple(log))

    if templates is None:
        templates = default_templates(hs, bound)
    by_slot = {}
    for t in templates:
        key = (t.clause_index, t.var)
        prev = by_slot.get(key)
        by_slot[key] = prev + tuple(t.candidates) if prev else tuple(t.candidates)
    for slot in slots:
        if not by_slot.get(slot):
            raise MissingTemplate(slot[0], slot[1])
    cands = [by_slot[slot] for slot in slots]
    slot_of_clause: dict[int, list[int]] = {}
    for si, (ci, _) in enumerate(slots):
        slot_of_clause.setdefault(ci, []).append(si)

    blocked: list[RefinementConstraint] = []
    iterations = 0
    for point in itertools.product(*(range(len(cs)) for cs in cands)):
        if any(all(point[si] == k for si, k in rc.assignments) for rc in blocked):
            continue
        if budget is not None and iterations >= budget:
            log.append(f"budget of {budget} iterations exhausted")
            return Exhausted(False, iterations, tuple(log))
        if deadline is not None and time.monotonic() > deadline:
            log.append("deadline exhausted")
            return Exhausted(False, iterations, tuple(log))
        iterations += 1
        desc = "; ".join(
            f"clause {ci} {var} <- {render_cand(var, cands[si][point[si]])}"
            for si, (ci, var) in enumerate(slots)
        )

        reject = None
        for si, (ci, var) in enumerate(slots):
            hit = _totality_violation(hs, bound, ci, cands[si][point[si]])
            if hit is not None:
                env, w = hit
                at = ", ".join(f"{k} = {v}" for k, v in sorted(env.items()))
                reject = (si, f"{var} = {w} outside [{bound.lo}, {bound.hi}] at {at}")
                break
        if reject is not None:
            si, why = reject
            blocked.append(RefinementConstraint(((si, point[si]),), f"totality: {why}"))
            log.append(f"iter {iterations}: {desc} -> rejected ({why})")
            continue

        chosen = {slots[si]: cands[si][point[si]] for si in range(len(slots))}
        closed = skolemize(hs, chosen)
        gs = ground(closed, bound)
        r = solve_ground(gs, deadline=deadline)
        if isinstance(r, Sat):
            assert check_solution(gs, r.solution)
            log.append(f"iter {iterations}: {desc} -> sat")
            return Solved(chosen, r.solution, iterations, tuple(log))
        if isinstance(r, Unsat):
            touched = sorted({gs.clauses[g].src for g in r.core})
            assigns = tuple(
                (si, point[si]) for ci in touched for si in slot_of_clause.get(ci, ())
            )
            if not assigns:
                log.append(f"iter {iterations}: {desc} -> unsat independent of witnesses")
                return Exhausted(True, iterations, tuple(log))
            blocked.append(RefinementConstraint(assigns, "conflict core"))
            log.append(f"iter {iterations}: {desc} -> unsat (blocks {len(assigns)} choices)")
        else:
            blocked.append(
                RefinementConstraint(tuple((si, point[si]) for si in range(len(slots))), "unknown")
            )
            log.append(f"iter {iterations}: {desc} -> unknown; point blocked")
    log.append(f"search space covered after {iterations} iterations")
    return Exhausted(True, iterations, tuple(log))


# ------------------------------------------------------- template files

_LINE = re.compile(r"clause\s+(\d+)\s*:\s*([A-Za-z_]\w*'?)\s*=\s*(.+?)\s*$")
_SLOT = re.compile(r"\[\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*\]")


def parse_templates(text: str) -> tuple[SkolemTemplate, ...]:
    """Read template lines: `clause N: y = rhs`.

    The rhs is a term or a case split `(assertion ? rhs : rhs)`; one or
    more `[lo..hi]` ranges expand into a candidate per value, counted up.
    Lines for the same (clause, variable) append candidates in order.
    """
    merged: dict[tuple[int, str], list] = {}
    order: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise ParseError(lineno, "'clause N: var = rhs'", raw)
        key = (int(m.group(1)), m.group(2))
        for concrete in _expand(m.group(3)):
            cand = _parse_rhs(concrete)
            merged.setdefault(key, []).append(cand)
        if key not in order:
            order.append(key)
    return tuple(SkolemTemplate(ci, var, tuple(merged[(ci, var)])) for ci, var in order)


def _expand(s: str) -> list[str]:
    m = _SLOT.search(s)
    if m is None:
        return [s]
    lo, hi = int(m.group(1)), int(m.group(2))
    out: list[str] = []
    for k in range(lo, hi + 1):
        body = s[: m.start()] + str(k) + s[m.end() :]
        out.extend(_expand(body))
    return out


def _parse_rhs(s: str):
    s = s.strip()
    if _top_level(s, "?") is None:
        return parser.parse_term(s)
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError(1, "parenthesized case split", s)
    inner = s[1:-1]
    q = _top_level(inner, "?")
    col = _top_level(inner, ":", start=q + 1)
    if q is None or col is None:
        raise ParseError(1, "'(assertion ? rhs : rhs)'", s)
    cond = parser.parse_assertion(inner[:q])
    return Piecewise(cond, _parse_rhs(inner[q + 1 : col]), _parse_rhs(inner[col + 1 :]))


def _top_level(s: str, ch: str, start: int = 0) -> int | None:
    depth = 0
    for i in range(start, len(s)):
        c = s[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == ch and depth == 0:
            return i
    return None
