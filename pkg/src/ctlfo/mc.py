"""Direct explicit-state checking over the bounded state space.

Satisfaction sets are computed bottom-up per subformula by fixpoint
iteration over all in-bound states, under an environment for data
quantifiers; results are memoized per (subformula, relevant bindings).
Path quantification ranges over maximal runs: a run either continues
forever inside the bound or ends in a state with no in-bound successor,
so a deadlocked state satisfies `A G p` when `p` holds along the way
and fails `A X p` outright. Until is strict in its left argument: the
witness position needs only the right argument.

The verdict is over initial in-bound states: the property holds when
every one satisfies it (vacuously when there are none). For each
satisfied initial state the checker extracts a witness for the leading
existential layer: chosen values for outer data existentials and, for
an outermost E path, a finite run prefix (with a loop-back index when
the run cycles).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import formula as F
from .errors import OpenFormula
from .formula import check_no_shadowing, free_data_vars
from .logic import compile_assertion
from .system import DomainBound, State, TransitionSystem, initial_states, successor_map


@dataclass(frozen=True)
class Witness:
    """Outermost existential choices for one satisfied initial state."""

    bindings: tuple[tuple[str, int], ...]
    path: tuple[State, ...] | None = None
    loop_index: int | None = None


@dataclass(frozen=True)
class McResult:
    holds: bool
    per_init: dict[State, bool]
    witnesses: dict[State, Witness]


def mc_check(ts: TransitionSystem, f: F.Formula, bound: DomainBound) -> McResult:
    check_no_shadowing(f, ts.vars)
    open_names = free_data_vars(f) - set(ts.vars)
    if open_names:
        raise OpenFormula(sorted(open_names))
    ck = _Checker(ts, bound)
    top = ck.sat(f, {})
    per_init: dict[State, bool] = {}
    witnesses: dict[State, Witness] = {}
    for s in initial_states(ts, bound):
        ok = s in top
        per_init[s] = ok
        if ok:
            w = ck.witness(f, s)
            if w is not None:
                witnesses[s] = w
    return McResult(all(per_init.values()), per_init, witnesses)


mc = mc_check


def mc_state(ts: TransitionSystem, s: State, f: F.Formula, bound: DomainBound) -> bool:
    """Does the formula hold at one given state of the bounded system?"""
    check_no_shadowing(f, ts.vars)
    open_names = free_data_vars(f) - set(ts.vars)
    if open_names:
        raise OpenFormula(sorted(open_names))
    ck = _Checker(ts, bound)
    return s in ck.sat(f, {})


class _Checker:
    def __init__(self, ts: TransitionSystem, bound: DomainBound):
        self.ts = ts
        self.bound = bound
        self.smap = successor_map(ts, bound)
        self.states: tuple[State, ...] = tuple(self.smap.states)
        self.universe = frozenset(self.states)
        self._dicts = {s: dict(zip(ts.vars, s)) for s in self.states}
        self._memo: dict = {}
        self._fv: dict[int, frozenset[str]] = {}
        self._fns: dict[int, object] = {}
        self._keep = []  # pin formula nodes; memo keys use their ids

    def _free(self, node) -> frozenset[str]:
        fv = self._fv.get(id(node))
        if fv is None:
            fv = free_data_vars(node)
            self._fv[id(node)] = fv
            self._keep.append(node)
        return fv

    def _assert_states(self, a, env: dict) -> frozenset[State]:
        fn = self._fns.get(id(a))
        if fn is None:
            fn = compile_assertion(a)
            self._fns[id(a)] = fn
            self._keep.append(a)
        out = []
        for s in self.states:
            d = dict(self._dicts[s])
            d.update(env)
            if fn(d):
                out.append(s)
        return frozenset(out)

    def sat(self, node: F.Formula, env: dict) -> frozenset[State]:
        fv = self._free(node)
        key = (id(node), tuple(sorted((k, v) for k, v in env.items() if k in fv)))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        res = self._sat(node, env)
        self._memo[key] = res
        self._keep.append(node)
        return res

    def _sat(self, node: F.Formula, env: dict) -> frozenset[State]:
        if isinstance(node, F.Atom):
            return self._assert_states(node.pred, env)
        if isinstance(node, F.Guard):
            holds_guard = self._assert_states(node.guard, env)
            return (self.universe - holds_guard) | self.sat(node.body, env)
        if isinstance(node, F.FNot):
            return self.universe - self.sat(node.body, env)
        if isinstance(node, F.FAnd):
            return self.sat(node.lhs, env) & self.sat(node.rhs, env)
        if isinstance(node, F.FOr):
            return self.sat(node.lhs, env) | self.sat(node.rhs, env)
        if isinstance(node, F.Forall):
            acc = self.universe
            for v in self.bound.values():
                env2 = dict(env)
                env2[node.var] = v
                acc &= self.sat(node.body, env2)
                if not acc:
                    break
            return acc
        if isinstance(node, F.Exists):
            acc: frozenset[State] = frozenset()
            for v in self.bound.values():
                env2 = dict(env)
                env2[node.var] = v
                acc |= self.sat(node.body, env2)
            return acc
        if isinstance(node, (F.A, F.E)):
            return self._path(node, env)
        raise TypeError(f"not a formula: {node!r}")

    def _path(self, node, env) -> frozenset[State]:
        universal = isinstance(node, F.A)
        p = node.path
        succ = self.smap
        if isinstance(p, F.X):
            s1 = self.sat(p.body, env)
            if universal:
                return frozenset(
                    s for s in self.states if succ[s] and all(t in s1 for t in succ[s])
                )
            return frozenset(s for s in self.states if any(t in s1 for t in succ[s]))
        if isinstance(p, F.G):
            s1 = self.sat(p.body, env)
            return self._ag(s1) if universal else self._eg(s1)
        if isinstance(p, F.F):
            s2 = self.sat(p.body, env)
            return self._au(self.universe, s2) if universal else self._eu(self.universe, s2)
        if isinstance(p, F.U):
            s1 = self.sat(p.lhs, env)
            s2 = self.sat(p.rhs, env)
            return self._au(s1, s2) if universal else self._eu(s1, s2)
        raise TypeError(f"not a path formula: {p!r}")

    # fixpoints; all iterate to stability over at most |states| rounds

    def _ag(self, s1: frozenset[State]) -> frozenset[State]:
        z = s1
        while True:
            nz = frozenset(s for s in z if all(t in z for t in self.smap[s]))
            if nz == z:
                return z
            z = nz

    def _eg(self, s1: frozenset[State]) -> frozenset[State]:
        z = s1
        while True:
            nz = frozenset(
                s for s in z if not self.smap[s] or any(t in z for t in self.smap[s])
            )
            if nz == z:
                return z
            z = nz

    def _au(self, s1: frozenset[State], s2: frozenset[State]) -> frozenset[State]:
        z = s2
        while True:
            add = frozenset(
                s
                for s in s1 - z
                if self.smap[s] and all(t in z for t in self.smap[s])
            )
            if not add:
                return z
            z |= add

    def _eu(self, s1: frozenset[State], s2: frozenset[State]) -> frozenset[State]:
        z = s2
        while True:
            add = frozenset(s for s in s1 - z if any(t in z for t in self.smap[s]))
            if not add:
                return z
            z |= add

    # ---------------------------------------------------------- witnesses

    def witness(self, f: F.Formula, s: State) -> Witness | None:
        bindings: list[tuple[str, int]] = []
        env: dict[str, int] = {}
        node = f
        while isinstance(node, F.Exists):
            for v in self.bound.values():
                env2 = dict(env)
                env2[node.var] = v
                if s in self.sat(node.body, env2):
                    bindings.append((node.var, v))
                    env = env2
                    node = node.body
                    break
            else:
                return None  # inconsistent sat sets; unreachable
        if isinstance(node, F.E):
            path, loop = self._run_prefix(node.path, s, env)
            return Witness(tuple(bindings), path, loop)
        if bindings:
            return Witness(tuple(bindings))
        return None

    def _run_prefix(self, p, s: State, env):
        if isinstance(p, F.X):
            s1 = self.sat(p.body, env)
            for t in self.smap[s]:
                if t in s1:
                    return (s, t), None
            return (s,), None
        if isinstance(p, (F.F, F.U)):
            if isinstance(p, F.F):
                s1, s2 = self.universe, self.sat(p.body, env)
            else:
                s1, s2 = self.sat(p.lhs, env), self.sat(p.rhs, env)
            z = self._eu(s1, s2)
            return self._shortest_to(s, s2, s1 & z), None
        if isinstance(p, F.G):
            z = self._eg(self.sat(p.body, env))
            path = [s]
            seen = {s: 0}
            cur = s
            while True:
                nxt = None
                for t in self.smap[cur]:
                    if t in z:
                        nxt = t
                        break
                if nxt is None:
                    return tuple(path), None  # maximal run ends in bound
                if nxt in seen:
                    return tuple(path), seen[nxt]
                seen[nxt] = len(path)
                path.append(nxt)
                cur = nxt
        raise TypeError(f"not a path formula: {p!r}")

    def _shortest_to(self, s: State, targets: frozenset[State], allowed: frozenset[State]):
        """Breadth-first run from s to a target, intermediate states allowed."""
        if s in targets:
            return (s,)
        back: dict[State, State | None] = {s: None}
        frontier = [s]
        while frontier:
            nxt: list[State] = []
            for cur in frontier:
                if cur is not s and cur not in allowed:
                    continue
                for t in self.smap[cur]:
                    if t in back:
                        continue
                    back[t] = cur
                    if t in targets:
                        path = [t]
                        while back[path[-1]] is not None:
                            path.append(back[path[-1]])
                        path.reverse()
                        return tuple(path)
                    nxt.append(t)
            frontier = nxt
        return (s,)  # no finite prefix found; degenerate


def render_mc_result(res: McResult) -> str:
    lines = [("holds" if res.holds else "does not hold")]
    for s, ok in res.per_init.items():
        tag = "holds" if ok else "fails"
        extra = ""
        w = res.witnesses.get(s)
        if w is not None:
            bits = [f"{name} = {v}" for name, v in w.bindings]
            if w.path is not None:
                arrow = " -> ".join(_fmt_state(t) for t in w.path)
                if w.loop_index is not None:
                    arrow += f" (loops to position {w.loop_index})"
                bits.append(f"run {arrow}")
            if bits:
                extra = "  [" + "; ".join(bits) + "]"
        lines.append(f"init {_fmt_state(s)}: {tag}{extra}")
    return "\n".join(lines) + "\n"


def _fmt_state(s: State) -> str:
    return "(" + ", ".join(str(v) for v in s) + ")"
