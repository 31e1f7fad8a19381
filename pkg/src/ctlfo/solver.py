"""Ground constraint search and independent solution checking.

The search is a propagation-driven backtracking loop over ground atoms.
Per clause it keeps counters (false and unassigned premise literals,
per-group false and unassigned members, live and completed group
counts), so each assignment touches only the clauses the atom occurs
in. Deductions: a clause whose premise holds and has one live group
left forces that group true; a clause whose head is dead and premise
has one open literal left forces that literal false; premise held with
no live groups is a conflict. Atoms of well-foundedness predicates are
tracked as edges of a digraph and every added edge is checked for a
cycle, so partial assignments stay well founded.

Decision polarity follows the atom's role in the clause picked: premise
literals are falsified (activations stay off until something forces
them), witness group members are set true (committing to that witness;
the flip rejects it). Conflicts backjump: the reason graph of a
conflict is chased to the decisions it involves, the deepest one is
flipped, and the decisions above it are discarded unexplored (they
cannot resolve this conflict). A flip is justified by the involved
decisions below it plus the conflict's clause cone, both captured
before undoing since antecedent enumeration reads the live assignment.
Atoms still unassigned when every clause is satisfied default to
false. Unsatisfiable runs report the clause cone of the final
conflict, accumulated through forced-assignment and flip reasons.

check_solution and check_wf_acyclic revalidate a solution from scratch
and share no code with the search.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from .grounding import GroundSystem


@dataclass(frozen=True)
class Solution:
    """Satisfying tuples per predicate, and level maps for wf predicates.

    Levels are sparse: tuples absent from a level map sit at level 0.
    """

    relations: dict[str, frozenset[tuple[int, ...]]]
    levels: dict[str, dict[tuple[int, ...], int]]


@dataclass(frozen=True)
class Sat:
    solution: Solution


@dataclass(frozen=True)
class Unsat:
    core: tuple[int, ...]  # indices into GroundSystem.clauses


@dataclass(frozen=True)
class Unknown:
    reason: str


SolveResult = Sat | Unsat | Unknown


def solve_ground(
    gs: GroundSystem,
    max_decisions: int | None = None,
    deadline: float | None = None,
) -> SolveResult:
    return _Search(gs).run(max_decisions, deadline)


# ------------------------------------------------------------------ search


class _Search:
    def __init__(self, gs: GroundSystem):
        self.gs = gs
        self.orig: list[int] = []  # working index -> gs.clauses index
        self.bodies: list[tuple[tuple[int, bool], ...]] = []
        self.groups: list[tuple[tuple[int, ...], ...]] = []
        for idx, gc in enumerate(gs.clauses):
            if gc.trivial:
                continue
            self.orig.append(idx)
            self.bodies.append(gc.body)
            self.groups.append(tuple(tuple(dict.fromkeys(g)) for g in gc.groups))
        m = len(self.orig)
        self.body_unassigned = [len(b) for b in self.bodies]
        self.body_false = [0] * m
        self.g_unassigned = [[len(g) for g in gs] for gs in self.groups]
        self.g_false = [[0] * len(g) for g in self.groups]
        self.alive = [len(g) for g in self.groups]
        self.true_g = [0] * m
        n = gs.n_atoms
        self.assign = bytearray(n)  # 0 open, 1 true, 2 false
        self.reason: list[object] = [None] * n
        self.trail: list[int] = []
        # occurrences: atom -> [(working clause, tag)]; tag -1 positive
        # premise literal, -2 negated premise literal, >=0 group index
        occ: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for wi in range(m):
            for aid, pos in self.bodies[wi]:
                occ[aid].append((wi, -1 if pos else -2))
            for gi, grp in enumerate(self.groups[wi]):
                for aid in grp:
                    occ[aid].append((wi, gi))
        self.occ = occ
        # wf bookkeeping: per wf block an edge-labelled adjacency
        self.wf_blocks = gs.wf_ranges()
        self.wf_adj: list[dict] = [{} for _ in self.wf_blocks]
        self._wf_cache: dict[int, tuple | None] = {}
        self.worklist: list[int] = []
        self.decisions: list[tuple] = []  # (trail mark, atom, value, scan ptr)
        self.level_of: dict[int, int] = {}
        self.scan = 0
        self.n_decisions = 0

    # -- assignment bookkeeping

    def _force(self, aid: int, value: bool, reason) -> object | None:
        """Assign and update counters. Returns a conflict or None."""
        cur = self.assign[aid]
        want = 1 if value else 2
        if cur:
            if cur == want:
                return None
            return reason if reason is not None else self.reason[aid]
        self.assign[aid] = want
        self.reason[aid] = reason
        self.trail.append(aid)
        bu, bf = self.body_unassigned, self.body_false
        for wi, tag in self.occ[aid]:
            if tag == -1:
                bu[wi] -= 1
                if not value:
                    bf[wi] += 1
            elif tag == -2:
                bu[wi] -= 1
                if value:
                    bf[wi] += 1
            else:
                gu, gf = self.g_unassigned[wi], self.g_false[wi]
                gu[tag] -= 1
                if value:
                    if gf[tag] == 0 and gu[tag] == 0:
                        self.true_g[wi] += 1
                else:
                    if gf[tag] == 0:
                        self.alive[wi] -= 1
                    gf[tag] += 1
            self.worklist.append(wi)
        if value:
            conflict = self._wf_added(aid)
            if conflict is not None:
                return conflict
        return None

    def _unassign(self, aid: int) -> None:
        value = self.assign[aid] == 1
        self.assign[aid] = 0
        self.reason[aid] = None
        bu, bf = self.body_unassigned, self.body_false
        for wi, tag in self.occ[aid]:
            if tag == -1:
                bu[wi] += 1
                if not value:
                    bf[wi] -= 1
            elif tag == -2:
                bu[wi] += 1
                if value:
                    bf[wi] -= 1
            else:
                gu, gf = self.g_unassigned[wi], self.g_false[wi]
                if value:
                    if gf[tag] == 0 and gu[tag] == 0:
                        self.true_g[wi] -= 1
                    gu[tag] += 1
                else:
                    gf[tag] -= 1
                    gu[tag] += 1
                    if gf[tag] == 0:
                        self.alive[wi] += 1
        if value:
            self._wf_removed(aid)

    # -- well-foundedness digraphs

    def _wf_decode(self, aid: int):
        hit = self._wf_cache.get(aid, 0)
        if hit != 0:
            return hit
        out = None
        for bi, (name, off, size, arity) in enumerate(self.wf_blocks):
            if off <= aid < off + size:
                lo, n = self.gs.bound.lo, self.gs.bound.size
                rem = aid - off
                args = []
                for _ in range(arity):
                    args.append(lo + rem % n)
                    rem //= n
                half = arity // 2
                out = (bi, tuple(args[:half]), tuple(args[half:]))
                break
        self._wf_cache[aid] = out
        return out

    def _wf_added(self, aid: int):
        dec = self._wf_decode(aid)
        if dec is None:
            return None
        bi, t, u = dec
        adj = self.wf_adj[bi]
        adj.setdefault(t, []).append((u, aid))
        if t == u:
            return ("wf", (aid,))
        path = _edge_path(adj, u, t)
        if path is not None:
            return ("wf", tuple(path) + (aid,))
        return None

    def _wf_removed(self, aid: int) -> None:
        dec = self._wf_decode(aid)
        if dec is None:
            return
        bi, t, u = dec
        self.wf_adj[bi][t].remove((u, aid))

    # -- propagation

    def _satisfied(self, wi: int) -> bool:
        return self.body_false[wi] > 0 or self.true_g[wi] > 0

    def _propagate(self) -> object | None:
        work = self.worklist
        while work:
            wi = work.pop()
            if self._satisfied(wi):
                continue
            if self.body_unassigned[wi] == 0:
                if self.alive[wi] == 0:
                    work.clear()
                    return wi
                if self.alive[wi] == 1:
                    gf = self.g_false[wi]
                    for gi, grp in enumerate(self.groups[wi]):
                        if gf[gi] == 0:
                            for aid in grp:
                                if self.assign[aid] == 0:
                                    conflict = self._force(aid, True, wi)
                                    if conflict is not None:
                                        work.clear()
                                        return conflict
                            break
            elif self.body_unassigned[wi] == 1 and self.alive[wi] == 0:
                for aid, pos in self.bodies[wi]:
                    if self.assign[aid] == 0:
                        conflict = self._force(aid, not pos, wi)
                        if conflict is not None:
                            work.clear()
                            return conflict
                        break
        return None

    # -- main loop

    def run(self, max_decisions, deadline) -> SolveResult:
        for wi in range(len(self.orig)):
            self.worklist.append(wi)
        conflict = self._propagate()
        if conflict is not None:
            _levels, clauses = self._analyze(conflict)
            return Unsat(tuple(sorted(clauses)))
        while True:
            if deadline is not None and time.monotonic() > deadline:
                return Unknown("deadline exceeded")
            wi = self._next_open()
            if wi is None:
                return Sat(self._extract())
            if max_decisions is not None and self.n_decisions >= max_decisions:
                return Unknown("decision budget exhausted")
            self.n_decisions += 1
            aid, value = self._pick_atom(wi)
            self.level_of[aid] = len(self.decisions)
            self.decisions.append((len(self.trail), aid, value, self.scan))
            conflict = self._force(aid, value, None)
            if conflict is None:
                conflict = self._propagate()
            while conflict is not None:
                # Analyze before undoing anything: antecedent enumeration
                # reads the current assignment and goes stale after pops.
                levels, clauses = self._analyze(conflict)
                if not levels:
                    return Unsat(tuple(sorted(clauses)))
                # Flip the deepest decision the conflict depends on. The
                # decisions above it cannot resolve this conflict, so their
                # subtrees are discarded unexplored. The flip is justified
                # by the involved decisions below it, which stay on the
                # trail for as long as the flip does.
                jump = max(levels)
                below = tuple(
                    self.decisions[lv][1] for lv in levels if lv != jump
                )
                mark, datom, dval, ptr = self.decisions[jump]
                for rec in self.decisions[jump:]:
                    del self.level_of[rec[1]]
                del self.decisions[jump:]
                self._undo_to(mark)
                self.scan = ptr
                conflict = self._force(
                    datom, not dval, ("cbj", below, frozenset(clauses))
                )
                if conflict is None:
                    conflict = self._propagate()

    def _undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            self._unassign(self.trail.pop())
        self.worklist.clear()

    def _next_open(self) -> int | None:
        m = len(self.orig)
        i = self.scan
        while i < m:
            if not self._satisfied(i):
                self.scan = i
                return i
            i += 1
        self.scan = m
        return None

    def _pick_atom(self, wi: int) -> tuple[int, bool]:
        for aid, pos in self.bodies[wi]:
            if self.assign[aid] == 0:
                # Falsify the premise item: positive literals go false,
                # negated ones true.
                return aid, not pos
        gf = self.g_false[wi]
        for gi, grp in enumerate(self.groups[wi]):
            if gf[gi] == 0:
                for aid in grp:
                    if self.assign[aid] == 0:
                        return aid, True
        raise AssertionError("open clause with no open atom")

    # -- results

    def _extract(self) -> Solution:
        gs = self.gs
        relations: dict[str, frozenset] = {}
        for p in gs.preds:
            block = gs.atoms_of(p.name)
            tuples = [
                gs.atom_info(aid)[1] for aid in block if self.assign[aid] == 1
            ]
            relations[p.name] = frozenset(tuples)
        levels: dict[str, dict] = {}
        for name in gs.wf_names:
            edges = []
            for t in sorted(relations[name]):
                half = len(t) // 2
                edges.append((t[:half], t[half:]))
            lv = wf_levels(edges)
            assert lv is not None, "search let a wf cycle through"
            levels[name] = lv
        return Solution(relations, levels)

    def _reason_atoms(self, r):
        """Antecedent atoms of a forcing or conflict with reason r.

        For a clause that is the assigned body atoms plus the false
        witness atoms; true or open witnesses do not justify anything.
        A forced atom's antecedents sit below it on the trail, so this
        enumeration stays valid while the atom is assigned.
        """
        if isinstance(r, int):
            assign = self.assign
            for aid, _pos in self.bodies[r]:
                if assign[aid]:
                    yield aid
            for grp in self.groups[r]:
                for aid in grp:
                    if assign[aid] == 2:
                        yield aid
        else:  # "wf" or "cbj"
            yield from r[1]

    def _analyze(self, conflict) -> tuple[set[int], set[int]]:
        """Decision levels a conflict depends on, and its clause cone."""
        levels: set[int] = set()
        clauses: set[int] = set()
        self._conflict_origin(clauses, conflict)
        stack = list(self._reason_atoms(conflict))
        seen: set[int] = set()
        level_of = self.level_of
        while stack:
            aid = stack.pop()
            if aid in seen:
                continue
            seen.add(aid)
            lv = level_of.get(aid)
            if lv is not None:
                levels.add(lv)
                continue
            r = self.reason[aid]
            if r is None:
                continue
            self._conflict_origin(clauses, r)
            stack.extend(self._reason_atoms(r))
        return levels, clauses

    def _conflict_origin(self, clauses: set[int], r) -> None:
        if isinstance(r, int):
            clauses.add(self.orig[r])
        elif r[0] == "cbj":
            clauses.update(r[2])


def _edge_path(adj: dict, src, dst):
    """Edge labels along some path src -> dst, or None. Iterative DFS."""
    if src == dst:
        return []
    back: dict = {src: None}
    stack = [src]
    while stack:
        node = stack.pop()
        for succ, label in adj.get(node, ()):
            if succ in back:
                continue
            back[succ] = (node, label)
            if succ == dst:
                labels = []
                cur = succ
                while back[cur] is not None:
                    prev, lab = back[cur]
                    labels.append(lab)
                    cur = prev
                labels.reverse()
                return labels
            stack.append(succ)
    return None


# --------------------------------------------------------------- checking


def check_wf_acyclic(edges) -> bool:
    """Explicit three-color depth-first cycle test over node pairs."""
    adj: dict = {}
    for t, u in edges:
        adj.setdefault(t, []).append(u)
    color: dict = {}
    for root in list(adj):
        if color.get(root, 0):
            continue
        color[root] = 1
        stack = [(root, iter(adj.get(root, ())))]
        while stack:
            node, it = stack[-1]
            succ = next(it, None)
            if succ is None:
                color[node] = 2
                stack.pop()
                continue
            c = color.get(succ, 0)
            if c == 1:
                return False
            if c == 0:
                color[succ] = 1
                stack.append((succ, iter(adj.get(succ, ()))))
    return True


def wf_levels(edges):
    """Sink-first level assignment: level(t) > level(u) for each edge t->u.

    Returns a node -> level dict, or None when the edges contain a cycle.
    Levels are longest-path heights, so they stay below the node count.
    """
    nodes: dict = {}
    adj: dict = {}
    radj: dict = {}
    outdeg: dict = {}
    for t, u in edges:
        nodes[t] = True
        nodes[u] = True
        adj.setdefault(t, []).append(u)
        radj.setdefault(u, []).append(t)
        outdeg[t] = outdeg.get(t, 0) + 1
    queue = deque(n for n in nodes if outdeg.get(n, 0) == 0)
    levels: dict = {}
    while queue:
        n = queue.popleft()
        levels[n] = max((levels[u] + 1 for u in adj.get(n, ())), default=0)
        for p in radj.get(n, ()):
            outdeg[p] -= 1
            if outdeg[p] == 0:
                queue.append(p)
    if len(levels) < len(nodes):
        return None
    return levels


def check_solution(gs: GroundSystem, sol: Solution) -> bool:
    """Revalidate a solution against every ground clause plus acyclicity.

    Independent of the search: truth is recomputed from the relation
    sets, and well-foundedness is retested with check_wf_acyclic.
    """
    true_ids: set[int] = set()
    for name, tuples in sol.relations.items():
        for t in tuples:
            try:
                aid = gs.atom_id(name, t)
            except KeyError:
                return False
            if aid is None:
                return False
            true_ids.add(aid)
    for gc in gs.clauses:
        if gc.trivial:
            continue
        if any((aid in true_ids) != pos for aid, pos in gc.body):
            continue
        if not any(all(a in true_ids for a in g) for g in gc.groups):
            return False
    for name in gs.wf_names:
        rel = sol.relations.get(name, frozenset())
        edges = [(t[: len(t) // 2], t[len(t) // 2 :]) for t in rel]
        if not check_wf_acyclic(edges):
            return False
    return True


def _fmt_tuple(t: tuple[int, ...]) -> str:
    return "(" + ", ".join(str(v) for v in t) + ")"


def render_solution(gs: GroundSystem, sol: Solution) -> str:
    lines = []
    for p in gs.preds:
        rel = sorted(sol.relations.get(p.name, frozenset()))
        body = ", ".join(_fmt_tuple(t) for t in rel)
        lines.append(f"{p.name} = {{{body}}}")
        if p.name in sol.levels:
            lv = sol.levels[p.name]
            parts = [f"{_fmt_tuple(nd)} -> {lv[nd]}" for nd in sorted(lv) if lv[nd]]
            if parts:
                lines.append(f"  levels: {'; '.join(parts)}")
    return "\n".join(lines) + "\n"
