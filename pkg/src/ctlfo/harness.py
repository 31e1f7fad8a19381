"""Pipeline drivers: prove, disprove, generate, model check, benchmark.

The prove protocol compiles the formula to constraints and hands them to
the chosen backend; disprove proves the negation normal form of the
negated formula, which is sound only on systems total within the domain
box. The benchmark runner applies both directions to every corpus entry
and checks the recorded expectation, mirroring a two-column
proved/disproved table.
"""

from __future__ import annotations

import concurrent.futures
import os
import time
from dataclasses import dataclass

from . import formula as F
from .cegar import Exhausted, Solved, parse_templates, refine_loop
from .errors import CtlfoError, TotalityRequired
from .gen import gen
from .grounding import ground
from .horn import emit_chc, emit_textual
from .mc import mc_check, render_mc_result
from .parser import parse_formula
from .solver import Sat, Unknown, Unsat, render_solution, solve_ground
from .system import DomainBound, find_deadlock, is_total, load_system

PROVED = "proved"
DISPROVED = "disproved"
UNKNOWN = "unknown"


@dataclass
class RunReport:
    task: str
    verdict: str
    engine: str
    seconds: float
    clauses: int
    atoms: int
    reason: str | None = None
    dump: str | None = None

    def line(self) -> str:
        extra = f" ({self.reason})" if self.reason else ""
        return (
            f"{self.task}: {self.verdict}{extra} in {self.seconds:.2f}s"
            f" [{self.engine}, {self.clauses} clauses, {self.atoms} atoms]"
        )


def _templates_from(path: str | None):
    if path is None:
        return None
    with open(path, "r", encoding="utf-8") as fh:
        return parse_templates(fh.read())


def _attempt(ts, f, bound, backend, deadline, templates) -> tuple[str, str | None, int, int, str]:
    """Run one direction; returns (outcome, reason, clauses, atoms, dump text)."""
    hs = gen(f, ts)
    gs = ground(hs, bound)
    if backend == "cegar":
        r = refine_loop(hs, bound, templates=templates, deadline=deadline)
        if isinstance(r, Solved):
            return "sat", None, len(hs.clauses), gs.n_atoms, render_solution(gs, r.solution)
        assert isinstance(r, Exhausted)
        reason = "template space exhausted" if r.complete else "budget or timeout"
        return ("unsat" if r.complete else "unknown"), reason, len(hs.clauses), gs.n_atoms, "\n".join(r.log)
    r = solve_ground(gs, deadline=deadline)
    if isinstance(r, Sat):
        return "sat", None, len(hs.clauses), gs.n_atoms, render_solution(gs, r.solution)
    if isinstance(r, Unsat):
        return "unsat", "constraints unsatisfiable", len(hs.clauses), gs.n_atoms, ""
    assert isinstance(r, Unknown)
    return "unknown", r.reason, len(hs.clauses), gs.n_atoms, ""


def _deadline(timeout: float | None) -> float | None:
    return time.monotonic() + timeout if timeout is not None else None


def cmd_prove(
    system_file: str,
    formula_text: str,
    bound: DomainBound,
    backend: str = "finite",
    timeout: float | None = None,
    templates_file: str | None = None,
    dump: str | None = None,
    task: str = "prove",
) -> RunReport:
    t0 = time.monotonic()
    ts = load_system(system_file)
    f = parse_formula(formula_text)
    outcome, reason, ncl, nat, text = _attempt(
        ts, f, bound, backend, _deadline(timeout), _templates_from(templates_file)
    )
    verdict = PROVED if outcome == "sat" else UNKNOWN
    if outcome == "unsat":
        reason = reason or "constraints unsatisfiable"
    path = _write_dump(dump, text) if verdict == PROVED else None
    return RunReport(task, verdict, backend, time.monotonic() - t0, ncl, nat, reason, path)


def cmd_disprove(
    system_file: str,
    formula_text: str,
    bound: DomainBound,
    backend: str = "finite",
    timeout: float | None = None,
    templates_file: str | None = None,
    dump: str | None = None,
    task: str = "disprove",
) -> RunReport:
    t0 = time.monotonic()
    ts = load_system(system_file)
    f = parse_formula(formula_text)
    if not is_total(ts, bound):
        raise TotalityRequired(find_deadlock(ts, bound))
    neg = F.negation_normal_form(F.FNot(f))
    outcome, reason, ncl, nat, text = _attempt(
        ts, neg, bound, backend, _deadline(timeout), _templates_from(templates_file)
    )
    verdict = DISPROVED if outcome == "sat" else UNKNOWN
    if outcome == "unsat":
        reason = reason or "negation constraints unsatisfiable"
    path = _write_dump(dump, text) if verdict == DISPROVED else None
    return RunReport(task, verdict, backend, time.monotonic() - t0, ncl, nat, reason, path)


def cmd_gen(system_file: str, formula_text: str, emit: str = "text") -> str:
    ts = load_system(system_file)
    f = parse_formula(formula_text)
    hs = gen(f, ts)
    if emit == "chc":
        return emit_chc(hs)
    return emit_textual(hs)


def cmd_mc(system_file: str, formula_text: str, bound: DomainBound) -> tuple[bool, str]:
    ts = load_system(system_file)
    f = parse_formula(formula_text)
    res = mc_check(ts, f, bound)
    return res.holds, render_mc_result(res)


def _write_dump(path: str | None, text: str) -> str | None:
    if path is None or not text:
        return None
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")
    return path


# ----------------------------------------------------------- benchmarks


@dataclass
class BenchEntry:
    name: str
    system_file: str
    formula: str
    expected: str
    bound: DomainBound | None


def read_corpus(corpus_dir: str) -> list[BenchEntry]:
    """One directory per task: system.ts, formula.txt, expect.txt.

    expect.txt holds `verdict: proved|disproved` and an optional
    `bound: LO..HI` override.
    """
    entries = []
    for name in sorted(os.listdir(corpus_dir)):
        task_dir = os.path.join(corpus_dir, name)
        if not os.path.isdir(task_dir):
            continue
        with open(os.path.join(task_dir, "formula.txt"), "r", encoding="utf-8") as fh:
            formula = fh.read().strip()
        expected, bound = None, None
        with open(os.path.join(task_dir, "expect.txt"), "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, value = line.partition(":")
                key, value = key.strip(), value.strip()
                if key == "verdict":
                    expected = value
                elif key == "bound":
                    bound = DomainBound.parse(value)
                else:
                    raise CtlfoError(f"{name}/expect.txt: unknown key {key!r}")
        if expected not in (PROVED, DISPROVED):
            raise CtlfoError(f"{name}/expect.txt: verdict must be proved or disproved")
        entries.append(BenchEntry(name, os.path.join(task_dir, "system.ts"), formula, expected, bound))
    return entries


def _bench_task(packed):
    entry, bound, backend, timeout = packed
    b = entry.bound or bound
    prove = cmd_prove(entry.system_file, entry.formula, b, backend, timeout, task=entry.name)
    disprove = cmd_disprove(entry.system_file, entry.formula, b, backend, timeout, task=entry.name)
    return prove, disprove


def cmd_bench(
    corpus_dir: str,
    bound: DomainBound,
    backend: str = "finite",
    timeout: float | None = None,
    jobs: int = 1,
) -> tuple[list[tuple[BenchEntry, RunReport, RunReport]], bool, str]:
    """Run prove and disprove on every entry; verify the expectations.

    Returns (rows, all_ok, rendered table). Rows are in task-name order
    regardless of worker scheduling.
    """
    entries = read_corpus(corpus_dir)
    packed = [(e, bound, backend, timeout) for e in entries]
    if jobs > 1 and len(entries) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_task, packed))
    else:
        results = [_bench_task(p) for p in packed]
    rows = [(e, pr, dr) for e, (pr, dr) in zip(entries, results)]
    ok = True
    lines = [f"{'task':<22} {'phi':<9} {'t(s)':>6}  {'not-phi':<9} {'t(s)':>6}  {'expect':<10} ok"]
    for e, pr, dr in rows:
        got = _bench_verdict(pr, dr)
        match = got == e.expected
        ok = ok and match
        lines.append(
            f"{e.name:<22} {_mark(pr.verdict == PROVED):<9} {pr.seconds:>6.2f}  "
            f"{_mark(dr.verdict == DISPROVED):<9} {dr.seconds:>6.2f}  {e.expected:<10} "
            + ("ok" if match else f"MISMATCH (got {got})")
        )
    return rows, ok, "\n".join(lines)


def _bench_verdict(prove: RunReport, disprove: RunReport) -> str:
    proved = prove.verdict == PROVED
    disproved = disprove.verdict == DISPROVED
    if proved and disproved:
        return "contradiction"
    if proved:
        return PROVED
    if disproved:
        return DISPROVED
    return UNKNOWN


def _mark(flag: bool) -> str:
    return "yes" if flag else "no"
