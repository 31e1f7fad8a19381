"""Command-line front end.

Exit codes: 0 proved (or: property holds, benchmark clean), 1 disproved
(or: property fails, benchmark mismatch), 2 unknown, 3 input error.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import CtlfoError
from .gen import gen_trace, render_gen_trace
from .parser import parse_formula
from .system import DomainBound, load_system


def _bound(text: str) -> DomainBound:
    return DomainBound.parse(text)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ctlfo",
        description="Temporal-property verification by constraint solving over bounded integer domains.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, bound=True):
        p.add_argument("--system", required=True, help="transition system file")
        p.add_argument("--formula", required=True, help="formula text")
        if bound:
            p.add_argument("--bound", type=_bound, required=True, metavar="LO..HI")

    for name, help_text in (("prove", "prove the formula"), ("disprove", "prove its negation")):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--backend", choices=("finite", "cegar"), default="finite")
        p.add_argument("--timeout", type=float, default=None, metavar="SECS")
        p.add_argument("--templates", default=None, metavar="FILE", help="witness template file (cegar)")
        p.add_argument("--dump", default=None, metavar="PATH", help="write the solution here")
        p.set_defaults(fn=_run_prove if name == "prove" else _run_disprove)

    p = sub.add_parser("gen", help="emit the generated constraints")
    common(p, bound=False)
    p.add_argument("--emit", choices=("text", "chc"), default="text")
    p.add_argument("--trace", action="store_true", help="also print the generation trace")
    p.add_argument("--dump", default=None, metavar="PATH", help="write the constraints here")
    p.set_defaults(fn=_run_gen)

    p = sub.add_parser("mc", help="explicit-state check over the bounded domain")
    common(p)
    p.set_defaults(fn=_run_mc)

    p = sub.add_parser("bench", help="run a corpus of prove/disprove expectations")
    p.add_argument("--corpus", required=True, help="directory of task directories")
    p.add_argument("--bound", type=_bound, required=True, metavar="LO..HI")
    p.add_argument("--backend", choices=("finite", "cegar"), default="finite")
    p.add_argument("--timeout", type=float, default=None, metavar="SECS")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.set_defaults(fn=_run_bench)

    return ap


def _run_prove(args) -> int:
    report = harness.cmd_prove(
        args.system, args.formula, args.bound, args.backend, args.timeout, args.templates, args.dump
    )
    print(report.line())
    if report.dump:
        print(f"solution written to {report.dump}")
    return 0 if report.verdict == harness.PROVED else 2


def _run_disprove(args) -> int:
    report = harness.cmd_disprove(
        args.system, args.formula, args.bound, args.backend, args.timeout, args.templates, args.dump
    )
    print(report.line())
    if report.dump:
        print(f"solution written to {report.dump}")
    return 1 if report.verdict == harness.DISPROVED else 2


def _run_gen(args) -> int:
    text = harness.cmd_gen(args.system, args.formula, args.emit)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"constraints written to {args.dump}")
    else:
        sys.stdout.write(text)
    if args.trace:
        rows = gen_trace(parse_formula(args.formula), load_system(args.system))
        print(render_gen_trace(rows))
    return 0


def _run_mc(args) -> int:
    holds, text = harness.cmd_mc(args.system, args.formula, args.bound)
    print(text)
    return 0 if holds else 1


def _run_bench(args) -> int:
    rows, ok, table = harness.cmd_bench(
        args.corpus, args.bound, args.backend, args.timeout, args.jobs
    )
    print(table)
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CtlfoError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
