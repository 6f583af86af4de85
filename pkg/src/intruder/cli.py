"""Command-line front end.

Exit codes: 0 derivable, 1 not derivable, 2 usage or parse error, 3 the
checker rejected a proof produced by the engine (should never happen).
A directory argument runs every ``*.txt`` problem in it and prints a
summary table; the exit code is then the worst one seen.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .engine import Decision, InternalError, decide
from .oracle import OracleBudget, nd_prove
from .problem import ParseError, Problem, parse_problem
from .proofs import check_proof, dumps, loads, render_text
from .terms import TermError

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intruder", description="Decide ground intruder deduction problems.")
    ap.add_argument("path", help="problem file, '-' for stdin, or a directory of *.txt problems")
    ap.add_argument("--emit-proof", choices=("text", "json"), help="print the proof of a derivable goal")
    ap.add_argument("--check", action="store_true", help="re-verify the emitted proof after a JSON round trip")
    ap.add_argument(
        "--oracle-check",
        nargs="?",
        type=int,
        const=OracleBudget().max_depth,
        metavar="DEPTH",
        help="cross-check with the bounded natural-deduction oracle",
    )
    ap.add_argument("--stats", action="store_true", help="print key=value statistics on stderr")
    return ap


def _solve(problem: Problem, args, out: TextIO, err: TextIO) -> int:
    th = problem.session()
    gamma = [th.normalize(th.intern(a)) for a in problem.assumptions]
    goal = th.normalize(th.intern(problem.goal))
    try:
        d: Decision = decide(gamma, goal, th)
    except InternalError as e:
        print(f"internal error: {e}", file=err)
        return EXIT_INTERNAL
    print("derivable" if d.provable else "not derivable", file=out)
    code = EXIT_OK if d.provable else EXIT_NO
    if d.provable and args.emit_proof == "text":
        print(render_text(d.proof, th), file=out)
    elif d.provable and args.emit_proof == "json":
        print(dumps(d.proof, th), file=out)
    if d.provable and args.check:
        again = loads(dumps(d.proof, th), th)
        res = check_proof(again, d.sequent.gamma, d.sequent.goal, th)
        print(f"check: {res}", file=err)
        if not res:
            code = EXIT_INTERNAL
    if args.oracle_check is not None:
        budget = OracleBudget(max_depth=args.oracle_check)
        o = nd_prove(gamma, goal, th, budget)
        agree = "agree" if o.provable == d.provable else ("inconclusive" if not o.provable else "DISAGREE")
        print(f"oracle: {o.verdict.value} (rounds={o.rounds}, known={o.known}, capped={o.capped}) {agree}", file=err)
        if o.provable and not d.provable:
            code = EXIT_INTERNAL
    if args.stats:
        for k, v in d.stats.items():
            print(f"{k}={v}", file=err)
    return code


def _load(path: str) -> Problem:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_problem(text, source=path)


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    p = Path(args.path)
    if args.path != "-" and p.is_dir():
        return _batch(sorted(p.glob("*.txt")), args, out, err)
    try:
        problem = _load(args.path)
    except OSError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except (ParseError, TermError) as e:
        print(f"{args.path}:{e}" if getattr(e, "line", 0) else f"{args.path}: {e}", file=err)
        return EXIT_USAGE
    return _solve(problem, args, out, err)


def _batch(files, args, out: TextIO, err: TextIO) -> int:
    import io

    rows = []
    worst = EXIT_OK
    for f in files:
        buf, ebuf = io.StringIO(), io.StringIO()
        try:
            code = _solve(_load(str(f)), args, buf, ebuf)
        except (ParseError, TermError) as e:
            code = EXIT_USAGE
            ebuf.write(str(e))
        verdict = {EXIT_OK: "derivable", EXIT_NO: "not derivable", EXIT_USAGE: "error", EXIT_INTERNAL: "INTERNAL"}[code]
        rows.append((f.name, verdict, code))
        worst = max(worst, code) if code != EXIT_NO else worst
    width = max((len(r[0]) for r in rows), default=4)
    print(f"{'file':<{width}}  result", file=out)
    for name, verdict, _ in rows:
        print(f"{name:<{width}}  {verdict}", file=out)
    n_yes = sum(r[2] == EXIT_OK for r in rows)
    print(f"{len(rows)} problems, {n_yes} derivable, {sum(r[2] == EXIT_NO for r in rows)} not derivable", file=out)
    return worst


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
