"""``faultsat`` command line.

Exit codes: 0 when the command produced a finding (a counterexample, suspect
locations, a verified repair, an exported instance or an interpreter run),
1 when there was nothing to report (no counterexample, passing test, no
repair), 2 for usage, parse and input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from faultsat.encoder import ITERATION, STATEMENT, assign_loop_weights, build_instance
from faultsat.errors import FaultSatError, NoFailingTests, NotAFailingProgram, NotAFailingTest
from faultsat.executor import BOUND_EXCEEDED, FAIL, TestInput, execute, load_tests
from faultsat.frontend.lower import WIDTHS, lower_to_cfg
from faultsat.frontend.parser import parse_file
from faultsat.localizer import DEFAULT_MAX_ITERATIONS, generate_counterexample, localize, rank
from faultsat.maxsat import export_wcnf, wcnf_text
from faultsat.repair import repair_off_by_one, repair_operator

NO_CEX = "No counterexample to p found"


class _Nothing(Exception):
    """Raised to end a command with exit code 1 and a message."""


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _width(text):
    v = int(text)
    if v not in WIDTHS:
        raise argparse.ArgumentTypeError(f"width must be one of {', '.join(map(str, WIDTHS))}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("source", help="MiniC source file")
    common.add_argument("--bound", "-k", type=_positive, default=8, help="loop unwinding bound (default 8)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--width", type=_width, default=8, help="bit width of int (default 8)")
    common.add_argument("--trusted", action="append", default=[], metavar="FUNC", help="treat FUNC as trusted code")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("-o", "--output", help="write the report to this file")

    tests = argparse.ArgumentParser(add_help=False)
    tests.add_argument("--test", action="append", default=[], metavar="NAME=VALUE ...", help="test input (repeatable)")
    tests.add_argument("--tests-file", help="JSON file with one test object or a list of them")

    loc = argparse.ArgumentParser(add_help=False)
    loc.add_argument("--alpha", type=_positive, default=1, help="base soft weight")
    loc.add_argument("--iter-granularity", action="store_true", help="one selector per statement per loop iteration")
    loc.add_argument("--max-iters", type=_positive, default=DEFAULT_MAX_ITERATIONS, help="CoMSS enumeration cap")
    loc.add_argument("--timings", action="store_true", help="include wall-clock times in JSON output")

    p = argparse.ArgumentParser(prog="faultsat", description="MAX-SAT based fault localization for MiniC.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="bounded model check for an assertion violation")
    sub.add_parser("localize", parents=[common, tests, loc], help="enumerate suspect statement sets")
    r = sub.add_parser("rank", parents=[common, tests, loc], help="rank locations over several failing tests")
    r.add_argument("--count", type=_positive, default=5, help="failing tests to generate when none are given")
    rp = sub.add_parser("repair", parents=[common, tests], help="off-by-one and operator repair")
    rp.add_argument("--off-by-one", action="store_true", help="mutate integer constants by +-1 (default)")
    rp.add_argument("--operator", action="store_true", help="swap operators within their family")
    rp.add_argument("--max-iters", type=_positive, default=DEFAULT_MAX_ITERATIONS)
    sub.add_parser("export-wcnf", parents=[common, tests, loc], help="write the MAX-SAT instance as WCNF")
    sub.add_parser("run", parents=[common, tests], help="run the interpreter on test inputs")
    return p


def _load(args):
    return lower_to_cfg(parse_file(args.source), args.bound, args.width, tuple(args.trusted))


def _tests(args):
    out = [TestInput.parse(t) for t in args.test]
    if args.tests_file:
        out += load_tests(args.tests_file)
    return out


def _failing_test(program, args):
    tests = _tests(args)
    if tests:
        t = tests[0].validate(program)
        status = execute(program, t).verdict.status
        if status == BOUND_EXCEEDED:
            raise _Nothing(f"test {t.format()} needs more than {program.bound} loop iterations; raise --bound")
        if status != FAIL:
            raise _Nothing(f"test {t.format()} does not fail any assertion")
        return t
    cex = generate_counterexample(program, seed=args.seed)
    if not cex.found:
        raise _Nothing(NO_CEX)
    return cex.test


def _fmt_loc(loc):
    s = f"line {loc['line']}"
    return s + f" (iteration {loc['iter']})" if "iter" in loc else s


def _localization_text(program, report):
    a = report.meta["assertion"]
    spec = program.assertion(a["id"])
    lines = [f"file: {report.meta['file']}"]
    for t in report.per_test_runs:
        lines.append(f"test: {t.test.format() or '(no inputs)'}")
    lines.append(f"violated: {spec.describe()}")
    for i, c in enumerate(report.iterations, 1):
        lines.append(f"CoMSS {i} (cost {c.cost}): " + ", ".join(_fmt_loc(l) for l in c.statements))
    if report.exhausted:
        lines.append("No more suspects")
    else:
        lines.append(f"stopped after {len(report.iterations)} iterations")
    if len(report.per_test_runs) > 1:
        lines.append("ranking:")
        for (f, ln), n in report.ranking:
            lines.append(f"  line {ln}: {n}/{len(report.per_test_runs)}")
    return "\n".join(lines)


def cmd_check(args, program):
    cex = generate_counterexample(program, seed=args.seed)
    if not cex.found:
        if args.json:
            return 1, json.dumps({"found": False, "bound": args.bound}, sort_keys=True, indent=2)
        return 1, f"{NO_CEX} (bound {args.bound})"
    a = program.assertion(cex.assertion)
    if args.json:
        obj = {
            "found": True,
            "bound": args.bound,
            "test": cex.test.to_json(),
            "assertion": {"id": a.id, "line": a.line, "kind": a.kind},
        }
        return 0, json.dumps(obj, sort_keys=True, indent=2)
    return 0, f"counterexample: {cex.test.format() or '(no inputs)'}\nviolated: {a.describe()}"


def _granularity(args):
    return ITERATION if args.iter_granularity else STATEMENT


def cmd_localize(args, program):
    test = _failing_test(program, args)
    report = localize(
        program, None, test, _granularity(args), args.alpha, max_iterations=args.max_iters, seed=args.seed
    )
    if args.json:
        return 0, report.to_json(timings=args.timings)
    return 0, _localization_text(program, report)


def cmd_rank(args, program):
    tests = _tests(args)
    try:
        report = rank(
            program,
            tests=tests or None,
            count=args.count,
            seed=args.seed,
            granularity=_granularity(args),
            alpha=args.alpha,
            max_iterations=args.max_iters,
        )
    except NoFailingTests:
        raise _Nothing("no failing test" if tests else NO_CEX) from None
    if args.json:
        return 0, report.to_json(timings=args.timings)
    return 0, _localization_text(program, report)


def cmd_repair(args, program):
    kinds = []
    if args.off_by_one or not args.operator:
        kinds.append(repair_off_by_one)
    if args.operator:
        kinds.append(repair_operator)
    tests = _tests(args) or None
    results = []
    for fn in kinds:
        try:
            results.append(fn(program, tests=tests, seed=args.seed, max_iterations=args.max_iters))
        except NotAFailingProgram:
            raise _Nothing(NO_CEX) from None
    cands = [c for r in results for c in r.candidates]
    if args.json:
        obj = {"found": bool(cands), "candidates": [c.to_dict() for c in cands], "diffs": [c.diff for c in cands]}
        out = json.dumps(obj, sort_keys=True, indent=2)
    elif cands:
        parts = []
        for c in cands:
            tag = " (primary)" if c is cands[0] else ""
            parts.append(f"line {c.line}: {c.original} -> {c.replacement}{tag}\n{c.diff}")
        out = "\n".join(parts).rstrip("\n")
    else:
        out = f"no repair found ({sum(r.tried for r in results)} mutants tried)"
    return (0 if cands else 1), out


def cmd_export_wcnf(args, program):
    test = _failing_test(program, args)
    inst = build_instance(program, None, test, None, _granularity(args), alpha=args.alpha)
    if args.iter_granularity:
        inst = assign_loop_weights(inst, args.alpha, program.bound)
    if args.output:
        export_wcnf(inst, args.output)
        return 0, None
    return 0, wcnf_text(inst).rstrip("\n")


def cmd_run(args, program):
    tests = _tests(args) or [TestInput({})]
    rows = []
    for t in tests:
        t = t.validate(program)
        r = execute(program, t)
        rows.append((t, r))
    if args.json:
        obj = [
            {"test": t.to_json(), "verdict": str(r.verdict), "state": {k: _plain(v) for k, v in r.final_state.items()}}
            for t, r in rows
        ]
        return 0, json.dumps(obj, sort_keys=True, indent=2)
    out = []
    for t, r in rows:
        state = " ".join(f"{k}={_show(v)}" for k, v in sorted(r.final_state.items()))
        out.append(f"{t.format() or '(no inputs)'}: {r.verdict}\n  {state}")
    return 0, "\n".join(out)


def _plain(v):
    return list(v) if isinstance(v, (list, tuple)) else v


def _show(v):
    return ",".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v)


COMMANDS = {
    "check": cmd_check,
    "localize": cmd_localize,
    "rank": cmd_rank,
    "repair": cmd_repair,
    "export-wcnf": cmd_export_wcnf,
    "run": cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        program = _load(args)
        code, text = COMMANDS[args.command](args, program)
    except _Nothing as e:
        code, text = 1, str(e)
    except NotAFailingTest as e:
        code, text = 1, str(e)
    except (FaultSatError, ValueError, OSError) as e:
        print(f"faultsat: error: {e}", file=sys.stderr)
        return 2
    if text is not None:
        if args.output and args.command != "export-wcnf":
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
