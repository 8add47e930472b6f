"""Off-by-one constant repair and single-operator mutation repair.

Both repairs start from the statements reported by localization, edit one
token of the original source, re-parse and re-lower the patched text at the
same unwinding bound, and accept the edit only if bounded model checking
finds no violation and every witness test now passes.  Because the patched
text itself is what gets verified, the emitted diff is exactly the checked
program.
"""

from __future__ import annotations

import difflib
import json
from dataclasses import dataclass, field
from typing import Optional

from faultsat.errors import MiniCSyntaxError, NotAFailingProgram, NotAFailingTest
from faultsat.executor import FAIL, PASS, execute
from faultsat.frontend.ast import Assert, Assume, Binary, Block, IntLit, Unary, stmt_exprs, walk_expr, walk_stmts
from faultsat.frontend.lower import lower_to_cfg
from faultsat.frontend.parser import parse
from faultsat.localizer import DEFAULT_MAX_ITERATIONS, _at_bound, generate_counterexample, localize
from faultsat.semantics import fits

CONSTANT = "constant"
OPERATOR = "operator"

OPERATOR_FAMILIES = (
    ("<", "<=", ">", ">="),
    ("==", "!="),
    ("+", "-"),
    ("*", "/", "%"),
    ("&&", "||"),
    ("&", "|", "^"),
)
_FAMILY = {op: fam for fam in OPERATOR_FAMILIES for op in fam}


@dataclass(frozen=True)
class RepairCandidate:
    file: str
    line: int
    col: int
    kind: str  # CONSTANT or OPERATOR
    original: str
    replacement: str
    verified: bool
    rank: int = 0  # localization iteration that first reported the statement
    primary: bool = False
    diff: str = field(default="", compare=False, repr=False)
    source: str = field(default="", compare=False, repr=False)  # patched program text

    @property
    def location(self):
        return (self.file, self.line)

    def to_dict(self):
        return {
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "kind": self.kind,
            "original": self.original,
            "replacement": self.replacement,
            "verified": self.verified,
            "rank": self.rank,
            "primary": self.primary,
        }


@dataclass
class RepairResult:
    """Verified candidates in search order; empty means no repair was found."""

    candidates: list
    tried: int
    tests: list
    locations: list  # localization CoMSSes the search drew from
    meta: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return bool(self.candidates)

    @property
    def primary(self) -> Optional[RepairCandidate]:
        return self.candidates[0] if self.candidates else None

    def diff(self) -> str:
        return "".join(c.diff for c in self.candidates)

    def to_json(self) -> str:
        obj = {
            "found": self.found,
            "tried": self.tried,
            "candidates": [c.to_dict() for c in self.candidates],
            "tests": [t.to_json() for t in self.tests],
            "meta": self.meta,
        }
        return json.dumps(obj, sort_keys=True, indent=2)


@dataclass(frozen=True)
class _Edit:
    sid: int
    line: int
    phys: int
    col: int
    end: int
    kind: str
    original: str
    replacement: str


def verify_fix(program, assertion=None, bound=None, witness_tests=()) -> bool:
    """No counterexample to any assertion within the bound, and every witness test passes.

    ``assertion`` is accepted for symmetry with the other entry points; a
    mutant that trades the original failure for a new one is not a fix, so
    every assertion is checked.
    """
    program = _at_bound(program, bound)
    for t in witness_tests:
        if execute(program, t).verdict.status != PASS:
            return False
    return not generate_counterexample(program).found


def _statement_index(module, trusted):
    """sid -> statement for code that may be edited (top level and untrusted functions)."""
    roots = [module.body] + [f.body for f in module.functions if f.name not in trusted]
    out = {}
    for root in roots:
        for s in walk_stmts(root):
            if not isinstance(s, (Block, Assert, Assume)):
                out[s.sid] = s
    return out


def _parents(e, parent=None, out=None):
    out = {} if out is None else out
    out[id(e)] = parent
    for child in _children(e):
        _parents(child, e, out)
    return out


def _children(e):
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Unary):
        return (e.operand,)
    if hasattr(e, "index") and not isinstance(e, IntLit):
        return (e.index,)
    if hasattr(e, "args"):
        return tuple(e.args)
    return ()


def _token(lines, phys, col, end):
    return lines[phys - 1][col - 1 : end - 1]


def _constant_edits(stmt, lines, width):
    for e in stmt_exprs(stmt):
        parent = _parents(e)
        for x in walk_expr(e):
            if not isinstance(x, IntLit) or not x.end:
                continue
            text = _token(lines, x.pos.phys, x.pos.col, x.end)
            if text in ("true", "false") or text.startswith("'"):
                continue
            nested = isinstance(parent[id(x)], (Binary, Unary))
            for delta in (1, -1):
                v = x.value + delta
                if not fits(v, width):
                    continue  # the mutated constant must keep the declared width
                if x.macro is not None:
                    rep = f"{x.macro}{'+' if delta > 0 else '-'}1"
                    if nested:
                        rep = f"({rep})"
                else:
                    rep = str(v)
                    if v < 0 and nested:
                        rep = f"({rep})"
                yield _Edit(stmt.sid, x.pos.line, x.pos.phys, x.pos.col, x.end, CONSTANT, text, rep)


def _operator_edits(stmt, lines):
    for e in stmt_exprs(stmt):
        for x in walk_expr(e):
            if not isinstance(x, Binary) or x.op not in _FAMILY:
                continue
            end = x.pos.col + len(x.op)
            if _token(lines, x.pos.phys, x.pos.col, end) != x.op:
                continue
            for op in _FAMILY[x.op]:
                if op != x.op:
                    yield _Edit(stmt.sid, x.pos.line, x.pos.phys, x.pos.col, end, OPERATOR, x.op, op)


def _apply(lines, edit):
    out = list(lines)
    s = out[edit.phys - 1]
    out[edit.phys - 1] = s[: edit.col - 1] + edit.replacement + s[edit.end - 1 :]
    return out


def _unified(module, before, after):
    name = module.filename
    return "".join(
        difflib.unified_diff(
            [l + "\n" for l in before], [l + "\n" for l in after], fromfile=f"a/{name}", tofile=f"b/{name}"
        )
    )


def _failing_tests(program, assertion, tests, seed):
    if tests:
        out = []
        for t in tests:
            t = t.validate(program)
            r = execute(program, t)
            if r.verdict.status == FAIL and (assertion is None or r.verdict.assertion == assertion.id):
                out.append(t)
        if not out:
            raise NotAFailingTest("none of the given tests fails the target assertion")
        return out
    cex = generate_counterexample(program, assertion, seed=seed)
    if not cex.found:
        raise NotAFailingProgram("no counterexample within the unwinding bound")
    return [cex.test]


def _search(program, assertion, bound, tests, kinds, seed, max_iterations, first_only):
    program = _at_bound(program, bound)
    module = program.ast
    failing = _failing_tests(program, assertion, tests, seed)
    if assertion is None:
        assertion = program.assertion(execute(program, failing[0]).verdict.assertion)
    report = localize(program, assertion, failing[0], max_iterations=max_iterations, seed=seed)

    # candidate statements in the order localization reported them
    order = []
    for rank, comss in enumerate(report.iterations, start=1):
        for sid in comss.sids:
            if sid not in (s for s, _ in order):
                order.append((sid, rank))
    editable = _statement_index(module, set(program.trusted))
    lines = module.source.split("\n")
    edits = []
    for sid, rank in order:
        stmt = editable.get(sid)
        if stmt is None:
            continue  # trusted or not a source statement
        found = []
        if CONSTANT in kinds:
            found += list(_constant_edits(stmt, lines, program.width))
        if OPERATOR in kinds:
            found += list(_operator_edits(stmt, lines))
        found.sort(key=lambda e: (e.line, e.col))  # stable: +1 before -1, family order
        edits += [(e, rank) for e in found]

    verified, tried = [], 0
    for e, rank in edits:
        tried += 1
        patched = _apply(lines, e)
        text = "\n".join(patched)
        try:
            mutant = lower_to_cfg(parse(text, module.filename), program.bound, program.width, program.trusted)
        except MiniCSyntaxError:
            continue
        if not verify_fix(mutant, assertion, None, failing):
            continue
        verified.append(
            RepairCandidate(
                module.filename,
                e.line,
                e.col,
                e.kind,
                e.original,
                e.replacement,
                True,
                rank,
                primary=not verified,
                diff=_unified(module, lines, patched),
                source=text,
            )
        )
        if first_only:
            break
    meta = {
        "bound": program.bound,
        "width": program.width,
        "seed": seed,
        "file": module.filename,
        "assertion": {"id": assertion.id, "line": assertion.line, "kind": assertion.kind},
        "kinds": sorted(kinds),
    }
    return RepairResult(verified, tried, failing, report.iterations, meta)


def repair_off_by_one(
    program, assertion=None, bound=None, tests=None, seed=0, max_iterations=DEFAULT_MAX_ITERATIONS, first_only=False
) -> RepairResult:
    """Try ``k+1`` and ``k-1`` for every integer constant on a localized statement.

    Without ``tests`` a failing input is generated by bounded model checking.
    All verified candidates are returned in search order with the first
    marked primary; ``first_only`` stops at the first one.
    """
    return _search(program, assertion, bound, tests, {CONSTANT}, seed, max_iterations, first_only)


def repair_operator(
    program, assertion=None, bound=None, tests=None, seed=0, max_iterations=DEFAULT_MAX_ITERATIONS, first_only=False
) -> RepairResult:
    """Try every same-family replacement of each operator on a localized statement."""
    return _search(program, assertion, bound, tests, {OPERATOR}, seed, max_iterations, first_only)
