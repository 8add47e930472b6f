"""Partial weighted MAX-SAT instances for fault localization."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from faultsat.cnf import Cnf
from faultsat.encoder.circuit import Circuit
from faultsat.encoder.encode import ExprEncoder, build_trace_formula, encode_program, test_clauses
from faultsat.errors import GranularityError, NotAFailingTest
from faultsat.executor import FAIL, execute
from faultsat.sat import solve

STATEMENT = "statement"
ITERATION = "iteration"


@dataclass(frozen=True)
class ClauseGroup:
    selector: int
    statement_id: int
    line: int
    file: str
    loop_context: Optional[int] = None  # kappa, iteration granularity only
    member_clauses: tuple = ()

    def location(self):
        loc = {"file": self.file, "line": self.line}
        if self.loop_context is not None:
            loc["iter"] = self.loop_context
        return loc


@dataclass(frozen=True)
class SoftUnit:
    lit: int
    weight: int
    group: ClauseGroup


@dataclass
class MaxSatInstance:
    """All clauses of ``cnf`` are hard; ``soft`` holds weighted unit clauses.

    Each soft unit is the positive selector of its clause group, so
    falsifying it disables the group's clauses.
    """

    cnf: Cnf
    soft: list
    granularity: str = STATEMENT
    bound: Optional[int] = None
    meta: dict = field(default_factory=dict)

    @property
    def hard(self):
        return range(len(self.cnf.clauses))

    @property
    def top_weight(self) -> int:
        return 1 + sum(s.weight for s in self.soft)

    @property
    def groups(self):
        return {s.lit: s.group for s in self.soft}

    def copy(self) -> "MaxSatInstance":
        return MaxSatInstance(self.cnf.copy(), list(self.soft), self.granularity, self.bound, dict(self.meta))

    def add_hard(self, clause) -> int:
        return self.cnf.add_clause(clause)


def _group_key(t, granularity):
    return (t.sid, t.kappa) if granularity == ITERATION else (t.sid, None)


def build_instance(program, trace, test, assertion=None, granularity=STATEMENT, scope="program", alpha=1, trusted=None):
    """Build hard and soft clauses for a failing test.

    With ``scope="program"`` (the default) the whole unrolled program is
    encoded, so a disabled branch condition may send the failing input down
    the other branch.  With ``scope="trace"`` only the executed path is
    encoded.  Hard clauses: the test's input values, every assertion on any
    reached location, assumptions, trusted code and gate definitions.
    """
    if granularity not in (STATEMENT, ITERATION):
        raise GranularityError(f"unknown granularity {granularity!r}")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    test = test.validate(program)
    result = execute(program, test)
    if result.verdict.status != FAIL or (assertion is not None and result.verdict.assertion != assertion.id):
        raise NotAFailingTest(f"test {test.format()} does not fail the target assertion ({result.verdict})")
    if assertion is None:
        assertion = program.assertion(result.verdict.assertion)
    if trace is None:
        trace = result.trace

    c = Circuit()
    selectors = {}
    info = {}

    def selector_for(t):
        if trusted is not None and t.func in trusted:
            return None
        key = _group_key(t, granularity)
        lam = selectors.get(key)
        if lam is None:
            lam = c.fresh(("selector",) + key)
            selectors[key] = lam
            info[lam] = (t.sid, t.line, key[1])
        return lam

    if scope == "program":
        enc = encode_program(program, selector_for, assumptions_global=True, circuit=c)
        for a in program.assertions:
            c.add([-enc.assert_reach[a.id], enc.assert_holds[a.id]])
        inputs = enc.inputs
    elif scope == "trace":
        tenc = build_trace_formula(program, trace, selector_for, circuit=c)
        final = tenc.states[-1]
        c.add([ExprEncoder(c, program.width).cond(assertion.predicate, final)])
        inputs = tenc.inputs
    else:
        raise ValueError(f"unknown scope {scope!r}")
    test_clauses(c, program, inputs, test)

    # recency: position of the group's last step on the failing path (-1 if absent)
    last_step = {}
    for pos, tid in enumerate(result.trace):
        t = program.transitions[tid]
        if not t.hard:
            lam = selectors.get(_group_key(t, granularity))
            if lam is not None:
                last_step[lam] = pos
    soft = []
    for lam in sorted(info):
        sid, line, kappa = info[lam]
        group = ClauseGroup(lam, sid, line, program.filename, kappa, tuple(c.groups.get(lam, ())))
        soft.append(SoftUnit(lam, alpha, group))
    inst = MaxSatInstance(
        c.cnf,
        soft,
        granularity,
        program.bound,
        {
            "inputs": inputs,
            "assertion": assertion.id,
            "test": test,
            "scope": scope,
            "alpha": alpha,
            "recency": {lam: last_step.get(lam, -1) for lam in info},
        },
    )
    return inst


def check_unsat(instance: MaxSatInstance) -> bool:
    """True iff hard clauses plus all soft units are unsatisfiable."""
    res = solve(instance.cnf, [s.lit for s in instance.soft])
    return res.unsat


def assign_loop_weights(instance: MaxSatInstance, alpha: int = 1, bound: Optional[int] = None) -> MaxSatInstance:
    """Weight iteration ``kappa`` selectors ``alpha + bound - kappa``; others ``alpha + bound``."""
    if instance.granularity != ITERATION:
        raise GranularityError("loop weights need an iteration-granularity instance")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    eta = bound if bound is not None else instance.bound
    soft = []
    for s in instance.soft:
        k = s.group.loop_context
        if k is not None and not 1 <= k <= eta:
            raise GranularityError(f"iteration index {k} outside 1..{eta}")
        w = alpha + eta - k if k is not None else alpha + eta
        soft.append(replace(s, weight=w))
    out = instance.copy()
    out.soft = soft
    out.meta["alpha"] = alpha
    return out
