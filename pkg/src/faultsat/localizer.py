"""Counterexample generation, CoMSS enumeration and multi-test ranking."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

from faultsat.encoder import ITERATION, STATEMENT, assign_loop_weights, build_instance, encode_program
from faultsat.errors import HardUnsat, NoFailingTests, NotAFailingTest, SolverTimeout
from faultsat.executor import FAIL, ExecutionResult, TestInput, execute
from faultsat.frontend.lower import lower_to_cfg
from faultsat.maxsat.wpm1 import Comss, _make_solver, solve_pmaxsat
from faultsat.semantics import wrap

DEFAULT_MAX_ITERATIONS = 32


@dataclass(frozen=True)
class CounterexampleResult:
    found: bool
    test: Optional[TestInput] = None
    trace: tuple = ()
    execution: Optional[ExecutionResult] = None

    @property
    def assertion(self):
        return self.execution.verdict.assertion if self.execution else None


def _at_bound(program, bound):
    if bound is None or bound == program.bound:
        return program
    return lower_to_cfg(program.ast, bound, program.width, program.trusted)


def _decode(model, bits, width):
    v = sum(1 << i for i, lit in enumerate(bits) if model[abs(lit)] == (lit > 0))
    return wrap(v, width)


def _test_literals(bits, test):
    """Literals that are all true exactly when the inputs equal ``test``."""
    out = []
    for name, value in test.assignments.items():
        vecs = [bits[name]] if not isinstance(value, tuple) else bits[name]
        vals = [value] if not isinstance(value, tuple) else value
        for vec, val in zip(vecs, vals):
            out += [lit if (val >> i) & 1 else -lit for i, lit in enumerate(vec)]
    return out


def generate_counterexample(program, assertion=None, bound=None, seed=0, blocked=(), max_conflicts=-1):
    """Bounded model checking for a violation of ``assertion`` (any assertion if None).

    Inputs are left free; ``blocked`` tests are excluded.  A found test is
    replayed in the interpreter before it is returned.
    """
    from faultsat.sat import Solver

    program = _at_bound(program, bound)
    if not program.assertions:
        return CounterexampleResult(False)
    enc = encode_program(program)
    c = enc.circuit
    targets = program.assertions if assertion is None else [program.assertion(assertion.id)]
    viol = [enc.violation(a.id) for a in targets]
    c.add(viol)
    for t in blocked:
        lits = _test_literals(enc.inputs, t.validate(program))
        if lits:
            c.add([-l for l in lits])
    solver = Solver.from_cnf(c.cnf, seed=seed)
    res = solver.solve(max_conflicts=max_conflicts)
    if res.status == "timeout":
        raise SolverTimeout("bounded model check ran out of conflicts")
    if not res.sat:
        return CounterexampleResult(False)
    values = {}
    for v in program.inputs:
        bits = enc.inputs[v.name]
        if v.length is None:
            values[v.name] = _decode(res.model, bits, program.width)
        else:
            values[v.name] = tuple(_decode(res.model, b, program.width) for b in bits)
    test = TestInput(values)
    run = execute(program, test)
    wanted = {a.id for a in targets}
    if run.verdict.status != FAIL or run.verdict.assertion not in wanted:
        raise AssertionError(f"internal error: counterexample {test.format()} replays as {run.verdict}")
    return CounterexampleResult(True, test, run.trace, run)


@dataclass
class Run:
    test: TestInput
    assertion: int
    iterations: list
    exhausted: bool
    costs: list = field(default_factory=list)


@dataclass
class LocalizationReport:
    iterations: list  # Comss in discovery order (first run)
    exhausted: bool
    ranking: list  # [((file, line), count)]
    per_test_runs: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def locations(self):
        return [c.statements for c in self.iterations]

    def to_json(self, timings=False) -> str:
        meta = dict(self.meta)
        if not timings:
            meta.pop("times_ms", None)
        obj = {
            "iterations": [[dict(loc) for loc in c.statements] for c in self.iterations],
            "exhausted": self.exhausted,
            "ranking": [{"file": f, "line": ln, "count": n} for (f, ln), n in self.ranking],
            "meta": meta,
        }
        if len(self.per_test_runs) > 1:
            obj["per_test_runs"] = [
                {
                    "test": r.test.to_json(),
                    "assertion": r.assertion,
                    "iterations": [[dict(loc) for loc in c.statements] for c in r.iterations],
                    "exhausted": r.exhausted,
                }
                for r in self.per_test_runs
            ]
        return json.dumps(obj, sort_keys=True, indent=2)


def _ranking(runs):
    counts = {}
    for r in runs:
        seen = {(loc["file"], loc["line"]) for c in r.iterations for loc in c.statements}
        for key in seen:
            counts[key] = counts.get(key, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0][1], kv[0][0]))


def _localize_run(program, assertion, test, granularity, alpha, max_iterations, scope, seed):
    inst = build_instance(program, None, test, assertion, granularity, scope=scope, alpha=alpha)
    if granularity == ITERATION:
        inst = assign_loop_weights(inst, alpha, program.bound)
    solver = _make_solver(inst, seed)
    if not solver.solve([s.lit for s in inst.soft]).unsat:
        raise NotAFailingTest("hard and soft clauses are jointly satisfiable")
    found, costs = [], []
    exhausted = False
    while len(found) < max_iterations:
        try:
            res = solve_pmaxsat(inst, seed=seed, solver=solver)
        except HardUnsat:
            exhausted = True
            break
        if not res.comss.selectors:
            exhausted = True
            break
        found.append(res.comss)
        costs.append(res.cost)
        block = sorted(res.comss.selectors)
        inst.add_hard(block)
        solver.add_clause(block)
    return Run(test, inst.meta["assertion"], found, exhausted, costs)


def localize(
    program,
    assertion,
    test,
    granularity=STATEMENT,
    alpha=1,
    bound=None,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    scope="program",
    seed=0,
) -> LocalizationReport:
    """Enumerate CoMSSes for one failing test until exhaustion or the iteration cap."""
    program = _at_bound(program, bound)
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    t0 = time.perf_counter()
    run = _localize_run(program, assertion, test, granularity, alpha, max_iterations, scope, seed)
    elapsed = round((time.perf_counter() - t0) * 1000, 3)
    return LocalizationReport(
        iterations=run.iterations,
        exhausted=run.exhausted,
        ranking=_ranking([run]),
        per_test_runs=[run],
        meta=_meta(program, granularity, alpha, seed, [run], {"localize": elapsed}),
    )


def _meta(program, granularity, alpha, seed, runs, times):
    a = program.assertion(runs[0].assertion)
    return {
        "seed": seed,
        "bound": program.bound,
        "granularity": granularity,
        "alpha": alpha,
        "width": program.width,
        "file": program.filename,
        "assertion": {"id": a.id, "line": a.line, "kind": a.kind},
        "tests": [r.test.to_json() for r in runs],
        "costs": runs[0].costs,
        "times_ms": times,
    }


def rank(
    program,
    assertion=None,
    tests=None,
    count=None,
    seed=0,
    granularity=STATEMENT,
    alpha=1,
    bound=None,
    max_iterations=DEFAULT_MAX_ITERATIONS,
    scope="program",
) -> LocalizationReport:
    """Localize several failing tests and rank locations by how many runs report them.

    Tests are either given directly (passing ones are skipped) or, with
    ``count``, generated by bounded model checking under seeds ``seed``,
    ``seed + 1``, ... with earlier inputs blocked.
    """
    program = _at_bound(program, bound)
    t0 = time.perf_counter()
    failing = []
    if tests is not None:
        for t in tests:
            r = execute(program, t)
            if r.verdict.status == FAIL and (assertion is None or r.verdict.assertion == assertion.id):
                failing.append(t)
    else:
        n = count if count is not None else 5
        for k in range(n):
            cex = generate_counterexample(program, assertion, seed=seed + k, blocked=failing)
            if not cex.found:
                break
            failing.append(cex.test)
    if not failing:
        raise NoFailingTests("no failing test for the target assertion")
    t1 = time.perf_counter()
    runs = [_localize_run(program, assertion, t, granularity, alpha, max_iterations, scope, seed) for t in failing]
    t2 = time.perf_counter()
    times = {"tests": round((t1 - t0) * 1000, 3), "localize": round((t2 - t1) * 1000, 3)}
    return LocalizationReport(
        iterations=runs[0].iterations,
        exhausted=runs[0].exhausted,
        ranking=_ranking(runs),
        per_test_runs=runs,
        meta=_meta(program, granularity, alpha, seed, runs, times),
    )
