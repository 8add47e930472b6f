from itertools import product

import pytest

from faultsat.encoder import (
    ITERATION,
    STATEMENT,
    assign_loop_weights,
    build_instance,
    build_trace_formula,
    check_unsat,
)
from faultsat.errors import DisconnectedTrace, GranularityError, NotAFailingTest
from faultsat.executor import TestInput, execute
from faultsat.sat import Solver

from conftest import program

SMALL = "input int x;\nx = x + 1;\nx = x * 3;\n"


def _projected_models(enc, extra=()):
    """Satisfying values of the per-state copies of x (12 bits at width 4)."""
    vecs = [st.scalars["x"] for st in enc.states]
    lits = [l for v in vecs for l in v]
    assert len(lits) <= 12
    s = Solver.from_cnf(enc.circuit.cnf)
    out = set()
    for vals in product((False, True), repeat=len(lits)):
        fixed = [l if b else -l for l, b in zip(lits, vals)]
        if s.solve(fixed + list(extra)).sat:
            out.add(vals)
    return out


def test_all_selectors_true_preserves_models():
    p = program(SMALL, width=4)
    trace = execute(p, TestInput({"x": 0})).trace
    plain = build_trace_formula(p, trace)
    from faultsat.encoder import Circuit

    c = Circuit()
    lam = {tid: c.fresh(("selector", tid)) for tid in trace}
    sel = build_trace_formula(p, trace, lambda t: lam[t.id], circuit=c)
    plain_models = _projected_models(plain)
    assert len(plain_models) == 16  # one per input value
    assert _projected_models(sel, lam.values()) == plain_models

    # disabling one statement frees exactly its output
    for tid, l in lam.items():
        assert all(-l in sel.circuit.cnf.clauses[i] for i in sel.circuit.groups[l])
        others = [m for t, m in lam.items() if t != tid]
        assert len(_projected_models(sel, others + [-l])) == 16 * 16


def test_trace_must_be_connected():
    p = program(SMALL, width=4)
    trace = execute(p, TestInput({"x": 0})).trace
    with pytest.raises(DisconnectedTrace):
        build_trace_formula(p, trace[::-1])


def test_fig1_instance(fig1):
    inst = build_instance(fig1, None, TestInput({"index": 1}))
    assert sorted(s.group.line for s in inst.soft) == [1, 2, 4, 5]
    assert all(s.weight == 1 for s in inst.soft)
    assert inst.top_weight == 5
    assert check_unsat(inst)


def test_passing_test_is_rejected(fig1):
    with pytest.raises(NotAFailingTest):
        build_instance(fig1, None, TestInput({"index": 0}))


def test_trusted_statements_have_no_selector(strncat):
    inst = build_instance(strncat, None, execute_failing(strncat))
    lines = {s.group.line for s in inst.soft}
    assert lines == {5, 6}  # the declaration on line 4 is hard


def execute_failing(p):
    from faultsat.localizer import generate_counterexample

    return generate_counterexample(p).test


def test_iteration_weights(squareroot):
    inst = build_instance(squareroot, None, TestInput({}), granularity=ITERATION)
    weighted = assign_loop_weights(inst, alpha=1, bound=50)
    for s in weighted.soft:
        k = s.group.loop_context
        assert s.weight == (1 + 50 - k if k is not None else 1 + 50)
    kappas = sorted({s.group.loop_context for s in inst.soft if s.group.loop_context})
    assert kappas[0] == 1 and kappas[-1] <= 50
    with pytest.raises(GranularityError):
        assign_loop_weights(build_instance(squareroot, None, TestInput({})), 1, 50)
    with pytest.raises(ValueError):
        assign_loop_weights(inst, 0, 50)


def test_statement_granularity_shares_selectors_across_iterations(squareroot):
    inst = build_instance(squareroot, None, TestInput({}), granularity=STATEMENT)
    lines = [s.group.line for s in inst.soft]
    assert len(lines) == len(set(lines))
    with pytest.raises(GranularityError):
        build_instance(squareroot, None, TestInput({}), granularity="nope")


def test_trace_scope_is_also_unsat(fig1):
    inst = build_instance(fig1, None, TestInput({"index": 1}), scope="trace")
    assert check_unsat(inst)
    assert sorted(s.group.line for s in inst.soft) == [1, 4]  # the failing check on line 5 precedes its assignment
