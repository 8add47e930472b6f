import time

import pytest

from faultsat.encoder import ITERATION, build_instance
from faultsat.errors import NoFailingTests, NotAFailingTest
from faultsat.executor import FAIL, TestInput, execute
from faultsat.localizer import generate_counterexample, localize, rank
from faultsat.maxsat import is_correction_set

from conftest import program

# 2*a+2 is even and 2*x+1 odd, so only line 3 can repair odd inputs;
# for even x, d = x/2 also satisfies the assertion
UNIQUE = """input int x;
int a = x;
int b = 2 * a + 2;
int d = 0;
assert(b == 2 * x + 1 || 2 * d == x);
"""


def test_fig1_counterexample_is_index_1(fig1):
    failing = [v for v in range(-128, 128) if execute(fig1, TestInput({"index": v})).verdict.status == FAIL]
    assert failing == [1]
    for bound in (1, 2):
        cex = generate_counterexample(fig1, bound=bound)
        assert cex.found and cex.test == TestInput({"index": 1})


def test_valid_program_has_no_counterexample():
    assert not generate_counterexample(program("input int x; assert(x == x);")).found


def test_squareroot_counterexample(squareroot):
    cex = generate_counterexample(squareroot)
    assert cex.found and cex.test == TestInput({})
    body = [squareroot.transitions[t] for t in cex.trace if squareroot.transitions[t].kind == "assign"]
    assert max(t.kappa or 0 for t in body) == 7  # seven executed body iterations


def test_blocked_inputs_give_new_counterexamples():
    p = program(UNIQUE)
    seen = []
    for seed in range(4):
        cex = generate_counterexample(p, seed=seed, blocked=seen)
        assert cex.found and cex.test not in seen
        assert execute(p, cex.test).verdict.status == FAIL
        seen.append(cex.test)


def test_fig1_localization(fig1):
    t0 = time.perf_counter()
    report = localize(fig1, None, TestInput({"index": 1}))
    assert time.perf_counter() - t0 < 1.0
    assert [c.lines() for c in report.iterations] == [[4], [1]]
    assert report.exhausted


def test_iteration_cap(fig1):
    report = localize(fig1, None, TestInput({"index": 1}), max_iterations=1)
    assert len(report.iterations) == 1 and not report.exhausted
    with pytest.raises(ValueError):
        localize(fig1, None, TestInput({"index": 1}), max_iterations=0)


def test_passing_test_rejected(fig1):
    with pytest.raises(NotAFailingTest):
        localize(fig1, None, TestInput({"index": 0}))


def test_squareroot_statement_mode(squareroot):
    report = localize(squareroot, None, TestInput({}))
    lines = {l for c in report.iterations for l in c.lines()}
    assert {9, 10, 12} <= lines
    sets = [c.selectors for c in report.iterations]
    assert len(sets) == len(set(sets))


def test_squareroot_iteration_mode(squareroot):
    report = localize(squareroot, None, TestInput({}), granularity=ITERATION, max_iterations=1)
    first = report.iterations[0]
    assert len(first) == 1
    (loc,) = first.statements
    assert loc["line"] in (9, 10) and loc["iter"] in (7, 8)


def test_every_comss_is_a_minimal_correction(fig1):
    inst = build_instance(fig1, None, TestInput({"index": 1}))
    report = localize(fig1, None, TestInput({"index": 1}))
    for c in report.iterations:
        assert is_correction_set(inst, c.selectors)
        for lam in c.selectors:
            assert not is_correction_set(inst, c.selectors - {lam})


def test_rank_unique_fault_line():
    p = program(UNIQUE)
    report = rank(p, tests=[TestInput({"x": v}) for v in (1, 3, 5, 7, 8)])
    assert report.ranking[0] == (("t.mc", 3), 5)
    assert all(n < 5 for _, n in report.ranking[1:])
    generated = rank(p, count=5)
    assert len(generated.per_test_runs) == 5
    assert generated.ranking[0] == (("t.mc", 3), 5)


def test_rank_fig1(fig1):
    report = rank(fig1, count=3)
    assert len(report.per_test_runs) == 1  # index=1 is the only failing input
    assert [(ln, n) for (_, ln), n in report.ranking] == [(1, 1), (4, 1)]


def test_rank_without_failing_tests(fig1):
    with pytest.raises(NoFailingTests):
        rank(fig1, tests=[TestInput({"index": 0})])
    with pytest.raises(NoFailingTests):
        rank(program("input int x; assert(x == x);"), count=2)


def test_json_is_deterministic(fig1):
    a = localize(fig1, None, TestInput({"index": 1})).to_json()
    b = localize(fig1, None, TestInput({"index": 1})).to_json()
    assert a == b and "times_ms" not in a
    assert "times_ms" in localize(fig1, None, TestInput({"index": 1})).to_json(timings=True)
