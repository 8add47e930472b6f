import json
from itertools import product

import pytest

from faultsat.encoder import encode_program
from faultsat.errors import InvalidTestInput
from faultsat.executor import ASSUME_VIOLATED, BOUND_EXCEEDED, FAIL, PASS, TestInput, execute, load_tests
from faultsat.sat import Solver
from faultsat.semantics import wrap

from conftest import program


def test_fig1_failing_and_passing(fig1):
    r = execute(fig1, TestInput({"index": 1}))
    assert r.verdict.status == FAIL and r.verdict.line == 5
    assert r.final_state["index"] == 3
    assert execute(fig1, TestInput({"index": 0})).verdict.status == PASS


def test_squareroot_fails_with_val_50(squareroot):
    r = execute(squareroot, TestInput({}))
    assert r.verdict.status == FAIL
    assert r.final_state["res"] == 8  # one past the true root 7


def test_bound_and_assume_verdicts():
    p = program("input int x; while (x < 10) x = x + 1;", bound=3)
    assert execute(p, TestInput({"x": 0})).verdict.status == BOUND_EXCEEDED
    assert execute(p, TestInput({"x": 8})).verdict.status == PASS
    q = program("input int x; assume(x > 0); assert(x != 5);")
    assert execute(q, TestInput({"x": -1})).verdict.status == ASSUME_VIOLATED
    assert execute(q, TestInput({"x": 5})).verdict.status == FAIL


def test_arrays_and_implicit_bounds_check():
    p = program("input int a[3]; input int i; int s = a[0] + a[2]; a[i] = 9;")
    r = execute(p, TestInput({"a": (1, 2, 3), "i": 1}))
    assert r.verdict.status == PASS
    assert r.final_state["s"] == 4 and r.final_state["a"] == (1, 9, 3)
    r = execute(p, TestInput({"a": (1,), "i": 3}))
    assert r.verdict.status == FAIL  # padded with zeros, then the store is out of range


def test_test_input_validation():
    p = program("input int x; input int a[2];")
    with pytest.raises(InvalidTestInput):
        TestInput({"x": 1}).validate(p)
    with pytest.raises(InvalidTestInput):
        TestInput({"x": 1, "a": (1, 2), "y": 0}).validate(p)
    with pytest.raises(InvalidTestInput):
        TestInput({"x": 300, "a": ()}).validate(p)
    with pytest.raises(InvalidTestInput):
        TestInput({"x": 1, "a": (1, 2, 3)}).validate(p)
    assert TestInput({"x": 1, "a": (5,)}).validate(p).assignments["a"] == (5, 0)


def test_parse_and_json(tmp_path):
    t = TestInput.parse("x=-3 a=1,0x10")
    assert t.assignments == {"x": -3, "a": (1, 16)}
    assert t.format() == "a=1,16 x=-3"
    f = tmp_path / "t.json"
    f.write_text(json.dumps([t.to_json(), {"x": 2, "a": [0]}]))
    assert load_tests(f)[0] == t
    for bad in ("x", "=3", "x=1 x=2", "x=abc"):
        with pytest.raises(InvalidTestInput):
            TestInput.parse(bad)


AGREE = [
    "input int x; input int y; int z = 0; if (x < y) z = y - x; else z = x * y; z = z ^ (x >> 1);",
    "input int x; int n = 0; while (x > 0) { x = x - 3; n = n + 1; }",
    "input int x; int a[4]; a[x & 3] = x; int s = a[0] + a[1] + a[2] + a[3];",
    "int f(int a) { int r = a; if (a < 0) r = -a; return r; } input int x; int y = f(x); y = y % 3;",
]


@pytest.mark.parametrize("src", AGREE)
def test_whole_program_encoding_agrees_with_interpreter(src):
    p = program(src, bound=6, width=4)
    enc = encode_program(p)
    c = enc.circuit
    s = Solver.from_cnf(c.cnf)
    names = [v.name for v in p.inputs]
    for vals in product(range(-8, 8), repeat=len(names)):
        test = TestInput(dict(zip(names, vals)))
        run = execute(p, test)
        if run.verdict.status != PASS:
            continue
        assume = []
        for n, v in zip(names, vals):
            assume += [l if (v >> i) & 1 else -l for i, l in enumerate(enc.inputs[n])]
        res = s.solve(assume + [enc.reach[p.final_location]])
        assert res.sat
        for name, bits in enc.final_state.scalars.items():
            got = wrap(sum(1 << i for i, l in enumerate(bits) if res.value(l)), 4)
            assert got == run.final_state[name], (test, name)
