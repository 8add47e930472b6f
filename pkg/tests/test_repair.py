import time

import pytest

from faultsat.errors import NotAFailingProgram, NotAFailingTest
from faultsat.executor import FAIL, PASS, TestInput, execute
from faultsat.frontend.lower import lower_to_cfg
from faultsat.frontend.parser import parse
from faultsat.repair import CONSTANT, OPERATOR, repair_off_by_one, repair_operator, verify_fix

from conftest import WORKED, STRNCAT_TRUSTED, program


def _patch(path, old, new):
    text = path.read_text()
    assert text.count(old) == 1
    return text.replace(old, new)


def _strncat_variant(text):
    return lower_to_cfg(parse(text, "strncat.mc"), 16, 8, STRNCAT_TRUSTED)


def _all_inputs_pass(src, bound=4):
    p = lower_to_cfg(parse(src, "t.mc"), bound, 8, ())
    name = p.inputs[0].name
    return all(execute(p, TestInput({name: v})).verdict.status == PASS for v in range(-128, 128))


@pytest.fixture(scope="module")
def strncat_repair(strncat):
    t0 = time.perf_counter()
    res = repair_off_by_one(strncat)
    return res, time.perf_counter() - t0


def test_strncat_size_minus_one(strncat_repair):
    res, elapsed = strncat_repair
    assert elapsed < 5
    assert res.found
    p = res.primary
    assert (p.line, p.original, p.replacement, p.kind, p.verified, p.primary) == (6, "SIZE", "SIZE-1", CONSTANT, True, True)
    assert "-strncat(buf, s, SIZE);" in p.diff and "+strncat(buf, s, SIZE-1);" in p.diff


def test_candidates_never_touch_trusted_code(strncat_repair):
    # #line renumbers the top level, so compare physical lines of the patched text
    res, _ = strncat_repair
    before = (WORKED / "strncat.mc").read_text().split("\n")
    top = before.index("#line 4")
    for c in res.candidates:
        after = c.source.split("\n")
        changed = [i for i, (x, y) in enumerate(zip(before, after)) if x != y]
        assert len(changed) == 1 and changed[0] > top


def test_verify_fix_on_strncat_variants(strncat):
    path = WORKED / "strncat.mc"
    good = _strncat_variant(_patch(path, "strncat(buf, s, SIZE);", "strncat(buf, s, SIZE-1);"))
    bad = _strncat_variant(_patch(path, "strncat(buf, s, SIZE);", "strncat(buf, s, SIZE+1);"))
    assert verify_fix(good)
    assert not verify_fix(bad)
    assert not verify_fix(strncat)


def test_verified_candidates_replay_on_every_input(fig1):
    res = repair_off_by_one(fig1)
    assert res.found
    for c in res.candidates:
        assert _all_inputs_pass(c.source, bound=2), c
    # the constant in "index + 2" lowered by one is among them
    assert any(c.line == 4 and c.replacement == "1" for c in res.candidates)


def test_operator_repair_restores_strict_comparison():
    src = "input int x;\nint y = 0;\nif (x <= 5)\n    y = 1;\nassert(y == (x < 5));\n"
    res = repair_operator(program(src))
    assert [(c.line, c.original, c.replacement, c.kind) for c in res.candidates] == [(3, "<=", "<", OPERATOR)]
    assert _all_inputs_pass(res.primary.source)


def test_operator_repair_plus_to_minus():
    src = "input int x;\nassume(x > -100 && x < 100);\nint y = x + 1;\nassert(y + 1 == x);\n"
    res = repair_operator(program(src))
    assert res.primary.line == 3 and (res.primary.original, res.primary.replacement) == ("+", "-")


def test_no_constant_means_no_repair():
    res = repair_off_by_one(program("input int x;\nint y = x;\nassert(y != 3);\n"))
    assert not res.found and res.primary is None and res.tried == 0
    assert repair_operator(program("input int x;\nint y = x;\nassert(y != 3);\n")).candidates == []


def test_overflowing_constant_is_not_tried():
    res = repair_off_by_one(program("int c = 127;\nassert(c < 127);\n"))
    assert [c.replacement for c in res.candidates] == ["126"]
    assert res.tried == 1  # 128 does not fit in 8 bits


def test_errors():
    with pytest.raises(NotAFailingProgram):
        repair_off_by_one(program("input int x;\nassert(x == x);\n"))
    with pytest.raises(NotAFailingTest):
        repair_off_by_one(program("input int x;\nassert(x != 3);\n"), tests=[TestInput({"x": 1})])


def test_given_tests_are_witnesses():
    src = "input int x;\nint y = x + 2;\nassert(y != 5);\n"
    res = repair_off_by_one(program(src), tests=[TestInput({"x": 3})])
    assert res.tests == [TestInput({"x": 3})]
    for c in res.candidates:
        p = lower_to_cfg(parse(c.source, "t.mc"), 4, 8, ())
        assert execute(p, TestInput({"x": 3})).verdict.status == PASS


def test_result_json_is_stable(fig1):
    assert repair_off_by_one(fig1).to_json() == repair_off_by_one(fig1).to_json()
