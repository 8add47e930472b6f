import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faultsat.errors import CallCycleError, MiniCSyntaxError, UndeclaredVariableError, UnrollBoundError
from faultsat.frontend.ast import Assert, Binary, IntLit, Unary, Var
from faultsat.frontend.lower import lower_to_cfg
from faultsat.frontend.parser import parse, tokenize
from faultsat.frontend.printer import format_expr, format_module
from faultsat.program import ASSIGN, GUARD, UNWIND
from faultsat.semantics import BINARY_OPS

from conftest import WORKED, program


@pytest.mark.parametrize(
    "src, exc",
    [
        ("int x; y = 1;", UndeclaredVariableError),
        ("int f(int a) { int r = g(a); return r; } int g(int a) { int r = f(a); return r; } int z = f(1);", CallCycleError),
        ("int f(int a) { return a; } int z = f(1, 2);", MiniCSyntaxError),
        ("int f(int a) { return a; } int z = f(1) + 1;", MiniCSyntaxError),
        ("int x; int x;", MiniCSyntaxError),
        ("void f() { input int a; }", MiniCSyntaxError),
        ("#include <x>\nint x;", MiniCSyntaxError),
        ("int x = ;", MiniCSyntaxError),
        ("void x;", MiniCSyntaxError),
    ],
)
def test_rejects(src, exc):
    with pytest.raises(exc):
        parse(src)


def test_line_directive_and_define():
    toks, defines = tokenize("#define N 7\nint a;\n#line 40\nint b = N;\n")
    assert defines == {"N": 7}
    lines = {t.text: t.pos.line for t in toks if t.kind == "ident"}
    assert lines["a"] == 2 and lines["b"] == 40
    lit = parse("#define N 7\nint b = N;").body.stmts[0].init
    assert lit == IntLit(7, "N")


def test_negative_literal_is_one_token():
    e = parse("int x = -5 * 2;").body.stmts[0].init
    assert e == Binary("*", IntLit(-5), IntLit(2))
    assert parse("int x = -(5);").body.stmts[0].init == Unary("-", IntLit(5))


def test_module_round_trip():
    src = (WORKED / "squareroot.mc").read_text()
    mod = parse(src)
    assert parse(format_module(mod)) == mod


NAMES = ("a", "b", "c")
_leaf = st.one_of(st.integers(-128, 127).map(IntLit), st.sampled_from(NAMES).map(Var))


def _grow(children):
    return st.one_of(
        st.builds(Unary, st.sampled_from(["-", "!", "~"]), children),
        st.builds(Binary, st.sampled_from(BINARY_OPS), children, children),
    )


exprs = st.recursive(_leaf, _grow, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_expression_round_trip(e):
    src = f"int a; int b; int c;\nassert({format_expr(e)});\n"
    stmt = parse(src).body.stmts[-1]
    assert isinstance(stmt, Assert)
    assert stmt.cond == e


def test_unroll_bound_must_be_positive():
    with pytest.raises(UnrollBoundError):
        program("int x;", bound=0)


def test_width_and_trusted_are_checked():
    with pytest.raises(ValueError):
        program("int x;", width=7)
    with pytest.raises(ValueError):
        program("int x;", trusted=("nope",))


def test_while_unrolls_bound_copies_then_unwind():
    p = program("input int x; while (x < 3) x = x + 1;", bound=3)
    kinds = [t.kind for t in p.transitions]
    assert kinds.count(UNWIND) == 1
    assigns = [t for t in p.transitions if t.kind == ASSIGN]
    assert [t.kappa for t in assigns] == [1, 2, 3]
    assert sum(k == GUARD for k in kinds) == 6


def test_inlining_renames_locals_per_call():
    src = "int f(int a) { int r = a + 1; return r; } int x = f(1); int y = f(2);"
    p = program(src)
    names = {v.name for v in p.vars}
    assert {"f.a#1", "f.a#2", "f.r#1", "f.r#2"} <= names


def test_implicit_checks():
    p = program("input int i; int a[3]; int q = 10 / i; a[i] = 1;")
    kinds = sorted(a.kind for a in p.assertions)
    assert kinds == ["array-bounds", "array-bounds", "division-guard"]


def test_trusted_functions_are_marked():
    src = "void f(int d[]) { d[0] = 1; } int a[2]; f(a); a[1] = 2;"
    p = program(src, trusted=("f",))
    store = [t for t in p.transitions if t.kind == "store"]
    assert [t.trusted for t in store] == [True, False]
    assert all(t.hard for t in store if t.trusted)
