"""Reference two's-complement arithmetic shared by the interpreter and the tests.

Every operator is total.  Division truncates toward zero; ``x / 0`` is -1
for non-negative ``x`` and 1 otherwise, ``x % 0`` is ``x``.  Shifts by a
negative amount or by ``width`` or more give 0 for ``<<`` and the sign fill
for ``>>``.  Comparisons are signed and yield 0 or 1.
"""

from __future__ import annotations

from faultsat.errors import UnsupportedOperator
from faultsat.frontend.ast import Binary, Index, IntLit, Unary, Var

BINARY_OPS = ("+", "-", "*", "/", "%", "<<", ">>", "&", "|", "^", "<", "<=", ">", ">=", "==", "!=", "&&", "||")
UNARY_OPS = ("-", "!", "~")


def wrap(v: int, width: int) -> int:
    """Reduce ``v`` to a signed ``width``-bit value."""
    mask = (1 << width) - 1
    v &= mask
    return v - (1 << width) if v >> (width - 1) else v


def fits(v: int, width: int) -> bool:
    return -(1 << (width - 1)) <= v < (1 << (width - 1))


def _tdiv(a, b):
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def binop(op: str, a: int, b: int, width: int) -> int:
    if op == "+":
        return wrap(a + b, width)
    if op == "-":
        return wrap(a - b, width)
    if op == "*":
        return wrap(a * b, width)
    if op == "/":
        if b == 0:
            return -1 if a >= 0 else 1
        return wrap(_tdiv(a, b), width)
    if op == "%":
        if b == 0:
            return a
        return wrap(a - _tdiv(a, b) * b, width)
    if op == "<<":
        if b < 0 or b >= width:
            return 0
        return wrap(a << b, width)
    if op == ">>":
        if b < 0 or b >= width:
            return -1 if a < 0 else 0
        return a >> b
    if op == "&":
        return wrap(a & b, width)
    if op == "|":
        return wrap(a | b, width)
    if op == "^":
        return wrap(a ^ b, width)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "&&":
        return int(a != 0 and b != 0)
    if op == "||":
        return int(a != 0 or b != 0)
    raise UnsupportedOperator(op)


def unop(op: str, a: int, width: int) -> int:
    if op == "-":
        return wrap(-a, width)
    if op == "!":
        return int(a == 0)
    if op == "~":
        return wrap(~a, width)
    raise UnsupportedOperator(op)


def evaluate(e, scalars: dict, arrays: dict, width: int) -> int:
    """Evaluate a renamed expression; out-of-range reads yield 0."""
    if isinstance(e, IntLit):
        return wrap(e.value, width)
    if isinstance(e, Var):
        return scalars[e.name]
    if isinstance(e, Index):
        i = evaluate(e.index, scalars, arrays, width)
        cells = arrays[e.array]
        return cells[i] if 0 <= i < len(cells) else 0
    if isinstance(e, Unary):
        return unop(e.op, evaluate(e.operand, scalars, arrays, width), width)
    if isinstance(e, Binary):
        a = evaluate(e.left, scalars, arrays, width)
        b = evaluate(e.right, scalars, arrays, width)
        return binop(e.op, a, b, width)
    raise UnsupportedOperator(f"cannot evaluate {type(e).__name__}")
