"""Fixed-width two's-complement bitvector operations on a :class:`Circuit`.

Bitvectors are lists of literals, least significant bit first.  The
semantics match :mod:`faultsat.semantics` bit for bit.
"""

from __future__ import annotations

from faultsat.errors import UnsupportedOperator


def const(c, value, width):
    return [c.const((value >> i) & 1) for i in range(width)]


def bnot(c, a):
    return [-x for x in a]


def add(c, a, b, carry=None):
    carry = c.FALSE if carry is None else carry
    out = []
    for x, y in zip(a, b):
        t = c.XOR(x, y)
        out.append(c.XOR(t, carry))
        carry = c.OR(c.AND(x, y), c.AND(t, carry))
    return out


def sub(c, a, b):
    return add(c, a, bnot(c, b), c.TRUE)


def neg(c, a):
    return add(c, const(c, 0, len(a)), bnot(c, a), c.TRUE)


def mul(c, a, b):
    """Shift-and-add multiplier truncated to the operand width."""
    w = len(a)
    acc = const(c, 0, w)
    for i in range(w):
        if b[i] == c.FALSE:
            continue
        partial = [c.FALSE] * i + [c.AND(b[i], x) for x in a[: w - i]]
        acc = add(c, acc, partial)
    return acc


def ult(c, a, b):
    """Unsigned a < b."""
    lt = c.FALSE
    for x, y in zip(a, b):  # LSB to MSB; higher bits override
        lt = c.ITE(c.XOR(x, y), y, lt)
    return lt


def slt(c, a, b):
    return ult(c, a[:-1] + [-a[-1]], b[:-1] + [-b[-1]])


def eq(c, a, b):
    return c.AND_all([-c.XOR(x, y) for x, y in zip(a, b)])


def mux(c, sel, t, e):
    return [c.ITE(sel, x, y) for x, y in zip(t, e)]


def nonzero(c, a):
    return c.OR_all(a)


def from_bool(c, lit, width):
    return [lit] + [c.FALSE] * (width - 1)


def absval(c, a):
    return mux(c, a[-1], neg(c, a), a)


def udivrem(c, a, b):
    """Restoring division of unsigned ``a`` by ``b``; ``b == 0`` gives all-ones and ``a``."""
    w = len(a)
    r = [c.FALSE] * (w + 1)
    d = list(b) + [c.FALSE]
    q = [c.FALSE] * w
    for i in reversed(range(w)):
        r = [a[i]] + r[:-1]
        diff = sub(c, r, d)
        ge = -ult(c, r, d)
        r = mux(c, ge, diff, r)
        q[i] = ge
    return q, r[:w]


def sdivrem(c, a, b):
    sa, sb = a[-1], b[-1]
    qu, ru = udivrem(c, absval(c, a), absval(c, b))
    q = mux(c, c.XOR(sa, sb), neg(c, qu), qu)
    r = mux(c, sa, neg(c, ru), ru)
    return q, r


def _shift_amount(c, b):
    """Split ``b`` into (low log2(w) bits, in-range literal)."""
    w = len(b)
    k = w.bit_length() - 1
    in_range = c.AND_all([-x for x in b[k:]])  # 0 <= b < w
    return b[:k], in_range


def shl(c, a, b):
    w = len(a)
    amt, ok = _shift_amount(c, b)
    out = list(a)
    for j, s in enumerate(amt):
        n = 1 << j
        shifted = [c.FALSE] * n + out[: w - n]
        out = mux(c, s, shifted, out)
    return [c.AND(ok, x) for x in out]


def ashr(c, a, b):
    w = len(a)
    sign = a[-1]
    amt, ok = _shift_amount(c, b)
    out = list(a)
    for j, s in enumerate(amt):
        n = 1 << j
        shifted = out[n:] + [sign] * n
        out = mux(c, s, shifted, out)
    return [c.ITE(ok, x, sign) for x in out]


def binop(c, op, a, b):
    w = len(a)
    if op == "+":
        return add(c, a, b)
    if op == "-":
        return sub(c, a, b)
    if op == "*":
        return mul(c, a, b)
    if op == "/":
        return sdivrem(c, a, b)[0]
    if op == "%":
        return sdivrem(c, a, b)[1]
    if op == "<<":
        return shl(c, a, b)
    if op == ">>":
        return ashr(c, a, b)
    if op == "&":
        return [c.AND(x, y) for x, y in zip(a, b)]
    if op == "|":
        return [c.OR(x, y) for x, y in zip(a, b)]
    if op == "^":
        return [c.XOR(x, y) for x, y in zip(a, b)]
    if op in ("<", "<=", ">", ">=", "==", "!=", "&&", "||"):
        return from_bool(c, predicate(c, op, a, b), w)
    raise UnsupportedOperator(op)


def predicate(c, op, a, b):
    """Single-literal result of a comparison or logical connective."""
    if op == "<":
        return slt(c, a, b)
    if op == "<=":
        return -slt(c, b, a)
    if op == ">":
        return slt(c, b, a)
    if op == ">=":
        return -slt(c, a, b)
    if op == "==":
        return eq(c, a, b)
    if op == "!=":
        return -eq(c, a, b)
    if op == "&&":
        return c.AND(nonzero(c, a), nonzero(c, b))
    if op == "||":
        return c.OR(nonzero(c, a), nonzero(c, b))
    raise UnsupportedOperator(op)


def unop(c, op, a):
    if op == "-":
        return neg(c, a)
    if op == "~":
        return bnot(c, a)
    if op == "!":
        return from_bool(c, -nonzero(c, a), len(a))
    raise UnsupportedOperator(op)
