"""Bit-precise encodings of expressions, traces and whole unrolled programs."""

from __future__ import annotations

from dataclasses import dataclass, field

from faultsat import program as P
from faultsat.encoder import bv
from faultsat.encoder.circuit import Circuit
from faultsat.errors import DisconnectedTrace, UnsupportedOperator
from faultsat.frontend.ast import Assign, Binary, Index, IntLit, Unary, Var, walk_expr
from faultsat.semantics import BINARY_OPS, UNARY_OPS

_PREDICATES = ("<", "<=", ">", ">=", "==", "!=", "&&", "||")


@dataclass
class State:
    """Symbolic program state: variable name -> bit literals."""

    scalars: dict = field(default_factory=dict)
    arrays: dict = field(default_factory=dict)  # name -> tuple of cell bitvectors

    def with_scalar(self, name, bits):
        s = dict(self.scalars)
        s[name] = tuple(bits)
        return State(s, self.arrays)

    def with_array(self, name, cells):
        a = dict(self.arrays)
        a[name] = tuple(tuple(x) for x in cells)
        return State(self.scalars, a)


class ExprEncoder:
    def __init__(self, circuit: Circuit, width: int):
        self.c = circuit
        self.width = width

    def bits(self, e, st: State):
        c, w = self.c, self.width
        if isinstance(e, IntLit):
            return bv.const(c, e.value, w)
        if isinstance(e, Var):
            return list(st.scalars[e.name])
        if isinstance(e, Index):
            return self.read(st.arrays[e.array], self.bits(e.index, st))
        if isinstance(e, Unary):
            if e.op not in UNARY_OPS:
                raise UnsupportedOperator(e.op)
            if e.op == "!":
                return bv.from_bool(c, -self.cond(e.operand, st), w)
            return bv.unop(c, e.op, self.bits(e.operand, st))
        if isinstance(e, Binary):
            if e.op not in BINARY_OPS:
                raise UnsupportedOperator(e.op)
            if e.op in _PREDICATES:
                return bv.from_bool(c, self.cond(e, st), w)
            return bv.binop(c, e.op, self.bits(e.left, st), self.bits(e.right, st))
        raise UnsupportedOperator(f"cannot encode {type(e).__name__}")

    def cond(self, e, st: State):
        """Literal that is true iff ``e`` evaluates to a nonzero value."""
        c = self.c
        if isinstance(e, Unary) and e.op == "!":
            return -self.cond(e.operand, st)
        if isinstance(e, Binary) and e.op in ("&&", "||"):
            a, b = self.cond(e.left, st), self.cond(e.right, st)
            return c.AND(a, b) if e.op == "&&" else c.OR(a, b)
        if isinstance(e, Binary) and e.op in _PREDICATES:
            return bv.predicate(c, e.op, self.bits(e.left, st), self.bits(e.right, st))
        return bv.nonzero(c, self.bits(e, st))

    def read(self, cells, idx):
        c = self.c
        if all(c.is_const(x) for x in idx):
            k = sum(1 << i for i, x in enumerate(idx) if x == c.TRUE)
            k = k - (1 << len(idx)) if k >> (len(idx) - 1) else k
            return list(cells[k]) if 0 <= k < len(cells) else bv.const(c, 0, len(idx))
        out = bv.const(c, 0, self.width)
        for k, cell in enumerate(cells):
            out = bv.mux(c, bv.eq(c, idx, bv.const(c, k, self.width)), cell, out)
        return out

    def write(self, cells, idx, value):
        c = self.c
        return [bv.mux(c, bv.eq(c, idx, bv.const(c, k, self.width)), value, cell) for k, cell in enumerate(cells)]


def _bind(c: Circuit, name, value, width, selector):
    """New SSA copy of ``name`` equal to ``value``.

    Without a selector the value's literals are reused directly; with one,
    fresh bits are tied to ``value`` by clauses that ``selector`` can disable.
    """
    if selector is None:
        c.versions[name] = c.versions.get(name, -1) + 1
        return list(value)
    out = c.fresh_bits(name, width)
    for x, y in zip(out, value):
        c.equiv(x, y, selector)
    return out


def _step(enc: ExprEncoder, t: P.Transition, st: State, selector):
    """Apply an assignment-like transition; return the new state."""
    c, w = enc.c, enc.width
    if t.kind == P.ASSIGN:
        return st.with_scalar(t.var, _bind(c, t.var, enc.bits(t.expr, st), w, selector))
    if t.kind == P.STORE:
        idx = _bind(c, f"{t.var}@idx", enc.bits(t.index, st), w, selector)
        val = _bind(c, f"{t.var}@val", enc.bits(t.expr, st), w, selector)
        return st.with_array(t.var, enc.write(st.arrays[t.var], idx, val))
    if t.kind == P.INIT:
        zero = bv.const(c, 0, w)
        if t.var in st.arrays:
            return st.with_array(t.var, [zero] * len(st.arrays[t.var]))
        return st.with_scalar(t.var, zero)
    return st


def initial_state(c: Circuit, program: P.Program, fresh_locals=False):
    """Inputs (and optionally all locals) get fresh version-0 bits; others are zero."""
    w = program.width
    st = State()
    zero = tuple(bv.const(c, 0, w))
    for v in program.vars:
        if v.role == "input" or fresh_locals:
            st.scalars[v.name] = tuple(c.fresh_bits(v.name, w))
        else:
            st.scalars[v.name] = zero
    for a in program.arrays:
        if a.role == "input" or fresh_locals:
            st.arrays[a.name] = tuple(tuple(c.fresh_bits(f"{a.name}[{k}]", w)) for k in range(a.length))
        else:
            st.arrays[a.name] = (zero,) * a.length
    return st


def input_bits(program: P.Program, st: State) -> dict:
    out = {}
    for v in program.inputs:
        out[v.name] = list(st.arrays[v.name]) if v.length is not None else st.scalars[v.name]
    return out


def test_clauses(c: Circuit, program, bits: dict, test) -> None:
    """Hard unit clauses fixing the input bits to the test's values."""
    for name, value in test.assignments.items():
        vecs = [bits[name]] if not isinstance(value, tuple) else bits[name]
        vals = [value] if not isinstance(value, tuple) else value
        for vec, val in zip(vecs, vals):
            for i, lit in enumerate(vec):
                c.add([lit if (val >> i) & 1 else -lit])


@dataclass
class ProgramEncoding:
    circuit: Circuit
    inputs: dict  # input name -> bit literals (arrays: list per cell)
    reach: dict  # location -> literal
    assert_reach: dict  # assertion id -> literal (location reached, earlier checks passed)
    assert_holds: dict  # assertion id -> literal
    final_state: State | None = None

    def violation(self, aid):
        return self.circuit.AND(self.assert_reach[aid], -self.assert_holds[aid])


def encode_program(program: P.Program, selector_for=None, assumptions_global=False, circuit=None):
    """Encode every path of the unrolled program.

    ``selector_for(t)`` returns the selector guarding soft transition ``t``
    (or None for a hard encoding).  With ``assumptions_global`` each
    assumption becomes a hard implication from its location's reach literal,
    so disabling statements can never make the failing path vanish.
    """
    c = circuit if circuit is not None else Circuit()
    enc = ExprEncoder(c, program.width)
    init = initial_state(c, program)
    incoming = {program.initial_location: [(c.TRUE, init)]}
    reach, a_reach, a_holds = {}, {}, {}
    final_state = None
    for loc in program.locations:
        edges = incoming.pop(loc, None)
        if not edges:
            reach[loc] = c.FALSE
            for a in program.assertions_at(loc):
                a_reach[a.id], a_holds[a.id] = c.FALSE, c.TRUE
            continue
        r, st = _merge(c, edges)
        reach[loc] = r
        if loc == program.final_location:
            final_state = st
        ok = r
        for a in program.assertions_at(loc):
            a_reach[a.id] = ok
            p = enc.cond(a.predicate, st)
            a_holds[a.id] = p
            ok = c.AND(ok, p)
        branch_lits = {}
        for t in program.outgoing(loc):
            sel = selector_for(t) if selector_for is not None and not t.hard else None
            cond = ok
            new = st
            if t.kind == P.GUARD:
                g = branch_lits.get(t.branch)
                if g is None:
                    g = enc.cond(t.expr, st)
                    if sel is not None:
                        free = c.fresh(("branch", t.branch))
                        c.equiv(free, g, sel)
                        g = free
                    branch_lits[t.branch] = g
                cond = c.AND(ok, -g if t.negated else g)
            elif t.kind in (P.ASSUME, P.UNWIND):
                p = enc.cond(t.expr, st)
                if t.kind == P.UNWIND:
                    p = -p
                if assumptions_global:
                    c.add([-ok, p])
                else:
                    cond = c.AND(ok, p)
            else:
                new = _step(enc, t, st, sel)
            if cond != c.FALSE:
                incoming.setdefault(t.target, []).append((cond, new))
    return ProgramEncoding(c, input_bits(program, init), reach, a_reach, a_holds, final_state)


def _merge(c: Circuit, edges):
    if len(edges) == 1:
        return edges[0]
    conds = [e[0] for e in edges]
    states = [e[1] for e in edges]
    r = c.OR_all(conds)
    base = states[-1]
    scalars = {}
    for name, last in base.scalars.items():
        vals = [s.scalars[name] for s in states]
        if all(v == last for v in vals):
            scalars[name] = last
            continue
        out = list(last)
        for cond, v in zip(reversed(conds[:-1]), reversed(vals[:-1])):
            if v != tuple(out):
                out = bv.mux(c, cond, v, out)
        scalars[name] = tuple(out)
    arrays = {}
    for name, last in base.arrays.items():
        vals = [s.arrays[name] for s in states]
        if all(v == last for v in vals):
            arrays[name] = last
            continue
        cells = []
        for k in range(len(last)):
            out = list(last[k])
            for cond, v in zip(reversed(conds[:-1]), reversed(vals[:-1])):
                if v[k] != tuple(out):
                    out = bv.mux(c, cond, v[k], out)
            cells.append(tuple(out))
        arrays[name] = tuple(cells)
    return r, State(scalars, arrays)


# -- path formulas -----------------------------------------------------------


@dataclass
class TraceEncoding:
    circuit: Circuit
    inputs: dict
    states: list  # state before each step, plus the final one


def build_trace_formula(program: P.Program, trace, selector_for=None, circuit=None) -> TraceEncoding:
    """Conjunction of the transition relations along ``trace`` over SSA copies.

    Satisfiable iff the path is feasible for some initial state.  Raises
    :class:`DisconnectedTrace` if consecutive steps do not share a location
    or the first step does not leave the initial location.
    """
    c = circuit if circuit is not None else Circuit()
    enc = ExprEncoder(c, program.width)
    st = initial_state(c, program, fresh_locals=True)
    inputs = input_bits(program, st)
    states = [st]
    loc = program.initial_location
    for tid in trace:
        t = program.transitions[tid]
        if t.source != loc:
            raise DisconnectedTrace(f"transition {tid} leaves location {t.source}, expected {loc}")
        sel = selector_for(t) if selector_for is not None and not t.hard else None
        if t.kind in (P.GUARD, P.ASSUME, P.UNWIND):
            p = enc.cond(t.expr, st)
            c.add([-p if t.negated else p], sel)
        else:
            st = _step(enc, t, st, sel)
        states.append(st)
        loc = t.target
    return TraceEncoding(c, inputs, states)


# -- single constraints ------------------------------------------------------


@dataclass
class BitBlast:
    cnf: object
    bits: dict  # (name, version) -> variable ids, LSB first
    circuit: Circuit


def bitblast(constraint, width: int = 8) -> BitBlast:
    """CNF for one constraint over fresh variables.

    ``constraint`` is either a predicate expression (which must hold) or an
    assignment ``x = e`` given as an :class:`~faultsat.frontend.ast.Assign`
    or a ``(name, expr)`` pair, relating version 1 of ``x`` to version 0
    of the variables in ``e``.
    """
    c = Circuit()
    enc = ExprEncoder(c, width)
    if isinstance(constraint, Assign):
        if constraint.index is not None:
            raise UnsupportedOperator("array stores are encoded through transitions")
        target, expr = constraint.target, constraint.value
    elif isinstance(constraint, tuple):
        target, expr = constraint
    else:
        target, expr = None, constraint
    st = State()
    names = [x.name for x in walk_expr(expr) if isinstance(x, Var)]
    if any(isinstance(x, Index) for x in walk_expr(expr)):
        raise UnsupportedOperator("array reads are encoded through transitions")
    if target is not None:
        names.append(target)
    for name in dict.fromkeys(names):
        st.scalars[name] = tuple(c.fresh_bits(name, width))
    bits = {(n, 0): list(b) for n, b in st.scalars.items()}
    if target is None:
        c.add([enc.cond(expr, st)])
    else:
        value = enc.bits(expr, st)
        out = c.fresh_bits(target, width)
        for x, y in zip(out, value):
            c.equiv(x, y)
        bits[(target, 1)] = out
    return BitBlast(c.cnf, bits, c)
