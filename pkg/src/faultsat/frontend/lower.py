"""Lower a checked MiniC AST to an acyclic guarded-transition graph.

Functions are inlined with call-site-unique names, ``while`` loops are
unrolled into ``bound`` guarded copies followed by an unwinding assumption,
and array accesses and divisions produce implicit assertions at the entry
location of their statement.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace

from faultsat import program as P
from faultsat.errors import UnrollBoundError
from faultsat.frontend.ast import (
    Assert,
    Assign,
    Assume,
    Binary,
    Block,
    Call,
    CallStmt,
    Decl,
    If,
    Index,
    IntLit,
    Return,
    Unary,
    Var,
    While,
    stmt_exprs,
    walk_expr,
    walk_stmts,
)

WIDTHS = (4, 8, 16, 32)


@dataclass(frozen=True)
class _Ctx:
    env: dict  # source name -> flat name
    func: str | None = None
    exit: int | None = None
    ret: str | None = None
    trusted: bool = False
    loops: tuple = ()


def rename_expr(e, env):
    if isinstance(e, IntLit):
        return e
    if isinstance(e, Var):
        return Var(env[e.name], e.pos)
    if isinstance(e, Index):
        return Index(env[e.array], rename_expr(e.index, env), e.pos)
    if isinstance(e, Unary):
        return Unary(e.op, rename_expr(e.operand, env), e.pos)
    if isinstance(e, Binary):
        return Binary(e.op, rename_expr(e.left, env), rename_expr(e.right, env), e.pos)
    raise TypeError(f"unexpected expression {e!r}")


class _Lowerer:
    def __init__(self, mod, bound, width, trusted):
        self.mod = mod
        self.bound = bound
        self.width = width
        self.trusted = frozenset(trusted)
        self.n_locs = 0
        self.trans = []
        self.asserts = []
        self.vars = {}
        self.arrays = {}
        self.statements = {}
        self.n_calls = 0
        self.n_loops = 0
        self.n_branches = 0

    def new_loc(self):
        self.n_locs += 1
        return self.n_locs - 1

    def note_stmt(self, s, ctx):
        if s.sid in self.statements:
            return
        consts = tuple(sorted({x.value for e in stmt_exprs(s) for x in walk_expr(e) if isinstance(x, IntLit)}))
        if isinstance(s, Decl) and s.length is not None:
            consts = ()
        self.statements[s.sid] = P.StatementInfo(
            s.sid, s.pos.line, s.pos.col, type(s).__name__, ctx.func, ctx.trusted, consts
        )

    def emit(self, src, kind, s, ctx, target=None, **kw):
        if target is None:
            target = self.new_loc()
        loop = ctx.loops[-1] if ctx.loops else None
        self.trans.append(
            P.Transition(
                id=len(self.trans),
                source=src,
                target=target,
                kind=kind,
                sid=s.sid,
                line=s.pos.line,
                col=s.pos.col,
                loop=loop,
                loops=ctx.loops,
                trusted=ctx.trusted,
                func=ctx.func,
                **kw,
            )
        )
        return target

    def implicit_checks(self, exprs, loc, s, ctx):
        """Add bounds and division-guard assertions for ``exprs`` (already renamed)."""
        for e in exprs:
            for sub in walk_expr(e):
                if isinstance(sub, Index):
                    n = self.arrays[sub.array].length
                    self.add_assert(loc, Binary(">=", sub.index, IntLit(0), sub.pos), "array-bounds", s, ctx, sub)
                    self.add_assert(loc, Binary("<", sub.index, IntLit(n), sub.pos), "array-bounds", s, ctx, sub)
                elif isinstance(sub, Binary) and sub.op in ("/", "%"):
                    self.add_assert(loc, Binary("!=", sub.right, IntLit(0), sub.pos), "division-guard", s, ctx, sub)

    def add_assert(self, loc, pred, kind, s, ctx, node=None):
        pos = node.pos if node is not None and node.pos.line else s.pos
        self.asserts.append(P.AssertionSpec(len(self.asserts), loc, pred, pos.line, pos.col, kind, s.sid, ctx.trusted))

    def declare(self, flat, decl):
        role = "input" if decl.is_input else "local"
        if decl.length is not None:
            self.arrays[flat] = P.VarDecl(flat, self.width, role, decl.length)
        else:
            self.vars[flat] = P.VarDecl(flat, self.width, role)

    # -- statements --
    def block(self, stmts, loc, ctx):
        for s in stmts:
            if loc is None:
                break  # unreachable code after a return
            loc = self.stmt(s, loc, ctx)
        return loc

    def stmt(self, s, loc, ctx):
        if isinstance(s, Block):
            return self.block(s.stmts, loc, ctx)
        self.note_stmt(s, ctx)
        env = ctx.env
        if isinstance(s, Decl):
            flat = env[s.name]
            if s.is_input:
                return loc
            if s.init is None:
                return self.emit(loc, P.INIT, s, ctx, var=flat)
            if isinstance(s.init, Call):
                return self.call(s.init, flat, loc, s, ctx)
            value = rename_expr(s.init, env)
            self.implicit_checks([value], loc, s, ctx)
            return self.emit(loc, P.ASSIGN, s, ctx, var=flat, expr=value)
        if isinstance(s, Assign):
            flat = env[s.target]
            if isinstance(s.value, Call):
                return self.call(s.value, flat, loc, s, ctx)
            value = rename_expr(s.value, env)
            if s.index is None:
                self.implicit_checks([value], loc, s, ctx)
                return self.emit(loc, P.ASSIGN, s, ctx, var=flat, expr=value)
            index = rename_expr(s.index, env)
            self.implicit_checks([index, value, Index(flat, index, s.pos)], loc, s, ctx)
            return self.emit(loc, P.STORE, s, ctx, var=flat, index=index, expr=value)
        if isinstance(s, CallStmt):
            return self.call(s.call, None, loc, s, ctx)
        if isinstance(s, If):
            cond = rename_expr(s.cond, env)
            self.implicit_checks([cond], loc, s, ctx)
            self.n_branches += 1
            b = self.n_branches
            then_loc = self.emit(loc, P.GUARD, s, ctx, expr=cond, branch=b)
            else_loc = self.emit(loc, P.GUARD, s, ctx, expr=cond, branch=b, negated=True)
            then_end = self.stmt(s.then, then_loc, ctx)
            else_end = self.stmt(s.orelse, else_loc, ctx) if s.orelse is not None else else_loc
            ends = [e for e in (then_end, else_end) if e is not None]
            if not ends:
                return None
            join = self.new_loc()
            for e in ends:
                self.emit(e, P.SKIP, s, ctx, target=join)
            return join
        if isinstance(s, While):
            self.n_loops += 1
            lid = self.n_loops
            cond = rename_expr(s.cond, env)
            exit_loc = self.new_loc()
            cur = loc
            for kappa in range(1, self.bound + 1):
                inner = replace(ctx, loops=ctx.loops + ((lid, kappa),))
                self.implicit_checks([cond], cur, s, inner)
                self.n_branches += 1
                b = self.n_branches
                body_loc = self.emit(cur, P.GUARD, s, inner, expr=cond, branch=b)
                self.emit(cur, P.GUARD, s, inner, target=exit_loc, expr=cond, branch=b, negated=True)
                cur = self.stmt(s.body, body_loc, inner)
                if cur is None:
                    break
            if cur is not None:
                self.implicit_checks([cond], cur, s, ctx)
                self.emit(cur, P.UNWIND, s, ctx, target=exit_loc, expr=cond, negated=True)
            return exit_loc
        if isinstance(s, Assert):
            cond = rename_expr(s.cond, env)
            self.implicit_checks([cond], loc, s, ctx)
            self.add_assert(loc, cond, "explicit-assert", s, ctx)
            return self.emit(loc, P.SKIP, s, ctx)
        if isinstance(s, Assume):
            cond = rename_expr(s.cond, env)
            self.implicit_checks([cond], loc, s, ctx)
            return self.emit(loc, P.ASSUME, s, ctx, expr=cond)
        if isinstance(s, Return):
            if s.value is not None:
                value = rename_expr(s.value, env)
                self.implicit_checks([value], loc, s, ctx)
                loc = self.emit(loc, P.ASSIGN, s, ctx, var=ctx.ret, expr=value)
            self.emit(loc, P.SKIP, s, ctx, target=ctx.exit)
            return None
        raise TypeError(f"unexpected statement {s!r}")

    def call(self, call, target, loc, s, ctx):
        f = self.mod.function(call.name)
        self.n_calls += 1
        k = self.n_calls
        trusted = ctx.trusted or f.name in self.trusted
        env = {name: name for name in self.globals}
        for st in walk_stmts(f.body):
            if isinstance(st, Decl):
                env[st.name] = f"{f.name}.{st.name}#{k}"
                self.declare(env[st.name], st)
        bindings = []
        for p, a in zip(f.params, call.args):
            if p.is_array:
                env[p.name] = ctx.env[a.name]
            else:
                flat = f"{f.name}.{p.name}#{k}"
                env[p.name] = flat
                self.vars[flat] = P.VarDecl(flat, self.width, "local")
                bindings.append((flat, rename_expr(a, ctx.env)))
        self.implicit_checks([v for _, v in bindings], loc, s, ctx)
        for flat, value in bindings:
            loc = self.emit(loc, P.ASSIGN, s, ctx, var=flat, expr=value)
        ret = None
        if f.returns_value:
            ret = f"{f.name}$ret#{k}"
            self.vars[ret] = P.VarDecl(ret, self.width, "local")
            loc = self.emit(loc, P.INIT, s, ctx, var=ret)
        exit_loc = self.new_loc()
        inner = _Ctx(env, f.name, exit_loc, ret, trusted, ctx.loops)
        end = self.stmt(f.body, loc, inner)
        if end is not None:
            self.emit(end, P.SKIP, s, ctx, target=exit_loc)
        if target is not None:
            return self.emit(exit_loc, P.ASSIGN, s, ctx, var=target, expr=Var(ret, call.pos))
        return exit_loc

    def run(self):
        decls = [s for s in walk_stmts(self.mod.body) if isinstance(s, Decl)]
        for d in decls:
            self.declare(d.name, d)
        self.globals = [d.name for d in decls]
        ctx = _Ctx({name: name for name in self.globals})
        start = self.new_loc()
        end = self.stmt(self.mod.body, start, ctx)
        if end is None:
            end = self.new_loc()
        return self.finish(start, end)

    def finish(self, start, end):
        # renumber locations in a topological order (ties by creation order)
        succ = {i: [] for i in range(self.n_locs)}
        indeg = [0] * self.n_locs
        for t in self.trans:
            succ[t.source].append(t.target)
            indeg[t.target] += 1
        heap = [i for i in range(self.n_locs) if indeg[i] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            n = heapq.heappop(heap)
            order.append(n)
            for m in succ[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    heapq.heappush(heap, m)
        assert len(order) == self.n_locs, "lowered graph has a cycle"
        new = {old: i for i, old in enumerate(order)}
        trans = [replace(t, source=new[t.source], target=new[t.target]) for t in self.trans]
        asserts = [replace(a, location=new[a.location]) for a in self.asserts]
        return P.Program(
            vars=list(self.vars.values()),
            arrays=list(self.arrays.values()),
            locations=range(self.n_locs),
            initial_location=new[start],
            final_location=new[end],
            transitions=trans,
            assertions=asserts,
            statement_table={t.id: (t.line, t.col) for t in trans},
            statements=dict(sorted(self.statements.items())),
            width=self.width,
            bound=self.bound,
            filename=self.mod.filename,
            ast=self.mod,
            trusted=self.trusted,
        )


def lower_to_cfg(module, unroll_bound: int, width: int = 8, trusted=()) -> P.Program:
    """Inline, unroll and lower ``module`` to a :class:`~faultsat.program.Program`."""
    if not isinstance(unroll_bound, int) or unroll_bound < 1:
        raise UnrollBoundError(f"unroll bound must be a positive integer, got {unroll_bound!r}")
    if width not in WIDTHS:
        raise ValueError(f"width must be one of {WIDTHS}, got {width}")
    unknown = set(trusted) - {f.name for f in module.functions}
    if unknown:
        raise ValueError(f"unknown trusted function(s): {', '.join(sorted(unknown))}")
    return _Lowerer(module, unroll_bound, width, trusted).run()


def load_program(path, bound, width=8, trusted=()):
    from faultsat.frontend.parser import parse_file

    return lower_to_cfg(parse_file(path), bound, width, trusted)
