"""Hand-written lexer and recursive-descent parser for MiniC."""

from __future__ import annotations

import re

from faultsat.errors import CallCycleError, MiniCSyntaxError, UndeclaredVariableError
from faultsat.frontend.ast import (
    Assert,
    Assign,
    Assume,
    Binary,
    Block,
    Call,
    CallStmt,
    Decl,
    Function,
    If,
    Index,
    IntLit,
    Module,
    Param,
    Pos,
    Return,
    Unary,
    Var,
    While,
    stmt_exprs,
    walk_expr,
    walk_stmts,
)

KEYWORDS = {"int", "void", "if", "else", "while", "assert", "assume", "return", "input", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<nl>\n)
  | (?P<pp>\#[^\n]*)
  | (?P<num>0[xX][0-9a-fA-F]+|\d+)
  | (?P<char>'(?:\\.|[^\\'])')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><<|>>|<=|>=|==|!=|&&|\|\||[-+*/%<>!~&|^=()\[\]{},;])
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {"n": 10, "t": 9, "r": 13, "0": 0, "\\": 92, "'": 39}


class Token:
    __slots__ = ("kind", "text", "pos", "end")

    def __init__(self, kind, text, pos, end):
        self.kind, self.text, self.pos, self.end = kind, text, pos, end

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.pos.line}:{self.pos.col})"


def tokenize(source: str, filename: str = "<input>"):
    """Return ``(tokens, defines)``; preprocessor lines are consumed here."""
    tokens = []
    defines = {}
    phys = 1
    delta = 0  # logical line = physical line + delta
    col0 = 0  # offset of the current line start
    i = 0
    at_line_start = True
    while i < len(source):
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise MiniCSyntaxError(f"unexpected character {source[i]!r}", phys + delta, i - col0 + 1, filename)
        kind = m.lastgroup
        text = m.group()
        col = i - col0 + 1
        if kind == "nl":
            phys += 1
            col0 = m.end()
            at_line_start = True
        elif kind == "comment":
            nls = text.count("\n")
            if nls:
                phys += nls
                col0 = i + text.rfind("\n") + 1
        elif kind == "pp":
            if not at_line_start:
                raise MiniCSyntaxError("preprocessor directive must start a line", phys + delta, col, filename)
            parts = text[1:].split()
            if parts and parts[0] == "line" and len(parts) >= 2 and parts[1].isdigit():
                delta = int(parts[1]) - (phys + 1)
            elif parts and parts[0] == "define" and len(parts) == 3:
                name, val = parts[1], parts[2]
                if not re.fullmatch(r"[A-Za-z_]\w*", name) or not re.fullmatch(r"-?(0[xX][0-9a-fA-F]+|\d+)", val):
                    raise MiniCSyntaxError("#define expects NAME INTEGER", phys + delta, col, filename)
                defines[name] = int(val, 0)
            else:
                raise MiniCSyntaxError(f"unsupported directive {text.strip()!r}", phys + delta, col, filename)
        elif kind != "ws":
            at_line_start = False
            pos = Pos(phys + delta, col, phys)
            end = col + len(text)
            if kind == "ident" and text in KEYWORDS:
                tokens.append(Token("kw", text, pos, end))
            elif kind == "char":
                body = text[1:-1]
                if body.startswith("\\"):
                    if body[1] not in _ESCAPES:
                        raise MiniCSyntaxError(f"unknown escape {body!r}", pos.line, col, filename)
                    value = _ESCAPES[body[1]]
                else:
                    value = ord(body)
                tokens.append(Token("num", str(value), pos, end))
            else:
                tokens.append(Token(kind, text, pos, end))
        i = m.end()
    tokens.append(Token("eof", "", Pos(phys + delta, 1, phys), 1))
    return tokens, defines


_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
]


class Parser:
    def __init__(self, source: str, filename: str = "<input>"):
        self.filename = filename
        self.source = source
        self.tokens, self.defines = tokenize(source, filename)
        self.i = 0
        self._sid = 0

    # -- token helpers --
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise MiniCSyntaxError(msg, tok.pos.line, tok.pos.col, self.filename)

    def at(self, text, kind=None):
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind in ("op", "kw")

    def accept(self, text):
        if self.at(text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text):
        t = self.accept(text)
        if t is None:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return t

    def ident(self):
        t = self.tok
        if t.kind != "ident":
            self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        if t.text in self.defines:
            self.error(f"{t.text!r} is a macro, not a variable")
        self.i += 1
        return t

    def next_sid(self):
        self._sid += 1
        return self._sid

    # -- top level --
    def parse_module(self) -> Module:
        functions = []
        body = []
        start = self.tok.pos
        while self.tok.kind != "eof":
            if self.at("int") or self.at("void"):
                save = self.i
                is_void = self.tok.text == "void"
                self.i += 1
                if self.tok.kind == "ident" and self.tokens[self.i + 1].text == "(":
                    self.i = save
                    functions.append(self.parse_function())
                    continue
                self.i = save
                if is_void:
                    self.error("'void' is only valid as a function return type")
            body.extend(self.parse_stmt(top_level=True))
        return Module(
            defines=tuple(sorted(self.defines.items())),
            functions=tuple(functions),
            body=Block(tuple(body), start),
            filename=self.filename,
            source=self.source,
        )

    def parse_function(self) -> Function:
        rtype = self.tok
        self.i += 1
        name = self.ident()
        self.expect("(")
        params = []
        if self.at("void") and self.tokens[self.i + 1].text == ")":
            self.i += 1
        elif not self.at(")"):
            while True:
                self.expect("int")
                pname = self.ident().text
                is_array = False
                if self.accept("["):
                    self.expect("]")
                    is_array = True
                params.append(Param(pname, is_array))
                if not self.accept(","):
                    break
        self.expect(")")
        body = self.parse_block()
        return Function(name.text, tuple(params), rtype.text == "int", body, name.pos)

    def parse_block(self) -> Block:
        t = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block", t)
            stmts.extend(self.parse_stmt())
        self.expect("}")
        return Block(tuple(stmts), t.pos)

    # -- statements --
    def parse_stmt(self, top_level=False) -> list:
        t = self.tok
        if self.at("{"):
            return [self.parse_block()]
        if self.accept(";"):
            return []
        if self.at("input"):
            if not top_level:
                self.error("input declarations are only allowed at top level")
            self.i += 1
            self.accept("int")
            return self.parse_declarators(t, is_input=True)
        if self.accept("int"):
            return self.parse_declarators(t, is_input=False)
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            sid = self.next_sid()
            then = self.parse_substmt()
            orelse = None
            if self.accept("else"):
                orelse = self.parse_substmt()
            return [If(cond, then, orelse, sid, t.pos)]
        if self.accept("while"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            sid = self.next_sid()
            return [While(cond, self.parse_substmt(), sid, t.pos)]
        if self.at("assert") or self.at("assume"):
            kw = self.tok.text
            self.i += 1
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect(";")
            cls = Assert if kw == "assert" else Assume
            return [cls(cond, self.next_sid(), t.pos)]
        if self.accept("return"):
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return [Return(value, self.next_sid(), t.pos)]
        if t.kind == "ident":
            name = self.ident()
            if self.at("("):
                call = self.parse_call(name)
                self.expect(";")
                return [CallStmt(call, self.next_sid(), t.pos)]
            index = None
            if self.accept("["):
                index = self.parse_expr()
                self.expect("]")
            self.expect("=")
            value = self.parse_expr()
            self.expect(";")
            return [Assign(name.text, index, value, self.next_sid(), t.pos)]
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def parse_substmt(self):
        stmts = self.parse_stmt()
        if len(stmts) == 1 and isinstance(stmts[0], Block):
            return stmts[0]
        if stmts and isinstance(stmts[0], Decl):
            self.error("a declaration is not allowed as an unbraced branch or loop body")
        return Block(tuple(stmts), stmts[0].pos if stmts else self.tok.pos)

    def parse_declarators(self, start, is_input) -> list:
        out = []
        while True:
            name = self.ident()
            length = None
            init = None
            if self.accept("["):
                length = self.parse_const()
                if length <= 0:
                    self.error("array length must be a positive constant", name)
                self.expect("]")
            if self.accept("="):
                if is_input:
                    self.error("input variables cannot be initialised", name)
                if length is not None:
                    self.error("array initialisers are not supported", name)
                init = self.parse_expr()
            out.append(Decl(name.text, length, init, is_input, self.next_sid(), name.pos))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def parse_const(self) -> int:
        t = self.tok
        e = self.parse_expr()
        value = const_eval(e)
        if value is None:
            self.error("expected a constant expression", t)
        return value

    # -- expressions --
    def parse_expr(self, level=0):
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_expr(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.tok
            self.i += 1
            right = self.parse_expr(level + 1)
            left = Binary(op.text, left, right, op.pos)
        return left

    def parse_unary(self):
        t = self.tok
        if t.kind == "op" and t.text in ("-", "!", "~", "+"):
            self.i += 1
            nxt = self.tok
            if t.text == "-" and nxt.kind == "num":
                # negative literals are single tokens for constant mutation
                self.i += 1
                return IntLit(-int(nxt.text, 0), None, t.pos, nxt.end)
            operand = self.parse_unary()
            if t.text == "+":
                return operand
            return Unary(t.text, operand, t.pos)
        return self.parse_primary()

    def parse_primary(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return IntLit(int(t.text, 0), None, t.pos, t.end)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.i += 1
            return IntLit(1 if t.text == "true" else 0, None, t.pos, t.end)
        if t.kind == "ident":
            if t.text in self.defines:
                self.i += 1
                return IntLit(self.defines[t.text], t.text, t.pos, t.end)
            self.i += 1
            if self.at("("):
                return self.parse_call(t)
            if self.accept("["):
                idx = self.parse_expr()
                self.expect("]")
                return Index(t.text, idx, t.pos)
            return Var(t.text, t.pos)
        if self.accept("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        self.error(f"expected an expression, found {t.text or 'end of input'!r}")

    def parse_call(self, name_tok):
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return Call(name_tok.text, tuple(args), name_tok.pos)


def const_eval(e):
    """Fold a literal-only expression (used for array lengths); None otherwise."""
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Unary) and e.op == "-":
        v = const_eval(e.operand)
        return None if v is None else -v
    if isinstance(e, Binary) and e.op in ("+", "-", "*"):
        a, b = const_eval(e.left), const_eval(e.right)
        if a is None or b is None:
            return None
        return a + b if e.op == "+" else a - b if e.op == "-" else a * b
    return None


# -- semantic checks ---------------------------------------------------------


def _err(cls, msg, pos, filename):
    if cls is MiniCSyntaxError:
        return MiniCSyntaxError(msg, pos.line, pos.col, filename)
    return cls(f"{filename}:{pos.line}:{pos.col}: {msg}")


def check_module(mod: Module) -> None:
    """Scope, arity and call-graph checks; raises on the first problem."""
    fname = mod.filename
    funcs = {}
    for f in mod.functions:
        if f.name in funcs:
            raise _err(MiniCSyntaxError, f"function {f.name!r} defined twice", f.pos, fname)
        funcs[f.name] = f

    def collect(block, scope, where):
        for s in walk_stmts(block):
            if isinstance(s, Decl):
                if s.name in scope:
                    raise _err(MiniCSyntaxError, f"{s.name!r} declared twice in {where}", s.pos, fname)
                if s.name in funcs:
                    raise _err(MiniCSyntaxError, f"{s.name!r} clashes with a function name", s.pos, fname)
                scope[s.name] = s.length is not None

    globals_ = {}
    collect(mod.body, globals_, "the top level")

    def check_call(call, scope, pos):
        f = funcs.get(call.name)
        if f is None:
            raise _err(UndeclaredVariableError, f"call to undefined function {call.name!r}", pos, fname)
        if len(call.args) != len(f.params):
            raise _err(
                MiniCSyntaxError, f"{call.name} expects {len(f.params)} arguments, got {len(call.args)}", pos, fname
            )
        for a, p in zip(call.args, f.params):
            if p.is_array:
                if not isinstance(a, Var) or not scope.get(a.name, False):
                    raise _err(MiniCSyntaxError, f"parameter {p.name!r} of {f.name} needs an array name", pos, fname)
            else:
                check_expr(a, scope, allow_call=False)
        return f

    def check_expr(e, scope, allow_call):
        for sub in walk_expr(e):
            if isinstance(sub, Var):
                if sub.name not in scope:
                    raise _err(UndeclaredVariableError, f"undeclared variable {sub.name!r}", sub.pos, fname)
                if scope[sub.name]:
                    # array names may only appear as call arguments, handled in check_call
                    pass
            elif isinstance(sub, Index):
                if sub.array not in scope:
                    raise _err(UndeclaredVariableError, f"undeclared array {sub.array!r}", sub.pos, fname)
                if not scope[sub.array]:
                    raise _err(MiniCSyntaxError, f"{sub.array!r} is not an array", sub.pos, fname)
            elif isinstance(sub, Call) and (sub is not e or not allow_call):
                raise _err(
                    MiniCSyntaxError,
                    "calls may only appear as statements or as the whole right-hand side of an assignment",
                    sub.pos,
                    fname,
                )
        if isinstance(e, Call):
            check_call(e, scope, e.pos)
        else:
            for sub in walk_expr(e):
                if isinstance(sub, Var) and scope[sub.name]:
                    raise _err(MiniCSyntaxError, f"array {sub.name!r} used as a scalar", sub.pos, fname)

    def check_block(block, scope, func):
        for s in walk_stmts(block):
            if isinstance(s, Decl) and s.init is not None:
                check_expr(s.init, scope, allow_call=True)
                if isinstance(s.init, Call) and not funcs[s.init.name].returns_value:
                    raise _err(MiniCSyntaxError, f"{s.init.name} does not return a value", s.pos, fname)
            elif isinstance(s, Assign):
                if s.target not in scope:
                    raise _err(UndeclaredVariableError, f"undeclared variable {s.target!r}", s.pos, fname)
                if scope[s.target] != (s.index is not None):
                    what = "array" if scope[s.target] else "scalar"
                    raise _err(MiniCSyntaxError, f"bad assignment to {what} {s.target!r}", s.pos, fname)
                if s.index is not None:
                    check_expr(s.index, scope, allow_call=False)
                check_expr(s.value, scope, allow_call=True)
                if isinstance(s.value, Call) and not funcs[s.value.name].returns_value:
                    raise _err(MiniCSyntaxError, f"{s.value.name} does not return a value", s.pos, fname)
            elif isinstance(s, CallStmt):
                check_call(s.call, scope, s.pos)
            elif isinstance(s, Return):
                if func is None:
                    raise _err(MiniCSyntaxError, "return outside of a function", s.pos, fname)
                if func.returns_value != (s.value is not None):
                    raise _err(MiniCSyntaxError, f"return value mismatch in {func.name}", s.pos, fname)
                if s.value is not None:
                    check_expr(s.value, scope, allow_call=False)
            elif not isinstance(s, Block):
                for e in stmt_exprs(s):
                    check_expr(e, scope, allow_call=False)

    check_block(mod.body, globals_, None)
    for f in mod.functions:
        scope = dict(globals_)
        local = {}
        for p in f.params:
            if p.name in local:
                raise _err(MiniCSyntaxError, f"duplicate parameter {p.name!r}", f.pos, fname)
            local[p.name] = p.is_array
        collect(f.body, local, f"function {f.name}")
        scope.update(local)
        check_block(f.body, scope, f)

    # call graph must be acyclic
    edges = {f.name: set() for f in mod.functions}
    for f in mod.functions:
        for s in walk_stmts(f.body):
            for e in stmt_exprs(s):
                for sub in walk_expr(e):
                    if isinstance(sub, Call):
                        edges[f.name].add(sub.name)
    state = {}

    def visit(n, stack):
        state[n] = 1
        for m in sorted(edges[n]):
            if state.get(m) == 1:
                cycle = " -> ".join(stack[stack.index(m) :] + [m])
                raise CallCycleError(f"{fname}: recursive call cycle {cycle}")
            if m not in state:
                visit(m, stack + [m])
        state[n] = 2

    for f in mod.functions:
        if f.name not in state:
            visit(f.name, [f.name])


def parse(source_text: str, filename: str = "<input>") -> Module:
    """Parse and check MiniC source text."""
    mod = Parser(source_text, filename).parse_module()
    check_module(mod)
    return mod


def parse_file(path) -> Module:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))
