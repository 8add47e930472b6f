"""MiniC abstract syntax.

Source positions are excluded from equality so that structurally identical
trees compare equal regardless of where they were parsed from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Pos:
    line: int  # logical line (after #line directives)
    col: int
    phys: int  # physical line in the file


NOPOS = Pos(0, 0, 0)


def _pos():
    return field(default=NOPOS, compare=False, repr=False)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    macro: Optional[str] = None  # name of the #define it came from
    pos: Pos = _pos()
    end: int = field(default=0, compare=False, repr=False)  # end column of the token


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Index:
    array: str
    index: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()  # position of the operator token


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: Pos = _pos()


Expr = Union[IntLit, Var, Index, Unary, Binary, Call]


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Decl:
    name: str
    length: Optional[int] = None  # arrays only
    init: Optional[Expr] = None
    is_input: bool = False
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    target: str
    index: Optional[Expr]
    value: Expr
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class CallStmt:
    call: Call
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Block:
    stmts: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    orelse: Optional["Stmt"]
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assert:
    cond: Expr
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assume:
    cond: Expr
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    sid: int = field(default=-1, compare=False, repr=False)
    pos: Pos = _pos()


Stmt = Union[Decl, Assign, CallStmt, Block, If, While, Assert, Assume, Return]


@dataclass(frozen=True)
class Param:
    name: str
    is_array: bool = False


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple
    returns_value: bool
    body: Block
    pos: Pos = _pos()


@dataclass(frozen=True)
class Module:
    """A parsed MiniC translation unit.

    ``body`` holds the top-level declarations and statements in source order;
    they run as the program's entry point.
    """

    defines: tuple  # ((name, value), ...)
    functions: tuple
    body: Block
    filename: str = field(default="<input>", compare=False)
    source: str = field(default="", compare=False, repr=False)

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        return None


def walk_expr(e):
    """Yield ``e`` and its subexpressions, children before parents."""
    if isinstance(e, Index):
        yield from walk_expr(e.index)
    elif isinstance(e, Unary):
        yield from walk_expr(e.operand)
    elif isinstance(e, Binary):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Call):
        for a in e.args:
            yield from walk_expr(a)
    yield e


def stmt_exprs(s):
    """Expressions evaluated directly by statement ``s`` (not nested statements)."""
    if isinstance(s, Decl):
        return [s.init] if s.init is not None else []
    if isinstance(s, Assign):
        return ([s.index] if s.index is not None else []) + [s.value]
    if isinstance(s, CallStmt):
        return [s.call]
    if isinstance(s, (If, While, Assert, Assume)):
        return [s.cond]
    if isinstance(s, Return):
        return [s.value] if s.value is not None else []
    return []


def walk_stmts(s):
    yield s
    if isinstance(s, Block):
        for t in s.stmts:
            yield from walk_stmts(t)
    elif isinstance(s, If):
        yield from walk_stmts(s.then)
        if s.orelse is not None:
            yield from walk_stmts(s.orelse)
    elif isinstance(s, While):
        yield from walk_stmts(s.body)
