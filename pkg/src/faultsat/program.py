"""Lowered program model: locations, guarded transitions and assertions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from faultsat.frontend.ast import Expr

# transition kinds
ASSIGN = "assign"  # var := expr
STORE = "store"  # var[index] := expr
INIT = "init"  # zero initialisation (scalar or whole array), always hard
GUARD = "guard"  # branch or loop condition (negated for the false edge)
ASSUME = "assume"  # user assumption, hard
UNWIND = "unwind"  # loop exit after the last unrolled copy: assume !cond, hard
SKIP = "skip"  # control only

HARD_KINDS = frozenset({INIT, ASSUME, UNWIND, SKIP})


@dataclass(frozen=True)
class VarDecl:
    name: str
    width: int
    role: str  # "input" or "local"
    length: Optional[int] = None  # arrays only


@dataclass(frozen=True)
class Transition:
    id: int
    source: int
    target: int
    kind: str
    sid: int  # source statement id (shared across unrollings and call sites)
    line: int
    col: int = 0
    var: Optional[str] = None
    index: Optional[Expr] = None
    expr: Optional[Expr] = None
    negated: bool = False
    branch: Optional[int] = None  # guard transitions of one branch point share this id
    loop: Optional[tuple] = None  # innermost (loop id, kappa)
    loops: tuple = ()  # full loop stack, outermost first
    trusted: bool = False
    func: Optional[str] = None

    @property
    def hard(self) -> bool:
        return self.trusted or self.kind in HARD_KINDS

    @property
    def kappa(self) -> Optional[int]:
        return self.loop[1] if self.loop else None


@dataclass(frozen=True)
class AssertionSpec:
    id: int
    location: int
    predicate: Expr
    line: int
    col: int
    kind: str  # explicit-assert | array-bounds | division-guard
    sid: int
    trusted: bool = False

    def describe(self) -> str:
        from faultsat.frontend.printer import format_expr

        return f"{self.kind} at line {self.line}: {format_expr(self.predicate)}"


@dataclass(frozen=True)
class StatementInfo:
    sid: int
    line: int
    col: int
    kind: str  # AST node class name
    func: Optional[str]
    trusted: bool
    constants: tuple = ()  # integer literals appearing in the statement


@dataclass
class Program:
    vars: list
    arrays: list
    locations: range
    initial_location: int
    final_location: int
    transitions: list
    assertions: list
    statement_table: dict  # transition id -> (line, col)
    statements: dict  # sid -> StatementInfo
    width: int
    bound: int
    filename: str = "<input>"
    ast: object = None
    trusted: frozenset = frozenset()
    _out: dict = field(default=None, repr=False, compare=False)
    _at: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        out = {loc: [] for loc in self.locations}
        for t in self.transitions:
            out[t.source].append(t)
        at = {loc: [] for loc in self.locations}
        for a in self.assertions:
            at[a.location].append(a)
        self._out, self._at = out, at

    def outgoing(self, loc) -> list:
        return self._out[loc]

    def assertions_at(self, loc) -> list:
        return self._at[loc]

    @property
    def inputs(self) -> list:
        return [v for v in self.vars + self.arrays if v.role == "input"]

    def decl(self, name) -> VarDecl:
        for v in self.vars:
            if v.name == name:
                return v
        for a in self.arrays:
            if a.name == name:
                return a
        raise KeyError(name)

    def assertion(self, aid) -> AssertionSpec:
        return self.assertions[aid]

    def soft_sids(self) -> list:
        return sorted({t.sid for t in self.transitions if not t.hard})
