"""Pretty-printer for MiniC ASTs. Re-parsing the output gives an equal tree."""

from __future__ import annotations

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
)

PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    "<=": 7,
    ">": 7,
    ">=": 7,
    "<<": 8,
    ">>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}


def format_expr(e, parent_prec=0, right=False) -> str:
    if isinstance(e, IntLit):
        return e.macro if e.macro else str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{e.array}[{format_expr(e.index)}]"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, Unary):
        inner = format_expr(e.operand, 11)
        if isinstance(e.operand, Unary) or (isinstance(e.operand, IntLit) and e.op == "-" and not e.operand.macro):
            inner = f"({inner})"  # keeps "-(5)" from re-parsing as the literal -5
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        p = PRECEDENCE[e.op]
        text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p, right=True)}"
        if p < parent_prec or (right and p == parent_prec):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {e!r}")


def _block_lines(block, indent):
    out = []
    for s in block.stmts:
        out.extend(format_stmt(s, indent))
    return out


def format_stmt(s, indent=0) -> list:
    pad = "    " * indent
    if isinstance(s, Block):
        return [pad + "{"] + _block_lines(s, indent + 1) + [pad + "}"]
    if isinstance(s, Decl):
        head = "input int" if s.is_input else "int"
        text = f"{head} {s.name}"
        if s.length is not None:
            text += f"[{s.length}]"
        if s.init is not None:
            text += f" = {format_expr(s.init)}"
        return [pad + text + ";"]
    if isinstance(s, Assign):
        target = s.target if s.index is None else f"{s.target}[{format_expr(s.index)}]"
        return [f"{pad}{target} = {format_expr(s.value)};"]
    if isinstance(s, CallStmt):
        return [pad + format_expr(s.call) + ";"]
    if isinstance(s, If):
        lines = [f"{pad}if ({format_expr(s.cond)}) {{"] + _block_lines(s.then, indent + 1)
        if s.orelse is not None:
            lines += [pad + "} else {"] + _block_lines(s.orelse, indent + 1)
        return lines + [pad + "}"]
    if isinstance(s, While):
        return [f"{pad}while ({format_expr(s.cond)}) {{"] + _block_lines(s.body, indent + 1) + [pad + "}"]
    if isinstance(s, Assert):
        return [f"{pad}assert({format_expr(s.cond)});"]
    if isinstance(s, Assume):
        return [f"{pad}assume({format_expr(s.cond)});"]
    if isinstance(s, Return):
        return [pad + ("return;" if s.value is None else f"return {format_expr(s.value)};")]
    raise TypeError(f"not a statement: {s!r}")


def format_module(mod) -> str:
    lines = [f"#define {name} {value}" for name, value in mod.defines]
    for f in mod.functions:
        params = ", ".join(f"int {p.name}[]" if p.is_array else f"int {p.name}" for p in f.params)
        rtype = "int" if f.returns_value else "void"
        lines.append(f"{rtype} {f.name}({params}) {{")
        lines.extend(_block_lines(f.body, 1))
        lines.append("}")
    lines.extend(_block_lines(mod.body, 0))
    return "\n".join(lines) + "\n"
