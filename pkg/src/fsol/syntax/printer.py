"""Canonical pretty-printer. Output always reparses to an equal AST."""

from __future__ import annotations

from typing import List

from . import ast as A

INDENT = "    "

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6}
_UNARY = 7
_POSTFIX = 8


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.BinOp):
        return _PREC[e.op]
    if isinstance(e, A.Not):
        return _UNARY
    return _POSTFIX


def format_addr(value: int) -> str:
    return f"0x{value:040x}"


def format_type(t: A.TypeRepr) -> str:
    return str(t)


def format_expr(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.AddrLit):
        return format_addr(e.value)
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.This):
        return "this"
    if isinstance(e, A.MsgSender):
        return "msg.sender"
    if isinstance(e, A.MsgValue):
        return "msg.value"
    if isinstance(e, A.Cast):
        return f"{format_type(e.target)}({format_expr(e.operand)})"
    if isinstance(e, A.Not):
        inner = format_expr(e.operand)
        if _prec(e.operand) < _UNARY:
            inner = f"({inner})"
        return "!" + inner
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        left = format_expr(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = format_expr(e.right)
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    recv = format_expr(e.receiver)
    if _prec(e.receiver) < _POSTFIX:
        recv = f"({recv})"
    if isinstance(e, A.Call):
        return f"{recv}.{e.fname}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, A.Transfer):
        return f"{recv}.transfer({format_expr(e.amount)})"
    if isinstance(e, A.BalanceOf):
        return f"{recv}.balance"
    raise TypeError(f"not an expression: {e!r}")


def _block(stmts, depth: int, out: List[str]) -> None:
    for s in stmts:
        _stmt(s, depth, out)


def _stmt(s: A.Stmt, depth: int, out: List[str]) -> None:
    pad = INDENT * depth
    if isinstance(s, A.LocalDecl):
        out.append(f"{pad}{format_type(s.type)} {s.name} = {format_expr(s.init)};")
    elif isinstance(s, A.Assign):
        out.append(f"{pad}{s.name} = {format_expr(s.value)};")
    elif isinstance(s, A.ExprStmt):
        out.append(f"{pad}{format_expr(s.expr)};")
    elif isinstance(s, A.Return):
        out.append(f"{pad}return;" if s.value is None else f"{pad}return {format_expr(s.value)};")
    elif isinstance(s, A.Require):
        out.append(f"{pad}require({format_expr(s.cond)});")
    elif isinstance(s, A.If):
        out.append(f"{pad}if ({format_expr(s.cond)}) {{")
        _block(s.then, depth + 1, out)
        if s.orelse is not None:
            out.append(f"{pad}}} else {{")
            _block(s.orelse, depth + 1, out)
        out.append(f"{pad}}}")
    else:
        raise TypeError(f"not a statement: {s!r}")


def _params(params) -> str:
    return ", ".join(f"{format_type(p.type)} {p.name}" for p in params)


def _caller(c: A.CallerAnnotation) -> str:
    if c.kind is A.CallerKind.PAYBACK:
        return " payback"
    if c.kind is A.CallerKind.NAMED:
        return f" <{c.name}>"
    return ""


def format_contract(c: A.ContractDecl) -> str:
    """State variables first, then constructor, functions and fallback, blank-line separated."""
    pad = INDENT
    sections: List[List[str]] = []
    if c.state_vars:
        sections.append([f"{pad}{format_type(v.type)} {v.name};" for v in c.state_vars])
    if c.ctor is not None:
        payable = " payable" if c.ctor.payable else ""
        lines = [f"{pad}constructor({_params(c.ctor.params)}){payable} {{"]
        _block(c.ctor.body, 2, lines)
        sections.append(lines + [pad + "}"])
    for f in c.functions:
        sig = f"{pad}function {f.name}({_params(f.params)}){_caller(f.caller)} {f.visibility}"
        if f.payable:
            sig += " payable"
        if f.returns is not None:
            sig += f" returns ({format_type(f.returns)})"
        lines = [sig + " {"]
        _block(f.body, 2, lines)
        sections.append(lines + [pad + "}"])
    if c.fallback is not None:
        lines = [f"{pad}function() external payable {{"]
        _block(c.fallback.body, 2, lines)
        sections.append(lines + [pad + "}"])
    head = f"contract {c.name}"
    if c.parent is not None:
        head += f" is {c.parent}"
    out = [head + " {"]
    for i, sec in enumerate(sections):
        if i:
            out.append("")
        out.extend(sec)
    out.append("}")
    return "\n".join(out) + "\n"


def pretty_print(p: A.Program) -> str:
    return "\n".join(format_contract(c) for c in p.contracts)
