"""Recursive-descent parser for FSol.

Syntax errors are collected rather than raised: the parser resynchronises at
the next ``;`` or ``}`` and keeps going, so one run reports every error it can
find. ``parse`` wraps this and raises when anything went wrong.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from ..diagnostics import Diagnostic, DiagnosticError, error
from . import ast as A
from .lexer import Token, tokenize

_PRECEDENCE = [
    ("||",),
    ("&&",),
    A.EQ_OPS,
    A.ORDER_OPS,
    ("+", "-"),
    ("*",),
]


class _SyntaxError(Exception):
    def __init__(self, diag: Diagnostic) -> None:
        self.diag = diag


class Parser:
    def __init__(self, source: str, file: str = "<input>") -> None:
        self.file = file
        self.tokens, self.diags = tokenize(source, file)
        self.pos = 0
        self._reported: set = set()

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        return self.tok.is_(kind, text)

    def at_op(self, text: str) -> bool:
        return self.tok.is_("op", text)

    def at_kw(self, text: str) -> bool:
        return self.tok.is_("kw", text)

    def fail(self, what: str) -> _SyntaxError:
        t = self.tok
        if t.kind == "eof":
            msg = "unexpected end of input"
        else:
            msg = f"expected {what}, found '{t.text}'"
        return _SyntaxError(error("PARSE", msg, t.span))

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            raise self.fail(f"'{text}'")
        return self.advance()

    def expect_kw(self, text: str) -> Token:
        if not self.at_kw(text):
            raise self.fail(f"'{text}'")
        return self.advance()

    def expect_ident(self) -> Token:
        if not self.at("ident"):
            raise self.fail("identifier")
        return self.advance()

    def span_from(self, start: Token) -> A.Span:
        end = self.tokens[self.pos - 1].span.end if self.pos > 0 else start.span.end
        s = start.span
        return A.Span(s.file, s.line, s.col, s.start, max(end, s.start))

    def report(self, exc: _SyntaxError) -> None:
        key = exc.diag.span.start if exc.diag.span else None
        if key in self._reported:
            return
        self._reported.add(key)
        self.diags.append(exc.diag)

    def sync_statement(self) -> None:
        while not self.at("eof"):
            if self.at_op(";"):
                self.advance()
                return
            if self.at_op("}"):
                return
            self.advance()

    def sync_member(self) -> None:
        while not self.at("eof"):
            if self.at_op(";"):
                self.advance()
                return
            if self.at_op("}"):
                return
            if self.at_op("{"):
                self.skip_braces()
                return
            self.advance()

    def skip_braces(self) -> None:
        depth = 0
        while not self.at("eof"):
            t = self.advance()
            if t.is_("op", "{"):
                depth += 1
            elif t.is_("op", "}"):
                depth -= 1
                if depth == 0:
                    return

    # -- program structure

    def parse_program(self) -> A.Program:
        contracts = []
        while not self.at("eof"):
            try:
                contracts.append(self.parse_contract())
            except _SyntaxError as exc:
                self.report(exc)
                while not (self.at("eof") or self.at_kw("contract")):
                    self.advance()
        return A.Program(tuple(contracts))

    def parse_contract(self) -> A.ContractDecl:
        start = self.expect_kw("contract")
        name = self.expect_ident().text
        parent = None
        if self.at_kw("is"):
            self.advance()
            parent = self.expect_ident().text
        self.expect_op("{")
        state_vars: List[A.StateVar] = []
        functions: List[A.FunctionDecl] = []
        ctors: List[A.Constructor] = []
        fallbacks: List[A.Fallback] = []
        while not self.at_op("}"):
            if self.at("eof"):
                raise self.fail("'}'")
            try:
                member = self.parse_member()
            except _SyntaxError as exc:
                self.report(exc)
                self.sync_member()
                continue
            if isinstance(member, A.StateVar):
                state_vars.append(member)
            elif isinstance(member, A.FunctionDecl):
                functions.append(member)
            elif isinstance(member, A.Constructor):
                ctors.append(member)
            else:
                fallbacks.append(member)
        self.advance()
        span = self.span_from(start)
        for extra, what in ((ctors[1:], "constructor"), (fallbacks[1:], "fallback function")):
            for m in extra:
                self.diags.append(error("PARSE", f"contract '{name}' declares more than one {what}", m.span))
        return A.ContractDecl(
            name,
            parent,
            tuple(state_vars),
            ctors[0] if ctors else None,
            tuple(functions),
            fallbacks[0] if fallbacks else None,
            span=span,
        )

    def parse_member(self):
        start = self.tok
        if self.at_kw("constructor"):
            self.advance()
            params = self.parse_params()
            payable = self._opt_kw("payable")
            body = self.parse_block()
            return A.Constructor(params, payable, body, span=self.span_from(start))
        if self.at_kw("function"):
            self.advance()
            if self.at_op("("):
                self.advance()
                self.expect_op(")")
                self.expect_kw("external")
                self._opt_kw("payable")
                body = self.parse_block()
                return A.Fallback(body, span=self.span_from(start))
            return self.parse_function(start)
        ty = self.parse_type()
        name = self.expect_ident().text
        self.expect_op(";")
        return A.StateVar(ty, name, span=self.span_from(start))

    def _opt_kw(self, text: str) -> bool:
        if self.at_kw(text):
            self.advance()
            return True
        return False

    def parse_function(self, start: Token) -> A.FunctionDecl:
        name = self.expect_ident().text
        params = self.parse_params()
        caller = A.DEFAULT_CALLER
        ann = self.tok
        if self.at_op("<"):
            self.advance()
            bound = self.expect_ident().text
            self.expect_op(">")
            caller = A.CallerAnnotation(A.CallerKind.NAMED, bound, span=self.span_from(ann))
        elif self.at_kw("payback"):
            self.advance()
            caller = A.CallerAnnotation(A.CallerKind.PAYBACK, span=self.span_from(ann))
        if not any(self.at_kw(v) for v in A.VISIBILITIES):
            raise self.fail("visibility ('external', 'public' or 'private')")
        visibility = self.advance().text
        payable = self._opt_kw("payable")
        returns = None
        if self.at_kw("returns"):
            self.advance()
            self.expect_op("(")
            returns = self.parse_type()
            self.expect_op(")")
        body = self.parse_block()
        return A.FunctionDecl(
            name, params, caller, visibility, payable, returns, body,
            span=self.span_from(start),
        )

    def parse_params(self) -> Tuple[A.Param, ...]:
        self.expect_op("(")
        params = []
        if not self.at_op(")"):
            while True:
                start = self.tok
                ty = self.parse_type()
                name = self.expect_ident().text
                params.append(A.Param(ty, name, span=self.span_from(start)))
                if not self.at_op(","):
                    break
                self.advance()
        self.expect_op(")")
        return tuple(params)

    def parse_type(self) -> A.TypeRepr:
        t = self.tok
        if t.is_("kw", "uint"):
            self.advance()
            return A.UINT
        if t.is_("kw", "uint160"):
            self.advance()
            return A.UINT160
        if t.is_("kw", "bool"):
            self.advance()
            return A.BOOL
        if t.is_("kw", "address"):
            self.advance()
            if self.at_kw("payable"):
                self.advance()
                return A.PAYABLE_ADDRESS
            if self.at_op("<"):
                self.advance()
                name = self.expect_ident().text
                self.expect_op(">")
                return A.ref_address(name)
            return A.BARE_ADDRESS
        if t.kind == "ident":
            self.advance()
            return A.contract_type(t.text)
        raise self.fail("type")

    # -- statements

    def parse_block(self) -> Tuple[A.Stmt, ...]:
        self.expect_op("{")
        stmts = []
        while not self.at_op("}"):
            if self.at("eof"):
                raise self.fail("'}'")
            try:
                stmts.append(self.parse_stmt())
            except _SyntaxError as exc:
                self.report(exc)
                self.sync_statement()
        self.advance()
        return tuple(stmts)

    def _starts_decl(self) -> bool:
        t, nxt = self.tok, self.peek()
        if t.kind == "kw":
            if t.text in ("uint", "bool"):
                return True
            if t.text in ("uint160", "address"):
                return not nxt.is_("op", "(")
            return False
        return t.kind == "ident" and nxt.kind == "ident"

    def parse_stmt(self) -> A.Stmt:
        start = self.tok
        if self.at_kw("return"):
            self.advance()
            value = None if self.at_op(";") else self.parse_expr()
            self.expect_op(";")
            return A.Return(value, span=self.span_from(start))
        if self.at_kw("require"):
            self.advance()
            self.expect_op("(")
            cond = self.parse_expr()
            self.expect_op(")")
            self.expect_op(";")
            return A.Require(cond, span=self.span_from(start))
        if self.at_kw("if"):
            self.advance()
            self.expect_op("(")
            cond = self.parse_expr()
            self.expect_op(")")
            then = self.parse_block()
            orelse = None
            if self.at_kw("else"):
                self.advance()
                orelse = self.parse_block()
            return A.If(cond, then, orelse, span=self.span_from(start))
        if self._starts_decl():
            ty = self.parse_type()
            name = self.expect_ident().text
            self.expect_op("=")
            init = self.parse_expr()
            self.expect_op(";")
            return A.LocalDecl(ty, name, init, span=self.span_from(start))
        if self.at("ident") and self.peek().is_("op", "="):
            name = self.advance().text
            self.advance()
            value = self.parse_expr()
            self.expect_op(";")
            return A.Assign(name, value, span=self.span_from(start))
        expr = self.parse_expr()
        self.expect_op(";")
        return A.ExprStmt(expr, span=self.span_from(start))

    # -- expressions

    def parse_expr(self, level: int = 0) -> A.Expr:
        if level == len(_PRECEDENCE):
            return self.parse_unary()
        start = self.tok
        left = self.parse_expr(level + 1)
        while self.tok.kind == "op" and self.tok.text in _PRECEDENCE[level]:
            op = self.advance().text
            right = self.parse_expr(level + 1)
            left = A.BinOp(op, left, right, span=self.span_from(start))
        return left

    def parse_unary(self) -> A.Expr:
        start = self.tok
        if self.at_op("!"):
            self.advance()
            operand = self.parse_unary()
            return A.Not(operand, span=self.span_from(start))
        return self.parse_postfix()

    def parse_postfix(self) -> A.Expr:
        start = self.tok
        e = self.parse_primary()
        while self.at_op("."):
            self.advance()
            if self.at_kw("transfer"):
                self.advance()
                self.expect_op("(")
                amount = self.parse_expr()
                self.expect_op(")")
                e = A.Transfer(e, amount, span=self.span_from(start))
            elif self.at_kw("balance"):
                self.advance()
                e = A.BalanceOf(e, span=self.span_from(start))
            else:
                fname = self.expect_ident().text
                args = self.parse_args()
                e = A.Call(e, fname, args, span=self.span_from(start))
        return e

    def parse_args(self) -> Tuple[A.Expr, ...]:
        self.expect_op("(")
        args = []
        if not self.at_op(")"):
            while True:
                args.append(self.parse_expr())
                if not self.at_op(","):
                    break
                self.advance()
        self.expect_op(")")
        return tuple(args)

    def parse_primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.IntLit(t.value, span=t.span)
        if t.kind == "addr":
            self.advance()
            return A.AddrLit(t.value, span=t.span)
        if t.kind == "kw":
            if t.text in ("true", "false"):
                self.advance()
                return A.BoolLit(t.text == "true", span=t.span)
            if t.text == "this":
                self.advance()
                return A.This(span=t.span)
            if t.text == "msg.sender":
                self.advance()
                return A.MsgSender(span=t.span)
            if t.text == "msg.value":
                self.advance()
                return A.MsgValue(span=t.span)
            if t.text in ("address", "uint160") and self.peek().is_("op", "("):
                self.advance()
                target = A.BARE_ADDRESS if t.text == "address" else A.UINT160
                return self._cast_rest(t, target)
        if t.kind == "ident":
            self.advance()
            if self.at_op("("):
                return self._cast_rest(t, A.contract_type(t.text))
            return A.Var(t.text, span=t.span)
        if t.is_("op", "("):
            self.advance()
            e = self.parse_expr()
            self.expect_op(")")
            return e
        raise self.fail("expression")

    def _cast_rest(self, start: Token, target: A.TypeRepr) -> A.Expr:
        self.expect_op("(")
        operand = self.parse_expr()
        self.expect_op(")")
        return A.Cast(target, operand, span=self.span_from(start))


def parse_program(source: str, file: str = "<input>") -> Tuple[A.Program, List[Diagnostic]]:
    """Parse ``source``; returns the (possibly partial) program and all syntax errors."""
    p = Parser(source, file)
    program = p.parse_program()
    diags = sorted(p.diags, key=lambda d: d.span.start if d.span else -1)
    return program, diags


def parse(source: str, file: str = "<input>") -> A.Program:
    program, diags = parse_program(source, file)
    if diags:
        raise DiagnosticError(diags)
    return program
