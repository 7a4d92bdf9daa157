"""Machinery shared by the baseline and refined checkers.

A checker walks every body once in source order. Expression typing returns a
``TypeRepr``, the ``UNIT`` marker for expressions that produce no value, or
``None`` when an error has already been reported for the subexpression (so
one mistake yields one diagnostic).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from ..diagnostics import Diagnostic, error, sort_diagnostics
from ..syntax import ast as A
from ..syntax.ast import TypeKind, TypeRepr
from ..syntax.hierarchy import ContractTable, FunctionInfo


class _Unit:
    def __repr__(self) -> str:
        return "unit"

    __str__ = __repr__


UNIT = _Unit()
ExprType = Union[TypeRepr, _Unit, None]

MAX_UINT = (1 << 256) - 1


@dataclass
class TypeEnv:
    contract: str
    sender: TypeRepr
    bound: str
    returns: Optional[TypeRepr]
    has_value: bool  # inside a function (vs constructor/fallback); governs `return e`
    scopes: List[Dict[str, TypeRepr]] = field(default_factory=lambda: [{}])

    @property
    def this_type(self) -> TypeRepr:
        return A.contract_type(self.contract)

    def lookup_local(self, name: str) -> Optional[TypeRepr]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def declare(self, name: str, ty: TypeRepr) -> bool:
        if self.lookup_local(name) is not None:
            return False
        self.scopes[-1][name] = ty
        return True


class Checker:
    prefix = "X"

    def __init__(self, program: A.Program, table: ContractTable) -> None:
        self.program = program
        self.table = table
        self.diags: List[Diagnostic] = []

    # -- hooks

    def convert(self, ty: TypeRepr) -> TypeRepr:
        """Map a written type into the checker's own lattice."""
        return ty

    def sender_type(self, bound: str) -> TypeRepr:
        raise NotImplementedError

    def addr_lit_type(self) -> TypeRepr:
        raise NotImplementedError

    def cast_type(self, env: TypeEnv, e: A.Cast, operand: TypeRepr) -> ExprType:
        raise NotImplementedError

    def transfer_receiver_ok(self, env: TypeEnv, e: A.Transfer, recv: TypeRepr) -> bool:
        raise NotImplementedError

    def param_type(self, fn: FunctionInfo, p: A.Param) -> TypeRepr:
        return self.convert(p.type)

    def check_call_extra(self, env: TypeEnv, e: A.Call, fn: FunctionInfo) -> None:
        pass

    def mismatch(self, expr: A.Expr, got: TypeRepr, want: TypeRepr, what: str, span) -> None:
        self.err("TYPE-MISMATCH", f"{what}: expected {want}, found {got}", span)

    def extra_contract_checks(self, c: A.ContractDecl) -> None:
        pass

    def extra_function_checks(self, c: A.ContractDecl, f: A.FunctionDecl) -> None:
        pass

    # -- driver

    def err(self, code: str, message: str, span) -> None:
        self.diags.append(error(f"{self.prefix}-{code}", message, span))

    def run(self) -> List[Diagnostic]:
        for c in self.program.contracts:
            if c.name not in self.table or self.table[c.name].decl is not c:
                continue
            self.check_contract(c)
        return sort_diagnostics(self.diags)

    def check_contract(self, c: A.ContractDecl) -> None:
        if c.ctor is not None:
            env = self.new_env(c.name, A.TOP_FB, None, has_value=False)
            for p in c.ctor.params:
                env.declare(p.name, self.convert(p.type))
            self.check_block(env, c.ctor.body)
        for f in c.functions:
            env = self.new_env(c.name, f.caller.bound, f.returns, has_value=True)
            info = self.table[c.name].functions.get(f.name)
            for p in f.params:
                ty = self.param_type(info, p) if info else self.convert(p.type)
                env.declare(p.name, ty)
            self.check_block(env, f.body)
            self.extra_function_checks(c, f)
        if c.fallback is not None:
            env = self.new_env(c.name, A.TOP, None, has_value=False)
            self.check_block(env, c.fallback.body)
        self.extra_contract_checks(c)

    def new_env(self, contract: str, bound: str, returns, has_value: bool) -> TypeEnv:
        return TypeEnv(
            contract=contract,
            sender=self.sender_type(bound),
            bound=bound,
            returns=self.convert(returns) if returns is not None else None,
            has_value=has_value,
        )

    # -- statements

    def check_block(self, env: TypeEnv, block) -> None:
        env.scopes.append({})
        for s in block:
            self.check_stmt(env, s)
        env.scopes.pop()

    def check_stmt(self, env: TypeEnv, s: A.Stmt) -> None:
        if isinstance(s, A.LocalDecl):
            declared = self.convert(s.type)
            got = self.value_type(env, s.init)
            if got is not None and not self.table.subtype(got, declared):
                self.mismatch(s.init, got, declared, f"cannot initialise '{s.name}'", s.span)
            if not env.declare(s.name, declared):
                self.err("DUP-LOCAL", f"'{s.name}' is already declared in this scope", s.span)
        elif isinstance(s, A.Assign):
            target = self.var_type(env, s.name)
            got = self.value_type(env, s.value)
            if target is None:
                self.err("UNDECLARED", f"assignment to undeclared variable '{s.name}'", s.span)
            elif got is not None and not self.table.subtype(got, target):
                self.mismatch(s.value, got, target, f"cannot assign to '{s.name}'", s.span)
        elif isinstance(s, A.ExprStmt):
            self.type_of(env, s.expr)
        elif isinstance(s, A.Return):
            if s.value is None:
                if env.returns is not None:
                    self.err("RETURN", f"missing return value of type {env.returns}", s.span)
            else:
                got = self.value_type(env, s.value)
                if env.returns is None:
                    self.err("RETURN", "this body does not return a value", s.span)
                elif got is not None and not self.table.subtype(got, env.returns):
                    self.mismatch(s.value, got, env.returns, "wrong return type", s.span)
        elif isinstance(s, A.Require):
            self.expect(env, s.cond, A.BOOL, "require condition")
        elif isinstance(s, A.If):
            self.expect(env, s.cond, A.BOOL, "if condition")
            self.check_block(env, s.then)
            if s.orelse is not None:
                self.check_block(env, s.orelse)
        else:
            raise TypeError(s)

    # -- expressions

    def var_type(self, env: TypeEnv, name: str) -> Optional[TypeRepr]:
        ty = env.lookup_local(name)
        if ty is not None:
            return ty
        v = self.table[env.contract].state_var(name)
        return self.convert(v.type) if v is not None else None

    def expect(self, env: TypeEnv, e: A.Expr, want: TypeRepr, what: str) -> None:
        got = self.value_type(env, e)
        if got is not None and not self.table.subtype(got, want):
            self.mismatch(e, got, want, what, e.span)

    def value_type(self, env: TypeEnv, e: A.Expr) -> Optional[TypeRepr]:
        ty = self.type_of(env, e)
        if ty is UNIT:
            self.err("NO-VALUE", "expression does not produce a value", e.span)
            return None
        return ty

    def type_of(self, env: TypeEnv, e: A.Expr) -> ExprType:
        if isinstance(e, A.IntLit):
            if e.value > MAX_UINT:
                self.err("LITERAL-RANGE", "integer literal does not fit in 256 bits", e.span)
                return None
            return A.UINT
        if isinstance(e, A.BoolLit):
            return A.BOOL
        if isinstance(e, A.AddrLit):
            return self.addr_lit_type()
        if isinstance(e, A.Var):
            ty = self.var_type(env, e.name)
            if ty is None:
                self.err("UNDECLARED", f"undeclared identifier '{e.name}'", e.span)
            return ty
        if isinstance(e, A.This):
            return env.this_type
        if isinstance(e, A.MsgSender):
            return env.sender
        if isinstance(e, A.MsgValue):
            return A.UINT
        if isinstance(e, A.Not):
            self.expect(env, e.operand, A.BOOL, "operand of '!'")
            return A.BOOL
        if isinstance(e, A.BinOp):
            return self.binop_type(env, e)
        if isinstance(e, A.BalanceOf):
            recv = self.value_type(env, e.receiver)
            if recv is not None and not (recv.is_address or recv.is_contract):
                self.err("OPERAND", f"'.balance' needs an address or contract, found {recv}", e.span)
            return A.UINT
        if isinstance(e, A.Cast):
            operand = self.value_type(env, e.operand)
            if operand is None:
                return None
            return self.cast_type(env, e, operand)
        if isinstance(e, A.Transfer):
            recv = self.value_type(env, e.receiver)
            self.expect(env, e.amount, A.UINT, "transfer amount")
            if recv is not None:
                self.transfer_receiver_ok(env, e, recv)
            return UNIT
        if isinstance(e, A.Call):
            return self.call_type(env, e)
        raise TypeError(e)

    def binop_type(self, env: TypeEnv, e: A.BinOp) -> ExprType:
        if e.op in A.ARITH_OPS or e.op in A.ORDER_OPS:
            self.expect(env, e.left, A.UINT, f"left operand of '{e.op}'")
            self.expect(env, e.right, A.UINT, f"right operand of '{e.op}'")
            return A.UINT if e.op in A.ARITH_OPS else A.BOOL
        if e.op in A.LOGIC_OPS:
            self.expect(env, e.left, A.BOOL, f"left operand of '{e.op}'")
            self.expect(env, e.right, A.BOOL, f"right operand of '{e.op}'")
            return A.BOOL
        left = self.value_type(env, e.left)
        right = self.value_type(env, e.right)
        if left is not None and right is not None and not comparable(left, right):
            self.err("OPERAND", f"cannot compare {left} with {right}", e.span)
        return A.BOOL

    def call_type(self, env: TypeEnv, e: A.Call) -> ExprType:
        recv = self.value_type(env, e.receiver)
        arg_types = [self.value_type(env, a) for a in e.args]
        if recv is None:
            return None
        if not recv.is_contract:
            self.err("NOT-CONTRACT", f"cannot call '{e.fname}' on a value of type {recv}", e.span)
            return None
        fn = self.table.lookup_function(recv.contract, e.fname)
        if fn is None:
            self.err("UNKNOWN-MEMBER", f"contract '{recv.contract}' has no function '{e.fname}'", e.span)
            return None
        if fn.decl.visibility == "private" and not (
            isinstance(e.receiver, A.This) and fn.owner == env.contract
        ):
            self.err("VISIBILITY", f"private function '{fn.owner}.{e.fname}' is only callable on 'this' from '{fn.owner}'", e.span)
        params = fn.decl.params
        if len(params) != len(e.args):
            self.err("ARITY", f"'{fn.owner}.{e.fname}' expects {len(params)} argument(s), got {len(e.args)}", e.span)
        else:
            for i, (p, a, got) in enumerate(zip(params, e.args, arg_types)):
                want = self.param_type(fn, p)
                if got is not None and not self.table.subtype(got, want):
                    self.mismatch(a, got, want, f"argument {i + 1} of '{fn.owner}.{e.fname}'", a.span)
        self.check_call_extra(env, e, fn)
        if fn.decl.returns is None:
            return UNIT
        return self.convert(fn.decl.returns)


def comparable(a: TypeRepr, b: TypeRepr) -> bool:
    if a.is_address and b.is_address:
        return True
    if a.is_contract and b.is_contract:
        return True
    return a.kind is b.kind and a.kind in (TypeKind.UINT, TypeKind.UINT160, TypeKind.BOOL)
