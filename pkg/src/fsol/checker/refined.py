"""Refined typing: ``address<C>``, caller bounds and ``payback``.

Legacy address types are read as ``address<Top>`` (plain ``address``) and
``address<Top_fb>`` (``address payable``). Inside a function whose caller
bound is ``B``, ``msg.sender`` has type ``address<B>``; a call is accepted only
when the calling contract is a subtype of the callee's bound. Casts to
contract types must be upcasts, and converting a ``uint160`` back to an
address yields ``address<Top>``, which cannot receive transfers.

On top of the expression rules, two body-level rules keep reference-typed
values honest at runtime: every state variable of a precise reference type
(``C`` or ``address<C>`` for a user contract ``C``) must be initialised by the
constructor before anything can observe it, and functions with a return type
must return on every path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from ..diagnostics import Diagnostic
from ..syntax import ast as A
from ..syntax.ast import TypeKind, TypeRepr
from ..syntax.hierarchy import ContractTable, FunctionInfo
from .core import Checker, ExprType, TypeEnv


def elaborate_legacy(ty: TypeRepr) -> TypeRepr:
    if ty.kind is TypeKind.BARE_ADDRESS:
        return A.ref_address(A.TOP)
    if ty.kind is TypeKind.PAYABLE_ADDRESS:
        return A.ref_address(A.TOP_FB)
    return ty


def needs_init(ty: TypeRepr) -> bool:
    ty = elaborate_legacy(ty)
    return ty.contract is not None and ty.contract not in A.RESERVED_CONTRACTS


def definitely_returns(block) -> bool:
    for s in block:
        if isinstance(s, A.Return):
            return True
        if isinstance(s, A.If) and s.orelse is not None:
            if definitely_returns(s.then) and definitely_returns(s.orelse):
                return True
    return False


def _interacts(e: A.Expr) -> bool:
    return any(isinstance(x, (A.Call, A.Transfer)) for x in A.iter_exprs(e))


def _reads(e: A.Expr, names: Set[str]) -> bool:
    return any(isinstance(x, A.Var) and x.name in names for x in A.iter_exprs(e))


class RefinedChecker(Checker):
    prefix = "REF"

    def __init__(self, program: A.Program, table: ContractTable) -> None:
        super().__init__(program, table)
        self._laundered: Set[int] = set()
        # (operand type, target) for every accepted contract cast.
        self.cast_log: List[Tuple[TypeRepr, TypeRepr]] = []

    def convert(self, ty: TypeRepr) -> TypeRepr:
        return elaborate_legacy(ty)

    def sender_type(self, bound: str) -> TypeRepr:
        return A.ref_address(bound)

    def addr_lit_type(self) -> TypeRepr:
        return A.ref_address(A.TOP_FB)

    def cast_type(self, env: TypeEnv, e: A.Cast, operand: TypeRepr) -> ExprType:
        target = e.target
        if target.is_contract:
            if operand.kind in (TypeKind.REF_ADDRESS, TypeKind.CONTRACT):
                if self.table.contract_le(operand.contract, target.contract):
                    self.cast_log.append((operand, target))
                    return target
                self.err(
                    "BAD-CAST",
                    f"cast from {operand} to {target} is not an upcast: "
                    f"'{operand.contract}' is not a subtype of '{target.contract}'",
                    e.span,
                )
                return None
        elif target.kind is TypeKind.UINT160:
            if operand.is_address or operand.kind in (TypeKind.UINT, TypeKind.UINT160):
                return A.UINT160
        elif target.kind is TypeKind.BARE_ADDRESS:
            if operand.kind is TypeKind.UINT160:
                self._laundered.add(id(e))
                return A.ref_address(A.TOP)
            if operand.kind in (TypeKind.CONTRACT, TypeKind.REF_ADDRESS):
                return A.ref_address(operand.contract)
        self.err("BAD-CAST", f"cannot convert {operand} to {target}", e.span)
        return None

    def _is_laundered(self, e: A.Expr) -> bool:
        return id(e) in self._laundered

    def transfer_receiver_ok(self, env: TypeEnv, e: A.Transfer, recv: TypeRepr) -> bool:
        if recv.kind is TypeKind.REF_ADDRESS and self.table.contract_le(recv.contract, A.TOP_FB):
            return True
        if self._is_laundered(e.receiver):
            self.err(
                "TRANSFER-NOFALLBACK",
                "cannot transfer to address<Top>: an address rebuilt from uint160 may name "
                "a contract without a fallback function",
                e.span,
            )
        elif recv.kind is TypeKind.REF_ADDRESS:
            self.err(
                "TRANSFER-NOFALLBACK",
                f"cannot transfer to {recv}: '{recv.contract}' is not a subtype of 'Top_fb' "
                "(it may have no fallback function)",
                e.span,
            )
        else:
            self.err("TRANSFER-NOFALLBACK", f"'transfer' needs an address<C> receiver with a fallback, found {recv}", e.span)
        return False

    def mismatch(self, expr: A.Expr, got: TypeRepr, want: TypeRepr, what: str, span) -> None:
        if self._is_laundered(expr) and want.kind is TypeKind.REF_ADDRESS:
            self.err(
                "ADDR-LAUNDER",
                f"{what}: an address rebuilt from uint160 has type {got}, not {want}",
                span,
            )
        else:
            super().mismatch(expr, got, want, what, span)

    def check_call_extra(self, env: TypeEnv, e: A.Call, fn: FunctionInfo) -> None:
        diag = check_call_constraint(self.table, env.contract, refined_signature(fn), e.span)
        if diag is not None:
            self.diags.append(diag)

    def extra_function_checks(self, c: A.ContractDecl, f: A.FunctionDecl) -> None:
        if f.returns is not None and not definitely_returns(f.body):
            self.err("MISSING-RETURN", f"function '{f.name}' may finish without returning a {f.returns}", f.span)

    def extra_contract_checks(self, c: A.ContractDecl) -> None:
        info = self.table[c.name]
        required = [v.name for v, _ in info.state_vars if needs_init(v.type)]
        if not required:
            return
        if c.ctor is None:
            self.err(
                "UNINIT-FIELD",
                f"contract '{c.name}' has no constructor to initialise {_names(required)}",
                c.span,
            )
            return
        pending = set(required)
        shadowed = {p.name for p in c.ctor.params}
        for s in c.ctor.body:
            if not pending:
                return
            visible = pending - shadowed
            if isinstance(s, (A.Assign, A.LocalDecl)):
                rhs = s.init if isinstance(s, A.LocalDecl) else s.value
                if not _interacts(rhs) and not _reads(rhs, visible):
                    if isinstance(s, A.LocalDecl):
                        shadowed.add(s.name)
                    elif s.name in visible:
                        pending.discard(s.name)
                    continue
            self.err(
                "UNINIT-FIELD",
                f"statement may observe {_names(sorted(visible, key=required.index))} "
                "before the constructor initialises it",
                s.span,
            )
            return
        if pending:
            self.err(
                "UNINIT-FIELD",
                f"constructor of '{c.name}' does not initialise {_names(sorted(pending, key=required.index))}",
                c.ctor.span,
            )


def _names(names) -> str:
    return ", ".join(f"'{n}'" for n in names)


@dataclass(frozen=True)
class RefinedSig:
    owner: str
    name: str
    params: Tuple[TypeRepr, ...]
    returns: Optional[TypeRepr]
    caller_bound: str
    visibility: str
    payable: bool


def refined_signature(fn: FunctionInfo) -> RefinedSig:
    d = fn.decl
    return RefinedSig(
        fn.owner,
        d.name,
        tuple(elaborate_legacy(p.type) for p in d.params),
        elaborate_legacy(d.returns) if d.returns is not None else None,
        d.caller.bound,
        d.visibility,
        d.payable,
    )


def check_call_constraint(
    table: ContractTable, caller_contract: str, callee: RefinedSig, span=None
) -> Optional[Diagnostic]:
    """None when ``caller_contract`` may call ``callee``; a REF-CALLER-CONSTRAINT otherwise."""
    bound = callee.caller_bound
    if table.contract_le(caller_contract, bound):
        return None
    return Diagnostic(
        "error",
        "REF-CALLER-CONSTRAINT",
        f"caller type '{caller_contract}' is not a subtype of '{bound}', "
        f"the caller bound of '{callee.owner}.{callee.name}'",
        span,
    )


def check_refined(program: A.Program, table: ContractTable) -> List[Diagnostic]:
    return RefinedChecker(program, table).run()


def refined_type_of(env: TypeEnv, table: ContractTable, e: A.Expr):
    """Type ``e`` under ``env``; returns ``(type, diagnostics)``."""
    checker = RefinedChecker(A.Program(), table)
    ty = checker.type_of(env, e)
    return ty, checker.diags


def refined_env(table: ContractTable, contract: str, bound: str = A.TOP, **locals_) -> TypeEnv:
    checker = RefinedChecker(A.Program(), table)
    env = checker.new_env(contract, bound, None, has_value=True)
    for name, ty in locals_.items():
        env.declare(name, elaborate_legacy(ty))
    return env
