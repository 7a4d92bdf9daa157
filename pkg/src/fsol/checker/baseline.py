"""Type rules of Solidity 0.5 as documented, loopholes included.

Notable acceptances:

* ``msg.sender`` and address literals are ``address payable``;
* casts from any address or contract value to a contract type are accepted
  without relating the two;
* ``address(uint160(a))`` turns any address into ``address payable``;
* ``address payable`` parameters of external functions accept plain
  ``address`` arguments, since the ABI does not distinguish the two.
"""

from __future__ import annotations

from typing import List

from ..diagnostics import Diagnostic
from ..syntax import ast as A
from ..syntax.ast import TypeKind, TypeRepr
from ..syntax.hierarchy import ContractTable, FunctionInfo
from .core import Checker, ExprType, TypeEnv


def erase_refined(table: ContractTable, ty: TypeRepr) -> TypeRepr:
    """Project a refined address type onto the two legacy address types."""
    if ty.kind is TypeKind.REF_ADDRESS:
        return A.PAYABLE_ADDRESS if table.contract_le(ty.contract, A.TOP_FB) else A.BARE_ADDRESS
    return ty


def erase_external_param(ty: TypeRepr) -> TypeRepr:
    return A.BARE_ADDRESS if ty.kind is TypeKind.PAYABLE_ADDRESS else ty


class BaselineChecker(Checker):
    prefix = "BAS"

    def convert(self, ty: TypeRepr) -> TypeRepr:
        return erase_refined(self.table, ty)

    def sender_type(self, bound: str) -> TypeRepr:
        return A.PAYABLE_ADDRESS

    def addr_lit_type(self) -> TypeRepr:
        return A.PAYABLE_ADDRESS

    def param_type(self, fn: FunctionInfo, p: A.Param) -> TypeRepr:
        ty = self.convert(p.type)
        if fn is not None and fn.decl.visibility == "external":
            return erase_external_param(ty)
        return ty

    def cast_type(self, env: TypeEnv, e: A.Cast, operand: TypeRepr) -> ExprType:
        target = e.target
        if target.is_contract:
            if operand.is_address or operand.is_contract:
                return target
        elif target.kind is TypeKind.UINT160:
            if operand.is_address or operand.kind in (TypeKind.UINT, TypeKind.UINT160):
                return A.UINT160
        elif target.kind is TypeKind.BARE_ADDRESS:
            if operand.kind is TypeKind.UINT160:
                return A.PAYABLE_ADDRESS
            if operand.is_contract:
                return A.BARE_ADDRESS
            if operand.is_address:
                return operand
        self.err("BAD-CAST", f"cannot convert {operand} to {target}", e.span)
        return None

    def transfer_receiver_ok(self, env: TypeEnv, e: A.Transfer, recv: TypeRepr) -> bool:
        if recv.kind is TypeKind.PAYABLE_ADDRESS:
            return True
        if recv.kind is TypeKind.BARE_ADDRESS:
            msg = "'transfer' is only available on 'address payable', not 'address'"
        else:
            msg = f"'transfer' is only available on 'address payable', not {recv}"
        self.err("TRANSFER-NONPAYABLE", msg, e.span)
        return False


def check_baseline(program: A.Program, table: ContractTable) -> List[Diagnostic]:
    return BaselineChecker(program, table).run()


def baseline_type_of(env: TypeEnv, table: ContractTable, e: A.Expr):
    """Type ``e`` under ``env``; returns ``(type, diagnostics)``."""
    checker = BaselineChecker(A.Program(), table)
    ty = checker.type_of(env, e)
    return ty, checker.diags


def baseline_env(table: ContractTable, contract: str, **locals_) -> TypeEnv:
    checker = BaselineChecker(A.Program(), table)
    env = checker.new_env(contract, A.TOP, None, has_value=True)
    for name, ty in locals_.items():
        env.declare(name, checker.convert(ty))
    return env
