"""Big-step interpreter for FSol over a simulated chain.

Casts never inspect the account they point at: ``C(x)`` simply retags the
address. Errors surface only when the address is used, as a
MessageNotUnderstood on a call or a NoFallback on a transfer, and any revert
rolls the whole transaction back.

Address values carry the static type they were produced at. The tag is what
the interpreter compares against declared parameter types when a function is
entered (TypeConfusion on a mismatch). Tags for ``msg.sender`` and for
``address(c)`` depend on the typing discipline the program was checked with,
so a :class:`Machine` is built for one discipline.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..checker.baseline import erase_external_param
from ..checker.refined import elaborate_legacy
from ..syntax import ast as A
from ..syntax.ast import TypeKind, TypeRepr
from ..syntax.hierarchy import ContractTable, FunctionInfo
from ..syntax.printer import format_addr
from .state import (
    ADDR_SPACE, MAX_DEPTH, UNIT_V, WORD, AddressOccupied,
    AddrV, BoolV, CallDepthExceeded, CallEv, ChainState, ContractInstance, ContractRefV,
    DeployError, ExternalAccount, FallbackRun, InsufficientBalance, MessageNotUnderstood,
    NoFallback, NonPayable, RequirementFailed, Revert, RevertBubble, Reverted, StateWrite,
    Success, Transaction, TransferEv, TypeConfusion, UInt160V, UIntV, UnitV, Value, value_kind,
)

_STACK_BYTES = 512 * 1024 * 1024
_RECURSION_LIMIT = 60000


@dataclass
class Frame:
    this: int
    sender: int
    value: int
    contract: str  # contract declaring the running body
    bound: str
    locals: Dict[str, Value]


class _Run:
    """Mutable context of one transaction or deployment."""

    def __init__(self, state: ChainState) -> None:
        self.state = state
        self.trace: List = []
        self.depth = 0


def default_value(ty: TypeRepr) -> Value:
    if ty.kind is TypeKind.UINT:
        return UIntV(0)
    if ty.kind is TypeKind.UINT160:
        return UInt160V(0)
    if ty.kind is TypeKind.BOOL:
        return BoolV(False)
    if ty.kind is TypeKind.CONTRACT:
        return ContractRefV(0, ty.contract)
    return AddrV(0, ty)


def _addr_of(v: Value) -> int:
    if isinstance(v, (AddrV, ContractRefV)):
        return v.addr
    raise TypeError(f"not an address value: {v!r}")


class Machine:
    def __init__(self, table: ContractTable, typing: str = "baseline") -> None:
        assert typing in ("baseline", "refined"), typing
        self.table = table
        self.refined = typing == "refined"

    # -- tags

    def conforms(self, v: Value, ty: TypeRepr) -> bool:
        """Whether ``v``'s runtime tag is acceptable where ``ty`` is declared."""
        if ty.kind is TypeKind.UINT:
            return isinstance(v, UIntV)
        if ty.kind is TypeKind.UINT160:
            return isinstance(v, UInt160V)
        if ty.kind is TypeKind.BOOL:
            return isinstance(v, BoolV)
        if ty.kind is TypeKind.CONTRACT:
            return isinstance(v, ContractRefV) and self.table.contract_le(v.contract, ty.contract)
        if not isinstance(v, AddrV):
            return False
        got, want = elaborate_legacy(v.tag), elaborate_legacy(ty)
        return self.table.contract_le(got.contract, want.contract)

    def actual_address_type(self, state: ChainState, addr: int) -> str:
        inst = state.instance(addr)
        return inst.contract if inst is not None else A.TOP_FB

    def decode_entry_arg(self, state: ChainState, raw: Value, ty: TypeRepr) -> Value:
        """Turn a transaction argument into a value of declared type ``ty``.

        Under baseline typing this is plain ABI decoding: an address becomes
        whatever address type the parameter declares. Under refined typing the
        address is tagged with the type of the account it actually names.
        """
        bad = Revert(TypeConfusion(str(ty), value_kind(raw)))
        if ty.kind is TypeKind.UINT:
            if isinstance(raw, UIntV) and raw.value < WORD:
                return raw
            raise bad
        if ty.kind is TypeKind.UINT160:
            if isinstance(raw, (UIntV, UInt160V)) and raw.value < ADDR_SPACE:
                return UInt160V(raw.value)
            raise bad
        if ty.kind is TypeKind.BOOL:
            if isinstance(raw, BoolV):
                return raw
            raise bad
        if not isinstance(raw, (AddrV, ContractRefV)):
            raise bad
        addr = raw.addr
        if not self.refined:
            return ContractRefV(addr, ty.contract) if ty.is_contract else AddrV(addr, ty)
        actual = self.actual_address_type(state, addr)
        v = ContractRefV(addr, actual) if ty.is_contract else AddrV(addr, A.ref_address(actual))
        if not self.conforms(v, ty):
            raise Revert(TypeConfusion(str(ty), f"{actual} at {format_addr(addr)}"))
        return v

    # -- public operations

    def deploy(self, state: ChainState, name: str, args: Sequence[Value], at: int,
               balance: int = 0, deployer: int = 0) -> ChainState:
        """Create an instance of ``name`` at ``at`` and run its constructor.

        Returns the new state; ``state`` itself is left untouched.
        """
        existing = state.get(at)
        if isinstance(existing, ContractInstance) or (existing is not None and existing.balance):
            raise AddressOccupied(f"address {format_addr(at)} is already occupied")
        if name not in self.table or self.table[name].synthetic:
            raise DeployError(f"unknown contract '{name}'")
        info = self.table[name]
        ctor = info.decl.ctor
        params = ctor.params if ctor is not None else ()
        if len(params) != len(args):
            raise DeployError(f"constructor of '{name}' takes {len(params)} argument(s), got {len(args)}")
        run = _Run(state.copy())
        fields = {v.name: default_value(v.type) for v, _ in info.state_vars}
        run.state.accounts[at] = ContractInstance(name, fields, balance)
        if ctor is not None:
            try:
                locals_ = {p.name: self.decode_entry_arg(run.state, a, p.type) for p, a in zip(params, args)}
                frame = Frame(at, deployer, 0, name, A.TOP_FB, locals_)
                run.depth = 1
                _deep(lambda: self.exec_block(run, frame, ctor.body))
            except Revert as r:
                raise DeployError(f"constructor of '{name}' reverted: {r.reason.explain()}", r.reason, r.site)
        return run.state

    def exec_transaction(self, state: ChainState, tx: Transaction) -> Tuple[ChainState, object]:
        """Run ``tx``; on revert the returned state is ``state`` itself."""
        origin = state.get(tx.sender)
        if isinstance(origin, ContractInstance):
            raise ValueError(f"transaction sender {format_addr(tx.sender)} is a contract")
        run = _Run(state.copy())
        try:
            result = _deep(lambda: self.call_function(
                run, tx.sender, tx.to, tx.fname, tuple(tx.args), tx.value, entry=True))
        except Revert as r:
            run.trace.append(RevertBubble(r.reason))
            return state, Reverted(r.reason, r.site, tuple(run.trace))
        return run.state, Success(None if isinstance(result, UnitV) else result, tuple(run.trace))

    # -- calls and transfers

    def call_function(self, run: _Run, caller: int, callee: int, fname: str,
                      args: Tuple[Value, ...], value: int, site=None, entry: bool = False,
                      expected: Optional[FunctionInfo] = None) -> Value:
        if run.depth >= MAX_DEPTH:
            raise Revert(CallDepthExceeded(), site)
        inst = run.state.instance(callee)
        fn = self.table.lookup_function(inst.contract, fname) if inst is not None else None
        if fn is None or (fn.decl.visibility == "private" and (entry or caller != callee)):
            raise Revert(MessageNotUnderstood(callee, fname), site)
        decl = fn.decl
        if len(decl.params) != len(args):
            raise Revert(TypeConfusion(f"{len(decl.params)} argument(s) for '{fn.owner}.{fname}'",
                                       f"{len(args)} argument(s)"), site)
        locals_: Dict[str, Value] = {}
        for p, a in zip(decl.params, args):
            if entry:
                a = self.decode_entry_arg(run.state, a, p.type)
            else:
                declared = p.type
                check = declared
                if not self.refined and decl.visibility == "external":
                    check = erase_external_param(declared)
                if not self.conforms(a, check):
                    raise Revert(TypeConfusion(f"{declared} for parameter '{p.name}' of '{fn.owner}.{fname}'",
                                               _describe(a)), site)
                if isinstance(a, AddrV) and check != declared:
                    a = AddrV(a.addr, declared)
            locals_[p.name] = a
        if value > 0 and not decl.payable:
            raise Revert(NonPayable(f"{fn.owner}.{fname}"), site)
        run.trace.append(CallEv(caller, callee, fname, args, value))
        if value:
            self._move(run, caller, callee, value, site)
        frame = Frame(callee, caller, value, fn.owner, decl.caller.bound, locals_)
        run.depth += 1
        try:
            result = self.exec_body(run, frame, decl.body, decl.returns)
        finally:
            run.depth -= 1
        if expected is not None and expected.decl.returns is not None:
            if not self.conforms(result, expected.decl.returns):
                raise Revert(TypeConfusion(f"{expected.decl.returns} returned from '{fname}'",
                                           _describe(result)), site)
        return result

    def _move(self, run: _Run, src: int, dst: int, amount: int, site) -> None:
        accounts = run.state.accounts
        have = run.state.balance(src)
        if have < amount:
            raise Revert(InsufficientBalance(src, amount, have), site)
        if src not in accounts:
            accounts[src] = ExternalAccount(0)
        accounts[src].balance -= amount
        if dst not in accounts:
            accounts[dst] = ExternalAccount(0)
        accounts[dst].balance += amount

    def do_transfer(self, run: _Run, sender: int, to: int, amount: int, site=None) -> None:
        self._move(run, sender, to, amount, site)
        run.trace.append(TransferEv(sender, to, amount))
        inst = run.state.instance(to)
        if inst is None:
            return
        fb = self.table[inst.contract].fallback
        if fb is None:
            raise Revert(NoFallback(to), site)
        if run.depth >= MAX_DEPTH:
            raise Revert(CallDepthExceeded(), site)
        body, owner = fb
        run.trace.append(FallbackRun(to))
        frame = Frame(to, sender, amount, owner, A.TOP, {})
        run.depth += 1
        try:
            self.exec_body(run, frame, body.body, None)
        finally:
            run.depth -= 1

    # -- statements

    def exec_body(self, run: _Run, frame: Frame, body, returns: Optional[TypeRepr]) -> Value:
        done, value = self.exec_block(run, frame, body)
        if done and value is not None:
            return value
        if returns is not None:
            return default_value(returns)
        return UNIT_V

    def exec_block(self, run: _Run, frame: Frame, block) -> Tuple[bool, Optional[Value]]:
        declared: List[str] = []
        try:
            for s in block:
                if isinstance(s, A.LocalDecl):
                    frame.locals[s.name] = self.eval(run, frame, s.init)
                    declared.append(s.name)
                elif isinstance(s, A.Assign):
                    self.assign(run, frame, s.name, self.eval(run, frame, s.value))
                elif isinstance(s, A.ExprStmt):
                    self.eval(run, frame, s.expr)
                elif isinstance(s, A.Return):
                    return True, (self.eval(run, frame, s.value) if s.value is not None else None)
                elif isinstance(s, A.Require):
                    if not self.eval(run, frame, s.cond).value:
                        raise Revert(RequirementFailed(), s.span)
                elif isinstance(s, A.If):
                    branch = s.then if self.eval(run, frame, s.cond).value else s.orelse
                    if branch is not None:
                        done, value = self.exec_block(run, frame, branch)
                        if done:
                            return done, value
                else:
                    raise TypeError(s)
            return False, None
        finally:
            for name in declared:
                frame.locals.pop(name, None)

    def assign(self, run: _Run, frame: Frame, name: str, v: Value) -> None:
        if name in frame.locals:
            frame.locals[name] = v
            return
        inst = run.state.instance(frame.this)
        old = inst.fields[name]
        inst.fields[name] = v
        run.trace.append(StateWrite(frame.this, name, old, v))

    # -- expressions

    def eval(self, run: _Run, frame: Frame, e: A.Expr) -> Value:
        if isinstance(e, A.Var):
            v = frame.locals.get(e.name)
            if v is None:
                v = run.state.instance(frame.this).fields[e.name]
            return v
        if isinstance(e, A.IntLit):
            return UIntV(e.value)
        if isinstance(e, A.BoolLit):
            return BoolV(e.value)
        if isinstance(e, A.AddrLit):
            return AddrV(e.value, A.PAYABLE_ADDRESS)
        if isinstance(e, A.This):
            return ContractRefV(frame.this, run.state.instance(frame.this).contract)
        if isinstance(e, A.MsgSender):
            tag = A.ref_address(frame.bound) if self.refined else A.PAYABLE_ADDRESS
            return AddrV(frame.sender, tag)
        if isinstance(e, A.MsgValue):
            return UIntV(frame.value)
        if isinstance(e, A.BinOp):
            return self.eval_binop(run, frame, e)
        if isinstance(e, A.Not):
            return BoolV(not self.eval(run, frame, e.operand).value)
        if isinstance(e, A.BalanceOf):
            return UIntV(run.state.balance(_addr_of(self.eval(run, frame, e.receiver))))
        if isinstance(e, A.Cast):
            return self.cast(self.eval(run, frame, e.operand), e.target)
        if isinstance(e, A.Transfer):
            to = _addr_of(self.eval(run, frame, e.receiver))
            amount = self.eval(run, frame, e.amount).value
            self.do_transfer(run, frame.this, to, amount, e.span)
            return UNIT_V
        if isinstance(e, A.Call):
            recv = self.eval(run, frame, e.receiver)
            args = tuple(self.eval(run, frame, a) for a in e.args)
            expected = self.table.lookup_function(recv.contract, e.fname)
            return self.call_function(run, frame.this, recv.addr, e.fname, args, 0,
                                      site=e.span, expected=expected)
        raise TypeError(e)

    def cast(self, v: Value, target: TypeRepr) -> Value:
        if target.is_contract:
            return ContractRefV(_addr_of(v), target.contract)
        if target.kind is TypeKind.UINT160:
            if isinstance(v, (AddrV, ContractRefV)):
                return UInt160V(v.addr)
            return UInt160V(v.value % ADDR_SPACE)
        if isinstance(v, UInt160V):
            return AddrV(v.value, A.PAYABLE_ADDRESS)
        if isinstance(v, ContractRefV):
            tag = A.ref_address(v.contract) if self.refined else A.BARE_ADDRESS
            return AddrV(v.addr, tag)
        return v

    def eval_binop(self, run: _Run, frame: Frame, e: A.BinOp) -> Value:
        op = e.op
        left = self.eval(run, frame, e.left)
        if op == "&&":
            return left if not left.value else self.eval(run, frame, e.right)
        if op == "||":
            return left if left.value else self.eval(run, frame, e.right)
        right = self.eval(run, frame, e.right)
        if op in A.EQ_OPS:
            same = _key(left) == _key(right)
            return BoolV(same if op == "==" else not same)
        a, b = left.value, right.value
        if op == "+":
            return UIntV((a + b) % WORD)
        if op == "-":
            return UIntV((a - b) % WORD)
        if op == "*":
            return UIntV((a * b) % WORD)
        if op == "<":
            return BoolV(a < b)
        if op == "<=":
            return BoolV(a <= b)
        if op == ">":
            return BoolV(a > b)
        if op == ">=":
            return BoolV(a >= b)
        raise ValueError(op)


def _key(v: Value):
    if isinstance(v, (AddrV, ContractRefV)):
        return ("addr", v.addr)
    return (type(v).__name__, v.value)


def _describe(v: Value) -> str:
    if isinstance(v, AddrV):
        return f"{v.tag} {format_addr(v.addr)}"
    if isinstance(v, ContractRefV):
        return f"{v.contract} at {format_addr(v.addr)}"
    return value_kind(v)


# Deep FSol call chains need far more Python frames than the default thread
# stack allows, so bodies run on a helper thread with a large stack.
_local = threading.local()


def _deep(fn):
    if getattr(_local, "deep", False):
        return fn()
    box: dict = {}

    def target() -> None:
        _local.deep = True
        try:
            box["result"] = fn()
        except BaseException as exc:  # re-raised on the calling thread
            box["error"] = exc

    old_limit = sys.getrecursionlimit()
    if old_limit < _RECURSION_LIMIT:
        sys.setrecursionlimit(_RECURSION_LIMIT)
    old_size = threading.stack_size()
    threading.stack_size(_STACK_BYTES)
    try:
        t = threading.Thread(target=target)
        t.start()
    finally:
        threading.stack_size(old_size)
    t.join()
    if "error" in box:
        raise box["error"]
    return box["result"]
