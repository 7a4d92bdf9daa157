"""Runtime values, accounts, chain state and transaction outcomes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from ..syntax import ast as A
from ..syntax.ast import Span, TypeRepr
from ..syntax.printer import format_addr

WORD = 1 << 256
ADDR_SPACE = 1 << 160
MAX_DEPTH = 1024


# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class UIntV:
    value: int


@dataclass(frozen=True)
class UInt160V:
    value: int


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class AddrV:
    """An address with the address type it was produced at."""

    addr: int
    tag: TypeRepr = A.BARE_ADDRESS


@dataclass(frozen=True)
class ContractRefV:
    addr: int
    contract: str


@dataclass(frozen=True)
class UnitV:
    pass


Value = Union[UIntV, UInt160V, BoolV, AddrV, ContractRefV, UnitV]
UNIT_V = UnitV()


def value_to_json(v: Value):
    if isinstance(v, UIntV):
        return {"uint": str(v.value)}
    if isinstance(v, UInt160V):
        return {"uint160": str(v.value)}
    if isinstance(v, BoolV):
        return {"bool": v.value}
    if isinstance(v, AddrV):
        return {"address": format_addr(v.addr), "tag": str(v.tag)}
    if isinstance(v, ContractRefV):
        return {"contract": v.contract, "address": format_addr(v.addr)}
    return {"unit": None}


def value_kind(v: Value) -> str:
    return {
        UIntV: "uint", UInt160V: "uint160", BoolV: "bool",
        AddrV: "address", ContractRefV: "contract", UnitV: "unit",
    }[type(v)]


# ---------------------------------------------------------------- accounts


@dataclass
class ExternalAccount:
    balance: int = 0


@dataclass
class ContractInstance:
    contract: str
    fields: Dict[str, Value]
    balance: int = 0


Account = Union[ExternalAccount, ContractInstance]


@dataclass
class ChainState:
    accounts: Dict[int, Account] = field(default_factory=dict)

    def get(self, addr: int) -> Optional[Account]:
        return self.accounts.get(addr)

    def balance(self, addr: int) -> int:
        acct = self.accounts.get(addr)
        return acct.balance if acct is not None else 0

    def instance(self, addr: int) -> Optional[ContractInstance]:
        acct = self.accounts.get(addr)
        return acct if isinstance(acct, ContractInstance) else None

    def total_wei(self) -> int:
        return sum(a.balance for a in self.accounts.values())

    def copy(self) -> "ChainState":
        out: Dict[int, Account] = {}
        for addr, a in self.accounts.items():
            if isinstance(a, ContractInstance):
                out[addr] = ContractInstance(a.contract, dict(a.fields), a.balance)
            else:
                out[addr] = ExternalAccount(a.balance)
        return ChainState(out)

    def summary(self) -> List[dict]:
        rows = []
        for addr in sorted(self.accounts):
            a = self.accounts[addr]
            row = {"address": format_addr(addr), "balance": str(a.balance)}
            if isinstance(a, ContractInstance):
                row["contract"] = a.contract
            rows.append(row)
        return rows


# ---------------------------------------------------------------- reverts


@dataclass(frozen=True)
class MessageNotUnderstood:
    address: int
    function: str

    def explain(self) -> str:
        return f"no function '{self.function}' at {format_addr(self.address)}"


@dataclass(frozen=True)
class NoFallback:
    address: int

    def explain(self) -> str:
        return f"contract at {format_addr(self.address)} has no fallback function to receive the transfer"


@dataclass(frozen=True)
class InsufficientBalance:
    address: int = 0
    needed: int = 0
    available: int = 0

    def explain(self) -> str:
        return f"{format_addr(self.address)} holds {self.available} wei, needs {self.needed}"


@dataclass(frozen=True)
class RequirementFailed:
    def explain(self) -> str:
        return "require condition was false"


@dataclass(frozen=True)
class NonPayable:
    function: str = ""

    def explain(self) -> str:
        return f"function '{self.function}' is not payable but received value"


@dataclass(frozen=True)
class TypeConfusion:
    expected: str
    got: str

    def explain(self) -> str:
        return f"expected {self.expected}, got {self.got}"


@dataclass(frozen=True)
class CallDepthExceeded:
    def explain(self) -> str:
        return f"call depth limit of {MAX_DEPTH} exceeded"


RevertReason = Union[
    MessageNotUnderstood, NoFallback, InsufficientBalance, RequirementFailed,
    NonPayable, TypeConfusion, CallDepthExceeded,
]
REVERT_REASONS = (
    "MessageNotUnderstood", "NoFallback", "InsufficientBalance", "RequirementFailed",
    "NonPayable", "TypeConfusion", "CallDepthExceeded",
)
# Reasons a well-typed program under refined typing must never hit.
FORBIDDEN_REASONS = frozenset({"MessageNotUnderstood", "NoFallback", "TypeConfusion"})


def reason_name(r: RevertReason) -> str:
    return type(r).__name__


def reason_to_json(r: RevertReason) -> dict:
    out = {"name": reason_name(r), "explain": r.explain()}
    for k, v in vars(r).items():
        out[k] = format_addr(v) if k == "address" else (str(v) if isinstance(v, int) else v)
    return out


# ---------------------------------------------------------------- trace


@dataclass(frozen=True)
class CallEv:
    sender: int
    to: int
    fname: str
    args: tuple
    value: int

    def to_json(self) -> dict:
        return {"ev": "Call", "from": format_addr(self.sender), "to": format_addr(self.to),
                "fname": self.fname, "args": [value_to_json(a) for a in self.args],
                "value": str(self.value)}


@dataclass(frozen=True)
class TransferEv:
    sender: int
    to: int
    amount: int

    def to_json(self) -> dict:
        return {"ev": "TransferEv", "from": format_addr(self.sender), "to": format_addr(self.to),
                "amount": str(self.amount)}


@dataclass(frozen=True)
class FallbackRun:
    at: int

    def to_json(self) -> dict:
        return {"ev": "FallbackRun", "at": format_addr(self.at)}


@dataclass(frozen=True)
class StateWrite:
    addr: int
    var: str
    old: Value
    new: Value

    def to_json(self) -> dict:
        return {"ev": "StateWrite", "addr": format_addr(self.addr), "var": self.var,
                "old": value_to_json(self.old), "new": value_to_json(self.new)}


@dataclass(frozen=True)
class RevertBubble:
    reason: RevertReason

    def to_json(self) -> dict:
        return {"ev": "RevertBubble", "reason": reason_to_json(self.reason)}


TraceEvent = Union[CallEv, TransferEv, FallbackRun, StateWrite, RevertBubble]


def trace_to_jsonl(trace) -> str:
    return "".join(json.dumps(ev.to_json(), sort_keys=True) + "\n" for ev in trace)


# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class Success:
    return_value: Optional[Value]
    trace: tuple = ()

    ok = True


@dataclass(frozen=True)
class Reverted:
    reason: RevertReason
    site: Optional[Span]
    trace: tuple = ()

    ok = False


Outcome = Union[Success, Reverted]


class Revert(Exception):
    """Raised inside the interpreter; caught at the transaction boundary."""

    def __init__(self, reason: RevertReason, site: Optional[Span] = None) -> None:
        super().__init__(reason.explain())
        self.reason = reason
        self.site = site


class DeployError(Exception):
    def __init__(self, message: str, reason: Optional[RevertReason] = None,
                 site: Optional[Span] = None) -> None:
        super().__init__(message)
        self.reason = reason
        self.site = site


class AddressOccupied(DeployError):
    pass


@dataclass(frozen=True)
class Transaction:
    sender: int
    to: int
    fname: str
    args: tuple = ()
    value: int = 0
