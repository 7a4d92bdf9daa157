"""Abstract syntax for FSol programs.

Every node is a frozen dataclass. Source spans are carried on every node but
excluded from equality, so two trees parsed from differently formatted text
compare equal when they denote the same program.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

TOP = "Top"
TOP_FB = "Top_fb"
RESERVED_CONTRACTS = (TOP, TOP_FB)


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int
    start: int
    end: int

    def __post_init__(self) -> None:
        assert self.start <= self.end, (self.start, self.end)

    def __str__(self) -> str:
        if self.line == 0:
            return self.file
        return f"{self.file}:{self.line}:{self.col}"

    def to_json(self) -> dict:
        return {
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "start": self.start,
            "end": self.end,
        }

    def covers(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


def _span() -> Optional[Span]:
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- types


class TypeKind(enum.Enum):
    UINT = "uint"
    UINT160 = "uint160"
    BOOL = "bool"
    BARE_ADDRESS = "address"
    PAYABLE_ADDRESS = "address payable"
    REF_ADDRESS = "address<>"
    CONTRACT = "contract"


@dataclass(frozen=True)
class TypeRepr:
    """A static type. ``contract`` is set only for REF_ADDRESS and CONTRACT."""

    kind: TypeKind
    contract: Optional[str] = None

    def __str__(self) -> str:
        if self.kind is TypeKind.REF_ADDRESS:
            return f"address<{self.contract}>"
        if self.kind is TypeKind.CONTRACT:
            return str(self.contract)
        return self.kind.value

    @property
    def is_address(self) -> bool:
        return self.kind in (
            TypeKind.BARE_ADDRESS,
            TypeKind.PAYABLE_ADDRESS,
            TypeKind.REF_ADDRESS,
        )

    @property
    def is_contract(self) -> bool:
        return self.kind is TypeKind.CONTRACT


UINT = TypeRepr(TypeKind.UINT)
UINT160 = TypeRepr(TypeKind.UINT160)
BOOL = TypeRepr(TypeKind.BOOL)
BARE_ADDRESS = TypeRepr(TypeKind.BARE_ADDRESS)
PAYABLE_ADDRESS = TypeRepr(TypeKind.PAYABLE_ADDRESS)


def ref_address(name: str) -> TypeRepr:
    return TypeRepr(TypeKind.REF_ADDRESS, name)


def contract_type(name: str) -> TypeRepr:
    return TypeRepr(TypeKind.CONTRACT, name)


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class IntLit:
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class AddrLit:
    value: int
    span: Optional[Span] = _span()

    def __post_init__(self) -> None:
        assert 0 <= self.value < 1 << 160


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class This:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MsgSender:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MsgValue:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Call:
    receiver: "Expr"
    fname: str
    args: Tuple["Expr", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Transfer:
    receiver: "Expr"
    amount: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BalanceOf:
    receiver: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Cast:
    """``target(operand)``: target is BARE_ADDRESS, UINT160 or a CONTRACT type."""

    target: TypeRepr
    operand: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    span: Optional[Span] = _span()


Expr = Union[
    IntLit, BoolLit, AddrLit, Var, This, MsgSender, MsgValue,
    Call, Transfer, BalanceOf, Cast, BinOp, Not,
]

ARITH_OPS = ("+", "-", "*")
ORDER_OPS = ("<", "<=", ">", ">=")
EQ_OPS = ("==", "!=")
LOGIC_OPS = ("&&", "||")


# ---------------------------------------------------------------- statements


@dataclass(frozen=True)
class LocalDecl:
    type: TypeRepr
    name: str
    init: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Require:
    cond: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Tuple["Stmt", ...]
    orelse: Optional[Tuple["Stmt", ...]] = None
    span: Optional[Span] = _span()


Stmt = Union[LocalDecl, Assign, ExprStmt, Return, Require, If]


# ---------------------------------------------------------------- declarations


class CallerKind(enum.Enum):
    DEFAULT = "default"
    PAYBACK = "payback"
    NAMED = "named"


@dataclass(frozen=True)
class CallerAnnotation:
    kind: CallerKind = CallerKind.DEFAULT
    name: Optional[str] = None
    span: Optional[Span] = _span()

    @property
    def bound(self) -> str:
        """The contract the caller must be a subtype of."""
        if self.kind is CallerKind.PAYBACK:
            return TOP_FB
        if self.kind is CallerKind.NAMED:
            assert self.name is not None
            return self.name
        return TOP


DEFAULT_CALLER = CallerAnnotation()


@dataclass(frozen=True)
class Param:
    type: TypeRepr
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class StateVar:
    type: TypeRepr
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Constructor:
    params: Tuple[Param, ...]
    payable: bool
    body: Tuple[Stmt, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Fallback:
    body: Tuple[Stmt, ...]
    span: Optional[Span] = _span()


VISIBILITIES = ("external", "public", "private")


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: Tuple[Param, ...]
    caller: CallerAnnotation
    visibility: str
    payable: bool
    returns: Optional[TypeRepr]
    body: Tuple[Stmt, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ContractDecl:
    name: str
    parent: Optional[str]
    state_vars: Tuple[StateVar, ...] = ()
    ctor: Optional[Constructor] = None
    functions: Tuple[FunctionDecl, ...] = ()
    fallback: Optional[Fallback] = None
    span: Optional[Span] = _span()

    def function(self, name: str) -> Optional[FunctionDecl]:
        for f in self.functions:
            if f.name == name:
                return f
        return None


@dataclass(frozen=True)
class Program:
    contracts: Tuple[ContractDecl, ...] = ()

    def contract(self, name: str) -> Optional[ContractDecl]:
        for c in self.contracts:
            if c.name == name:
                return c
        return None


Node = Union[Expr, Stmt, ContractDecl, FunctionDecl, Program]


def iter_exprs(e: Expr):
    """Pre-order walk over an expression tree."""
    yield e
    if isinstance(e, Call):
        yield from iter_exprs(e.receiver)
        for a in e.args:
            yield from iter_exprs(a)
    elif isinstance(e, Transfer):
        yield from iter_exprs(e.receiver)
        yield from iter_exprs(e.amount)
    elif isinstance(e, (BalanceOf,)):
        yield from iter_exprs(e.receiver)
    elif isinstance(e, (Cast, Not)):
        yield from iter_exprs(e.operand)
    elif isinstance(e, BinOp):
        yield from iter_exprs(e.left)
        yield from iter_exprs(e.right)


def stmt_exprs(s: Stmt):
    """Expressions directly owned by ``s`` (nested blocks excluded)."""
    if isinstance(s, LocalDecl):
        return (s.init,)
    if isinstance(s, Assign):
        return (s.value,)
    if isinstance(s, ExprStmt):
        return (s.expr,)
    if isinstance(s, Return):
        return (s.value,) if s.value is not None else ()
    if isinstance(s, Require):
        return (s.cond,)
    if isinstance(s, If):
        return (s.cond,)
    raise TypeError(s)


def iter_stmts(block):
    """Every statement in ``block``, descending into ``if`` branches."""
    for s in block:
        yield s
        if isinstance(s, If):
            yield from iter_stmts(s.then)
            if s.orelse is not None:
                yield from iter_stmts(s.orelse)
