"""Scenario files: deployments plus transactions, and the runner that plays them."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .checker.refined import elaborate_legacy
from .diagnostics import Diagnostic, DiagnosticError, error, warning
from .syntax import ast as A
from .syntax.ast import Span
from .syntax.hierarchy import ContractTable
from .syntax.printer import format_addr
from .vm import (
    REVERT_REASONS, AddrV, BoolV, ChainState, DeployError, ExternalAccount, Machine,
    Reverted, Transaction, UIntV, reason_name,
)
from .vm.state import WORD, reason_to_json, trace_to_jsonl, value_to_json

_ADDR = re.compile(r"0x[0-9a-fA-F]{40}")
DEPLOYER = 0


@dataclass(frozen=True)
class Deployment:
    contract: str
    address: int
    args: tuple = ()
    balance: int = 0


@dataclass(frozen=True)
class Eoa:
    address: int
    balance: int = 0


@dataclass(frozen=True)
class Expectation:
    outcome: str  # success | revert
    reason: Optional[str] = None


@dataclass(frozen=True)
class TxSpec:
    sender: int
    to: int
    function: str
    args: tuple = ()
    value: int = 0
    expect: Optional[Expectation] = None

    def transaction(self) -> Transaction:
        return Transaction(self.sender, self.to, self.function, self.args, self.value)


@dataclass(frozen=True)
class Scenario:
    deployments: Tuple[Deployment, ...] = ()
    eoas: Tuple[Eoa, ...] = ()
    transactions: Tuple[TxSpec, ...] = ()


# ---------------------------------------------------------------- loading


class _Bad(Exception):
    pass


def _where(file: str) -> Span:
    return Span(file, 0, 0, 0, 0)


def _addr(v, what: str) -> int:
    if not isinstance(v, str) or not _ADDR.fullmatch(v):
        raise _Bad(f"{what}: malformed address {v!r} (expected 0x followed by 40 hex digits)")
    return int(v, 16)


def _wei(v, what: str) -> int:
    if isinstance(v, str) and v.isdigit():
        n = int(v)
        if n < WORD:
            return n
    raise _Bad(f"{what}: expected a decimal string below 2**256, got {v!r}")


def _arg(v, what: str):
    if isinstance(v, dict) and len(v) == 1:
        (k, x), = v.items()
        if k == "uint":
            return UIntV(_wei(x, what))
        if k == "bool" and isinstance(x, bool):
            return BoolV(x)
        if k == "address":
            return AddrV(_addr(x, what))
    raise _Bad(f"{what}: malformed argument {v!r}")


def _obj(v, keys: set, what: str, optional: set = frozenset()) -> dict:
    if not isinstance(v, dict):
        raise _Bad(f"{what}: expected an object")
    missing = keys - set(v)
    if missing:
        raise _Bad(f"{what}: missing field(s) {', '.join(sorted(missing))}")
    extra = set(v) - keys - optional
    if extra:
        raise _Bad(f"{what}: unknown field(s) {', '.join(sorted(extra))}")
    return v


def _list(v, what: str) -> list:
    if not isinstance(v, list):
        raise _Bad(f"{what}: expected an array")
    return v


def scenario_from_json(data, file: str = "<scenario>",
                       table: Optional[ContractTable] = None) -> Scenario:
    """Build and structurally validate a scenario; raises DiagnosticError."""
    diags: List[Diagnostic] = []

    def attempt(fn):
        try:
            return fn()
        except _Bad as exc:
            diags.append(error("SCN-FORMAT", str(exc), _where(file)))
            return None

    top = attempt(lambda: _obj(data, {"deployments", "eoas", "transactions"}, "scenario"))
    if top is None:
        raise DiagnosticError(diags)

    def deployment(i, d):
        what = f"deployment #{i}"
        d = _obj(d, {"contract", "address"}, what, {"args", "balance"})
        if not isinstance(d["contract"], str):
            raise _Bad(f"{what}: contract must be a string")
        args = tuple(_arg(a, f"{what} argument #{j}") for j, a in enumerate(_list(d.get("args", []), what)))
        return Deployment(d["contract"], _addr(d["address"], what), args, _wei(d.get("balance", "0"), what))

    def eoa(i, d):
        what = f"eoa #{i}"
        d = _obj(d, {"address"}, what, {"balance"})
        return Eoa(_addr(d["address"], what), _wei(d.get("balance", "0"), what))

    def tx(i, d):
        what = f"transaction #{i}"
        d = _obj(d, {"from", "to", "function"}, what, {"args", "value", "expect"})
        args = tuple(_arg(a, f"{what} argument #{j}") for j, a in enumerate(_list(d.get("args", []), what)))
        expect = None
        if "expect" in d:
            e = _obj(d["expect"], {"outcome"}, f"{what} expectation", {"reason"})
            if e["outcome"] not in ("success", "revert"):
                raise _Bad(f"{what}: expectation outcome must be 'success' or 'revert'")
            reason = e.get("reason")
            if reason is not None and reason not in REVERT_REASONS:
                raise _Bad(f"{what}: unknown revert reason {reason!r}")
            expect = Expectation(e["outcome"], reason)
        if not isinstance(d["function"], str):
            raise _Bad(f"{what}: function must be a string")
        return TxSpec(_addr(d["from"], what), _addr(d["to"], what), d["function"], args,
                      _wei(d.get("value", "0"), what), expect)

    deployments = [attempt(lambda i=i, d=d: deployment(i, d))
                   for i, d in enumerate(attempt(lambda: _list(top["deployments"], "deployments")) or [])]
    eoas = [attempt(lambda i=i, d=d: eoa(i, d))
            for i, d in enumerate(attempt(lambda: _list(top["eoas"], "eoas")) or [])]
    txs = [attempt(lambda i=i, d=d: tx(i, d))
           for i, d in enumerate(attempt(lambda: _list(top["transactions"], "transactions")) or [])]

    seen = {}
    for kind, items in (("deployment", deployments), ("eoa", eoas)):
        for i, item in enumerate(items):
            if item is None:
                continue
            if item.address in seen:
                diags.append(error("SCN-DUP-ADDRESS", f"{kind} #{i}: address {format_addr(item.address)} already used by {seen[item.address]}", _where(file)))
            else:
                seen[item.address] = f"{kind} #{i}"
            if table is not None and kind == "deployment" and (
                item.contract not in table or table[item.contract].synthetic
            ):
                diags.append(error("SCN-UNKNOWN-CONTRACT", f"deployment #{i}: unknown contract '{item.contract}'", _where(file)))
    eoa_addrs = {e.address for e in eoas if e is not None}
    for i, t in enumerate(txs):
        if t is not None and t.sender not in eoa_addrs:
            diags.append(error("SCN-SENDER", f"transaction #{i}: sender {format_addr(t.sender)} is not a declared EOA", _where(file)))
    if diags:
        raise DiagnosticError(diags)
    return Scenario(tuple(deployments), tuple(eoas), tuple(txs))


def load_scenario(path: str, table: Optional[ContractTable] = None) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DiagnosticError([error("SCN-FORMAT", f"malformed JSON: {exc}", _where(path))])
    return scenario_from_json(data, path, table)


def _arg_json(v) -> dict:
    if isinstance(v, UIntV):
        return {"uint": str(v.value)}
    if isinstance(v, BoolV):
        return {"bool": v.value}
    return {"address": format_addr(v.addr)}


def scenario_to_json(sc: Scenario) -> dict:
    def tx(t: TxSpec) -> dict:
        out = {"from": format_addr(t.sender), "to": format_addr(t.to), "function": t.function,
               "args": [_arg_json(a) for a in t.args], "value": str(t.value)}
        if t.expect is not None:
            out["expect"] = {"outcome": t.expect.outcome}
            if t.expect.reason is not None:
                out["expect"]["reason"] = t.expect.reason
        return out

    return {
        "deployments": [{"contract": d.contract, "address": format_addr(d.address),
                         "args": [_arg_json(a) for a in d.args], "balance": str(d.balance)}
                        for d in sc.deployments],
        "eoas": [{"address": format_addr(e.address), "balance": str(e.balance)} for e in sc.eoas],
        "transactions": [tx(t) for t in sc.transactions],
    }


# ---------------------------------------------------------------- entry constraints


def _arg_type_ok(table: ContractTable, contract_at: dict, raw, ty: A.TypeRepr) -> bool:
    if ty.kind is A.TypeKind.UINT:
        return isinstance(raw, UIntV)
    if ty.kind is A.TypeKind.UINT160:
        return isinstance(raw, UIntV) and raw.value < (1 << 160)
    if ty.kind is A.TypeKind.BOOL:
        return isinstance(raw, BoolV)
    if not isinstance(raw, AddrV):
        return False
    actual = contract_at.get(raw.addr, A.TOP_FB)
    return table.contract_le(actual, elaborate_legacy(ty).contract)


def validate_entry_constraints(sc: Scenario, program: A.Program, table: ContractTable,
                               mode: str, file: str = "<scenario>") -> List[Diagnostic]:
    """Refined mode only: every entry point must admit an external caller.

    External accounts are typed ``Top_fb``. A transaction is rejected when its
    target is not a deployed contract function, when the function is private,
    when its caller bound is not a supertype of ``Top_fb``, or when an argument
    does not fit its parameter given what is deployed at each address.
    """
    if mode != "refined":
        return []
    diags: List[Diagnostic] = []
    where = _where(file)
    contract_at: dict = {}
    for i, d in enumerate(sc.deployments):
        ctor = table[d.contract].decl.ctor if d.contract in table else None
        params = ctor.params if ctor is not None else ()
        if len(params) != len(d.args):
            diags.append(error("SCN-ARITY", f"deployment #{i}: constructor of '{d.contract}' takes {len(params)} argument(s), got {len(d.args)}", where))
        else:
            for j, (p, a) in enumerate(zip(params, d.args)):
                if not _arg_type_ok(table, contract_at, a, p.type):
                    diags.append(error("SCN-ARG-TYPE", f"deployment #{i}: argument #{j} does not fit parameter '{p.name}' of type {p.type}", where))
        contract_at[d.address] = d.contract
    for i, t in enumerate(sc.transactions):
        target = contract_at.get(t.to)
        if target is None:
            diags.append(error("SCN-TARGET", f"transaction #{i}: no contract is deployed at {format_addr(t.to)}", where))
            continue
        fn = table.lookup_function(target, t.function)
        if fn is None:
            diags.append(error("SCN-TARGET", f"transaction #{i}: contract '{target}' has no function '{t.function}'", where))
            continue
        if fn.decl.visibility == "private":
            diags.append(error("SCN-PRIVATE", f"transaction #{i}: '{fn.owner}.{t.function}' is private", where))
        bound = fn.decl.caller.bound
        if not table.contract_le(A.TOP_FB, bound):
            diags.append(error(
                "SCN-CALLER-BOUND",
                f"transaction #{i}: external accounts (Top_fb) may not call '{fn.owner}.{t.function}', "
                f"whose caller bound is '{bound}'",
                where,
            ))
        params = fn.decl.params
        if len(params) != len(t.args):
            diags.append(error("SCN-ARITY", f"transaction #{i}: '{fn.owner}.{t.function}' takes {len(params)} argument(s), got {len(t.args)}", where))
        else:
            for j, (p, a) in enumerate(zip(params, t.args)):
                if not _arg_type_ok(table, contract_at, a, p.type):
                    diags.append(error("SCN-ARG-TYPE", f"transaction #{i}: argument #{j} does not fit parameter '{p.name}' of type {p.type}", where))
    return diags


def literal_warnings(sc: Scenario, program: A.Program, table: ContractTable,
                     file: str = "<scenario>") -> List[Diagnostic]:
    """Address literals are typed payable; flag those that name fallback-less contracts."""
    deployed = {d.address: d.contract for d in sc.deployments}
    out = []
    for c in program.contracts:
        bodies = [f.body for f in c.functions]
        if c.ctor is not None:
            bodies.append(c.ctor.body)
        if c.fallback is not None:
            bodies.append(c.fallback.body)
        for body in bodies:
            for s in A.iter_stmts(body):
                for root in A.stmt_exprs(s):
                    for e in A.iter_exprs(root):
                        if isinstance(e, A.AddrLit) and e.value in deployed:
                            name = deployed[e.value]
                            if name in table and not table.has_fallback(name):
                                out.append(warning(
                                    "SCN-LITERAL-NOFALLBACK",
                                    f"literal {format_addr(e.value)} is typed payable but the scenario "
                                    f"deploys '{name}' (no fallback) there",
                                    e.span,
                                ))
    return out


# ---------------------------------------------------------------- running


EXIT_OK = 0
EXIT_TYPE_ERRORS = 1
EXIT_EXPECTATION = 2
EXIT_USAGE = 3
EXIT_UNSOUND = 4


@dataclass
class TxResult:
    index: int
    tx: TxSpec
    outcome: object
    passed: bool
    note: str = ""

    def to_json(self) -> dict:
        out = {"index": self.index, "function": self.tx.function, "to": format_addr(self.tx.to),
               "passed": self.passed}
        if isinstance(self.outcome, Reverted):
            out["outcome"] = "revert"
            out["reason"] = reason_to_json(self.outcome.reason)
            out["site"] = str(self.outcome.site) if self.outcome.site else None
        else:
            out["outcome"] = "success"
            rv = self.outcome.return_value
            out["return"] = value_to_json(rv) if rv is not None else None
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class RunReport:
    mode: str
    results: List[TxResult] = field(default_factory=list)
    final_state: Optional[ChainState] = None
    deploy_error: Optional[str] = None
    warnings: List[Diagnostic] = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        if self.deploy_error is not None or not all(r.passed for r in self.results):
            return EXIT_EXPECTATION
        return EXIT_OK

    def failures(self) -> List[TxResult]:
        return [r for r in self.results if not r.passed]

    def trace_jsonl(self) -> str:
        return "".join(trace_to_jsonl(r.outcome.trace) for r in self.results)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "deploy_error": self.deploy_error,
            "transactions": [r.to_json() for r in self.results],
            "final_state": self.final_state.summary() if self.final_state is not None else [],
            "warnings": [w.to_json() for w in self.warnings],
            "exit_status": self.exit_status,
        }

    def render_text(self) -> str:
        lines = [w.render() for w in self.warnings]
        if self.deploy_error is not None:
            lines.append(f"deployment failed: {self.deploy_error}")
        for r in self.results:
            o = r.outcome
            if isinstance(o, Reverted):
                what = f"revert {reason_name(o.reason)} ({o.reason.explain()})"
                if o.site is not None:
                    what += f" at {o.site}"
            else:
                what = "success"
            mark = "ok  " if r.passed else "FAIL"
            lines.append(f"{mark} tx #{r.index} {r.tx.function} -> {format_addr(r.tx.to)}: {what}"
                         + (f" [{r.note}]" if r.note else ""))
        if self.final_state is not None:
            lines.append("balances:")
            for row in self.final_state.summary():
                label = f" ({row['contract']})" if "contract" in row else ""
                lines.append(f"  {row['address']}{label}: {row['balance']}")
        return "\n".join(lines) + "\n"


def _judge(outcome, expect: Optional[Expectation]) -> Tuple[bool, str]:
    reverted = isinstance(outcome, Reverted)
    if expect is None:
        return (not reverted, "unexpected revert" if reverted else "")
    if expect.outcome == "success":
        return (not reverted, "expected success" if reverted else "")
    if not reverted:
        return False, "expected revert, got success"
    got = reason_name(outcome.reason)
    if expect.reason is not None and got != expect.reason:
        return False, f"expected revert {expect.reason}, got {got}"
    return True, ""


def setup_state(machine: Machine, sc: Scenario) -> ChainState:
    """Genesis: fund EOAs, then deploy in order. Raises DeployError."""
    state = ChainState()
    for e in sc.eoas:
        state.accounts[e.address] = ExternalAccount(e.balance)
    for d in sc.deployments:
        state = machine.deploy(state, d.contract, d.args, d.address, d.balance, DEPLOYER)
    return state


def run_scenario(program: A.Program, table: ContractTable, sc: Scenario, mode: str,
                 file: str = "<scenario>") -> RunReport:
    machine = Machine(table, mode)
    report = RunReport(mode)
    if mode == "refined":
        report.warnings = literal_warnings(sc, program, table, file)
    try:
        state = setup_state(machine, sc)
    except DeployError as exc:
        report.deploy_error = str(exc)
        return report
    for i, t in enumerate(sc.transactions):
        state, outcome = machine.exec_transaction(state, t.transaction())
        passed, note = _judge(outcome, t.expect)
        report.results.append(TxResult(i, t, outcome, passed, note))
    report.final_state = state
    return report
